#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dln/basis.hpp"
#include "oracles.hpp"

using namespace dln;

namespace {

Spectrum lambda21(int depth) {
  Vector lambda(2);
  lambda << 2, 1;
  return Spectrum::from_lambda(lambda, depth);
}

}  // namespace

TEST_SUITE("basis") {

TEST_CASE("center_tangent_c: slot layout and endpoint cases") {
  const Spectrum spec = lambda21(3);
  const Matrix alpha = skew_basis_element(1, 2, 2);
  const Matrix lam = spec.lambda.asDiagonal();

  const TangentVector c1 = center_tangent_c(1, 2, 1, spec);
  CHECK((c1.slot(1) - alpha * lam).norm() == 0.0);
  CHECK((c1.slot(2) + lam * alpha).norm() == 0.0);
  CHECK(c1.slot(3).norm() == 0.0);

  const TangentVector c0 = center_tangent_c(1, 2, 0, spec);
  CHECK((c0.slot(1) + lam * alpha).norm() == 0.0);
  CHECK(c0.slot(2).norm() == 0.0);
  CHECK(c0.slot(3).norm() == 0.0);

  const TangentVector cn = center_tangent_c(1, 2, 3, spec);
  CHECK((cn.slot(3) - alpha * lam).norm() == 0.0);
  CHECK(cn.slot(1).norm() == 0.0);

  CHECK_THROWS_AS(center_tangent_c(2, 1, 1, spec), IndexError);
  CHECK_THROWS_AS(center_tangent_c(1, 2, 4, spec), IndexError);
}

TEST_CASE("center_tangent_c: norms match the Jacobi block entries") {
  const Spectrum spec = lambda21(3);
  const TangentVector interior = center_tangent_c(1, 2, 1, spec);
  CHECK(frobenius_ip(interior, interior) == doctest::Approx(5.0));  // lambda_k^2 + lambda_l^2
  const TangentVector end = center_tangent_c(1, 2, 0, spec);
  CHECK(frobenius_ip(end, end) == doctest::Approx(2.5));  // half of that at the boundary
}

TEST_CASE("extended Gram of the generators reproduces the extended Jacobi block") {
  const int n = 4;
  const Spectrum spec = lambda21(n);
  std::vector<TangentVector> c;
  for (int p = 0; p <= n; ++p) c.push_back(center_tangent_c(1, 2, p, spec));
  const JacobiBlock ext = jacobi_block(2.0, 1.0, n, JacobiBoundary::Extended);
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q)
      CHECK(frobenius_ip(c[p], c[q]) == doctest::Approx(ext.entries(p, q)).epsilon(1e-13));
}

TEST_CASE("generators of distinct pairs are orthogonal, and radial directions too") {
  Vector lambda(3);
  lambda << 1.9, 1.1, 0.6;
  const Spectrum spec = Spectrum::from_lambda(lambda, 3);
  const TangentVector c12 = center_tangent_c(1, 2, 1, spec);
  const TangentVector c13 = center_tangent_c(1, 3, 1, spec);
  const TangentVector c23 = center_tangent_c(2, 3, 2, spec);
  CHECK(frobenius_ip(c12, c13) == 0.0);
  CHECK(frobenius_ip(c12, c23) == 0.0);
  for (int j = 1; j <= 3; ++j) {
    const TangentVector m = center_tangent_m(j, spec);
    for (int p = 0; p <= 3; ++p)
      CHECK(frobenius_ip(m, center_tangent_c(1, 2, p, spec)) == 0.0);
  }
}

TEST_CASE("recover_frames: reconstructs the layers it factored") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 2 + int(rng() % 3);
    const int n = 2 + int(rng() % 4);
    const Network w = oracles::random_balanced(d, n, rng);
    const FrameDecomposition fd = recover_frames(w);
    const Network rebuilt = assemble_network(fd.spectrum, fd.frames);
    double dev = 0.0;
    for (int p = 1; p <= n; ++p) dev = std::max(dev, (rebuilt.layer(p) - w.layer(p)).norm());
    CHECK(dev < 1e-11);
  }
}

TEST_CASE("recover_frames: error taxonomy") {
  Matrix w1 = Matrix::Identity(2, 2) * 2.0;
  Matrix w2 = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(recover_frames(Network({w1, w2})), NotBalanced);

  Matrix x = 4.0 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(recover_frames(center_of_fiber(x, 2)), CoincidentSingularValues);
}

TEST_CASE("onb_vectors: width 1 reduces to the normalized radial direction") {
  Matrix x(1, 1);
  x << 5.0;
  const Network center = center_of_fiber(x, 4);
  const OrthonormalBasis basis = onb_vectors(center);
  REQUIRE(basis.vectors.size() == 1);
  CHECK(basis.vectors[0].norm() == doctest::Approx(1.0));
  for (int s = 1; s <= 4; ++s)
    CHECK(std::abs(basis.vectors[0].slot(s)(0, 0)) == doctest::Approx(0.5));  // 1/sqrt(4)
}

TEST_CASE("onb_vectors: anchored boundary coefficients at lambda=(2,1), depth 2") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 4;
  x(1, 1) = 1;
  const Network center = center_of_fiber(x, 2);
  const OrthonormalBasis basis = onb_vectors(center);
  const double inv_sqrt5 = 1.0 / std::sqrt(5.0);
  for (size_t i = 0; i < basis.vectors.size(); ++i) {
    const BasisLabel& label = basis.labels[i];
    if (label.kind != BasisLabel::Kind::GaugePlane || label.p != 0) continue;
    // u^{1,2,0} slots carry coefficients (1,2)/sqrt(5) on e_2 e_1^T
    CHECK(basis.vectors[i].slot(1)(1, 0) == doctest::Approx(inv_sqrt5));
    CHECK(basis.vectors[i].slot(2)(1, 0) == doctest::Approx(2.0 * inv_sqrt5));
    CHECK(frobenius_ip(basis.vectors[i], basis.vectors[i]) == doctest::Approx(1.0));
  }
}

TEST_CASE("onb_vectors: interior coefficients follow the sine formulas at the center") {
  // At the center the slots of u^{k,l,p} (1 <= p <= N-1) are combinations of
  // e_k e_l^T and e_l e_k^T with coefficients
  //   -+ (lambda_k sin((s-1)p pi/N) - lambda_l sin(s p pi/N)) / sqrt(N sigma_p)
  // (first family negated in this construction; swap k and l for the second).
  const int n = 4;
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = std::pow(2.0, n);
  x(1, 1) = 1.0;
  const Network center = center_of_fiber(x, n);  // lambda = (2,1)
  const OrthonormalBasis basis = onb_vectors(center);
  const double lk = 2.0, ll = 1.0;
  const double pi = std::numbers::pi;
  for (size_t i = 0; i < basis.vectors.size(); ++i) {
    const BasisLabel& label = basis.labels[i];
    if (!label.is_kernel(n)) continue;
    const int p = label.p;
    const double sigma_p = lk * lk + ll * ll - 2.0 * lk * ll * std::cos(p * pi / n);
    for (int s = 1; s <= n; ++s) {
      const double a_kl = (lk * std::sin((s - 1) * p * pi / n) - ll * std::sin(s * p * pi / n)) /
                          std::sqrt(n * sigma_p);
      const double a_lk = (ll * std::sin((s - 1) * p * pi / n) - lk * std::sin(s * p * pi / n)) /
                          std::sqrt(n * sigma_p);
      CHECK(basis.vectors[i].slot(s)(0, 1) == doctest::Approx(-a_kl).epsilon(1e-12));
      CHECK(basis.vectors[i].slot(s)(1, 0) == doctest::Approx(a_lk).epsilon(1e-12));
    }
  }
}

TEST_CASE("onb_vectors: count and Gram identity at random balanced points") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 2 + int(rng() % 4);
    const int n = 2 + int(rng() % 5);
    const Network w = oracles::random_balanced(d, n, rng);
    const OrthonormalBasis basis = onb_vectors(w);
    const int pairs = d * (d - 1) / 2;
    const int expected = d + (n + 1) * pairs;
    CHECK(int(basis.vectors.size()) == expected);
    CHECK(expected == d * d + (n - 1) * pairs);  // same dimension count
    CHECK(basis.kernel_dimension() == (n - 1) * pairs);

    double dev = 0.0;
    for (size_t i = 0; i < basis.vectors.size(); ++i)
      for (size_t j = i; j < basis.vectors.size(); ++j) {
        const double g = frobenius_ip(basis.vectors[i], basis.vectors[j]);
        dev = std::max(dev, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    CHECK(dev < 1e-9);
  }
}

TEST_CASE("onb_vectors: spans the translated generators and radial directions") {
  std::mt19937_64 rng(79);
  const int d = 3, n = 3;
  const Network w = oracles::random_balanced(d, n, rng);
  const OrthonormalBasis basis = onb_vectors(w);
  const FrameDecomposition& fd = basis.decomposition;

  std::vector<TangentVector> targets;
  for (int k = 1; k <= d; ++k)
    targets.push_back(translate_tangent(fd.frames, center_tangent_m(k, fd.spectrum)));
  for (int k = 1; k <= d; ++k)
    for (int l = k + 1; l <= d; ++l)
      for (int p = 0; p <= n; ++p)
        targets.push_back(translate_tangent(fd.frames, center_tangent_c(k, l, p, fd.spectrum)));

  for (const TangentVector& t : targets) {
    TangentVector residual = t;
    for (const TangentVector& e : basis.vectors) {
      const double coeff = frobenius_ip(t, e);
      for (int s = 1; s <= n; ++s) residual.slot(s) -= coeff * e.slot(s);
    }
    CHECK(residual.norm() < 1e-8);
  }
}

TEST_CASE("onb_vectors: error taxonomy") {
  Matrix w1 = Matrix::Identity(2, 2) * 2.0;
  Matrix w2 = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(onb_vectors(Network({w1, w2})), NotBalanced);
  CHECK_THROWS_AS(onb_vectors(center_of_fiber(3.0 * Matrix::Identity(2, 2), 2)),
                  CoincidentSingularValues);
}

TEST_CASE("pushforward_dphi: depth 1 is the identity map") {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  const Network w({x});
  TangentVector t = TangentVector::zeros(1, 2);
  t.slot(1) << 0.3, -1.0, 0.5, 0.9;
  CHECK((pushforward_dphi(w, t) - t.slot(1)).norm() == 0.0);
}

TEST_CASE("pushforward_dphi: interior generators are in the kernel at balanced points") {
  std::mt19937_64 rng(83);
  const Network w = oracles::random_balanced(3, 4, rng);
  const FrameDecomposition fd = recover_frames(w);
  for (int k = 1; k <= 3; ++k)
    for (int l = k + 1; l <= 3; ++l)
      for (int p = 1; p <= 3; ++p) {
        const TangentVector c =
            translate_tangent(fd.frames, center_tangent_c(k, l, p, fd.spectrum));
        CHECK(pushforward_dphi(w, c).norm() < 1e-10);
      }
}

TEST_CASE("pushforward_dphi: radial vectors map to sqrt(N) lambda^{N-1} rank-one terms") {
  std::mt19937_64 rng(89);
  const int d = 2, n = 3;
  const Network w = oracles::random_balanced(d, n, rng);
  const OrthonormalBasis basis = onb_vectors(w);
  const FrameDecomposition& fd = basis.decomposition;
  for (size_t i = 0; i < basis.vectors.size(); ++i) {
    if (basis.labels[i].kind != BasisLabel::Kind::Radial) continue;
    const int k = basis.labels[i].k;
    const double lam = fd.spectrum.lambda(k - 1);
    const Matrix expected = std::sqrt(double(n)) * std::pow(lam, n - 1) *
                            fd.frames.q[n].col(k - 1) * fd.frames.q[0].col(k - 1).transpose();
    CHECK((pushforward_dphi(w, basis.vectors[i]) - expected).norm() < 1e-10);
  }
}

TEST_CASE("submersion_report: center example and gauge invariance") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 16;
  x(1, 1) = 1;
  const Network center = center_of_fiber(x, 2);
  const SubmersionReport report = submersion_report(center);
  CHECK(report.kernel_max < 1e-9);
  CHECK(report.isometry_max < 1e-9);
  CHECK(report.closed_form_max < 1e-9);

  std::mt19937_64 rng(97);
  const Network moved = gauge_act(random_gauge(2, 2, rng()), center);
  const SubmersionReport moved_report = submersion_report(moved);
  CHECK(moved_report.worst() < 1e-9);
}

TEST_CASE("submersion_report: width 1 has no kernel and unit isometry") {
  Matrix x(1, 1);
  x << 2.0;
  const SubmersionReport report = submersion_report(center_of_fiber(x, 3));
  CHECK(report.kernel_max == 0.0);
  CHECK(report.isometry_max < 1e-12);
  CHECK(report.closed_form_max == 0.0);
}

}  // TEST_SUITE
