#include "dln/entropy.hpp"

#include <cmath>
#include <numbers>

#include "dln/basis.hpp"

namespace dln {

namespace {

constexpr double kPi = std::numbers::pi;

/// (sigma_i^2 - sigma_j^2)/(sigma_i^{2/N} - sigma_j^{2/N}), with the limit
/// N sigma^{2-2/N} below the coincidence threshold.
double pair_ratio(double si, double sj, int depth, double tau) {
  if (std::abs(si - sj) < tau) {
    const double s = 0.5 * (si + sj);
    return depth * std::pow(s, 2.0 - 2.0 / depth);
  }
  return (si * si - sj * sj) / (std::pow(si, 2.0 / depth) - std::pow(sj, 2.0 / depth));
}

Matrix rot2(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

double haar_volume_od(int dim, HaarConvention convention) {
  if (dim < 1) throw UnsupportedDimension("haar_volume_od: dim must be >= 1");
  const double two_exp = convention == HaarConvention::Ponting ? dim * (dim + 3) / 2.0
                                                               : dim * (dim + 3) / 4.0;
  double logv = two_exp * std::log(2.0);
  for (int r = 1; r <= dim; ++r) logv += 0.5 * r * std::log(kPi) - std::lgamma(0.5 * r);
  return std::exp(logv);
}

EntropyValue entropy(const Spectrum& spec, int depth, HaarConvention convention) {
  if (depth < 1) throw UnsupportedDimension("entropy: depth must be >= 1");
  if (spec.depth != depth)
    throw ShapeMismatch("entropy: spectrum cached for depth " + std::to_string(spec.depth) +
                        ", called with depth " + std::to_string(depth));
  spec.require_full_rank("entropy");
  const double tau = spec.coincidence_threshold();
  EntropyValue value;
  value.convention = convention;
  value.constant_part = (depth - 1) * std::log(haar_volume_od(spec.dim(), convention));
  value.ratio_part = 0.0;
  for (int i = 0; i < spec.dim(); ++i)
    for (int j = i + 1; j < spec.dim(); ++j)
      value.ratio_part += 0.5 * std::log(pair_ratio(spec.sigma(i), spec.sigma(j), depth, tau));
  value.total = value.constant_part + value.ratio_part;
  return value;
}

double entropy_infinite(const Spectrum& spec) {
  spec.require_full_rank("entropy_infinite");
  const double tau = spec.coincidence_threshold();
  double acc = 0.0;
  for (int i = 0; i < spec.dim(); ++i) {
    for (int j = i + 1; j < spec.dim(); ++j) {
      const double si = spec.sigma(i), sj = spec.sigma(j);
      double ratio;
      if (std::abs(si - sj) < tau) {
        const double s = 0.5 * (si + sj);
        ratio = s * s;  // limit of (si^2 - sj^2)/(log si^2 - log sj^2)
      } else {
        ratio = (si * si - sj * sj) / (std::log(si * si) - std::log(sj * sj));
      }
      acc += 0.5 * std::log(ratio);
    }
  }
  return acc;
}

Matrix entropy_gradient(const Spectrum& spec, int depth, const SvdTriple& svd) {
  if (depth < 1) throw UnsupportedDimension("entropy_gradient: depth must be >= 1");
  if (spec.depth != depth)
    throw ShapeMismatch("entropy_gradient: spectrum/depth mismatch");
  spec.require_full_rank("entropy_gradient");
  spec.require_distinct("entropy_gradient");
  if (svd.dim() != spec.dim()) throw ShapeMismatch("entropy_gradient: svd/spectrum mismatch");
  const int d = spec.dim();
  Vector grad = Vector::Zero(d);
  for (int k = 0; k < d; ++k) {
    const double sk = spec.sigma(k);
    for (int j = 0; j < d; ++j) {
      if (j == k) continue;
      const double sj = spec.sigma(j);
      grad(k) += 0.5 * (2.0 * sk / (sk * sk - sj * sj) -
                        (2.0 / depth) * std::pow(sk, 2.0 / depth - 1.0) /
                            (std::pow(sk, 2.0 / depth) - std::pow(sj, 2.0 / depth)));
    }
  }
  return svd.q_left * grad.asDiagonal() * svd.q_right.transpose();
}

double orbit_volume_formula(const Spectrum& spec, int depth, HaarConvention convention) {
  const EntropyValue value = entropy(spec, depth, convention);
  return std::exp(value.total);
}

double orbit_volume_numeric(const Matrix& x, int depth, int grid) {
  require_square_finite(x, "orbit_volume_numeric");
  if (x.rows() != 2)
    throw UnsupportedDimension("orbit_volume_numeric: oracle implemented for width 2 only");
  if (depth != 2 && depth != 3)
    throw UnsupportedDimension("orbit_volume_numeric: oracle implemented for depth 2 and 3");
  if (grid < 2) throw UnsupportedDimension("orbit_volume_numeric: grid must be >= 2");

  const Network center = center_of_fiber(x, depth);
  const Matrix reflect = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  const Matrix j = (Matrix(2, 2) << 0, -1, 1, 0).finished();  // d/dtheta of rot2 at 0
  const double h = 2.0 * kPi / grid;

  if (depth == 2) {
    // One gauge angle; O_2 has two components. Trapezoid rule on the
    // Frobenius arc length of theta -> (W_2 Q_1^T, Q_1 W_1).
    double total = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
      const Matrix f = comp == 0 ? Matrix::Identity(2, 2) : reflect;
      double acc = 0.0;
      for (int i = 0; i <= grid; ++i) {
        const double theta = i * h;
        const Matrix q1 = rot2(theta) * f;
        const Matrix dq1 = j * q1;
        const double speed2 = (center.layer(2) * dq1.transpose()).squaredNorm() +
                              (dq1 * center.layer(1)).squaredNorm();
        const double weight = (i == 0 || i == grid) ? 0.5 : 1.0;
        acc += weight * std::sqrt(speed2);
      }
      total += acc * h;
    }
    return total;
  }

  // depth == 3: two gauge angles, four components; integrate the area form
  // sqrt(det Gram) over the torus.
  double total = 0.0;
  for (int comp2 = 0; comp2 < 2; ++comp2) {
    for (int comp1 = 0; comp1 < 2; ++comp1) {
      const Matrix f2 = comp2 == 0 ? Matrix::Identity(2, 2) : reflect;
      const Matrix f1 = comp1 == 0 ? Matrix::Identity(2, 2) : reflect;
      double acc = 0.0;
      for (int i2 = 0; i2 <= grid; ++i2) {
        const Matrix q2 = rot2(i2 * h) * f2;
        const Matrix dq2 = j * q2;
        const Matrix l3 = center.layer(3) * q2.transpose();
        const Matrix dl3 = center.layer(3) * dq2.transpose();
        const double w2 = (i2 == 0 || i2 == grid) ? 0.5 : 1.0;
        for (int i1 = 0; i1 <= grid; ++i1) {
          const Matrix q1 = rot2(i1 * h) * f1;
          const Matrix dq1 = j * q1;
          // layers: (l3, q2 L q1^T, q1 l1) with L = center.layer(2)
          const Matrix l2 = q2 * center.layer(2) * q1.transpose();
          const Matrix d2_l2 = dq2 * center.layer(2) * q1.transpose();
          const Matrix d1_l2 = q2 * center.layer(2) * dq1.transpose();
          const Matrix d1_l1 = dq1 * center.layer(1);
          const double g22 = dl3.squaredNorm() + d2_l2.squaredNorm();
          const double g11 = d1_l2.squaredNorm() + d1_l1.squaredNorm();
          const double g12 = d2_l2.cwiseProduct(d1_l2).sum();
          const double w1 = (i1 == 0 || i1 == grid) ? 0.5 : 1.0;
          acc += w1 * w2 * std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
        }
      }
      total += acc * h * h;
    }
  }
  return total;
}

Matrix gram_orbit(const Network& w, double balance_tol) {
  const FrameDecomposition fd = recover_frames(w, balance_tol);
  const int n = w.depth();
  const int d = w.width();
  const int pairs = d * (d - 1) / 2;
  const int m = pairs * std::max(0, n - 1);
  if (m == 0) return Matrix::Zero(0, 0);

  std::vector<TangentVector> generators;
  generators.reserve(m);
  for (int k = 1; k <= d; ++k)
    for (int l = k + 1; l <= d; ++l)
      for (int p = 1; p <= n - 1; ++p)
        generators.push_back(translate_tangent(fd.frames, center_tangent_c(k, l, p, fd.spectrum)));

  Matrix gram(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      gram(a, b) = frobenius_ip(generators[a], generators[b]);
      gram(b, a) = gram(a, b);
    }
  return gram;
}

}  // namespace dln
