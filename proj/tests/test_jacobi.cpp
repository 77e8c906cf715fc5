#include <cmath>

#include "doctest.h"
#include "dln/jacobi.hpp"
#include "oracles.hpp"

using namespace dln;

TEST_SUITE("jacobi") {

TEST_CASE("jacobi_block: interior entries") {
  const JacobiBlock block = jacobi_block(2.0, 1.0, 3, JacobiBoundary::Interior);
  Matrix expected(2, 2);
  expected << 5, -2, -2, 5;
  CHECK((block.entries - expected).norm() == 0.0);

  const JacobiBlock single = jacobi_block(1.7, 0.4, 2, JacobiBoundary::Interior);
  CHECK(single.size() == 1);
  CHECK(single.entries(0, 0) == doctest::Approx(1.7 * 1.7 + 0.4 * 0.4));

  CHECK(jacobi_block(1.0, 2.0, 1, JacobiBoundary::Interior).size() == 0);
}

TEST_CASE("jacobi_block: extended entries and the singular equal-lambda case") {
  const JacobiBlock block = jacobi_block(2.0, 1.0, 2, JacobiBoundary::Extended);
  Matrix expected(3, 3);
  expected << 2.5, -2, 0, -2, 5, -2, 0, -2, 2.5;
  CHECK((block.entries - expected).norm() == 0.0);

  // lambda_k = lambda_l: Neumann matrix, (1,...,1) in the nullspace
  const JacobiBlock neumann = jacobi_block(1.0, 1.0, 5, JacobiBoundary::Extended);
  const Vector ones = Vector::Ones(neumann.size());
  CHECK((neumann.entries * ones).norm() < 1e-14);
  CHECK(std::abs(oracles::lu_determinant(neumann.entries)) < 1e-12);
}

TEST_CASE("jacobi_block: interior block is positive definite for distinct lambdas") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double lk = uni(rng), ll = uni(rng);
    if (std::abs(lk - ll) < 1e-3) continue;
    const JacobiBlock block = jacobi_block(lk, ll, 2 + int(rng() % 10), JacobiBoundary::Interior);
    if (block.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(block.entries);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("chebyshev_eigen: anchored eigenvalues and determinant") {
  const JacobiBlock block = jacobi_block(2.0, 1.0, 3, JacobiBoundary::Interior);
  const ChebyshevEigen eig = chebyshev_eigen(block);
  CHECK(eig.sigma(0) == doctest::Approx(3.0));  // 5 - 4 cos(pi/3)
  CHECK(eig.sigma(1) == doctest::Approx(7.0));  // 5 - 4 cos(2 pi/3)
  CHECK(eig.sigma(0) * eig.sigma(1) == doctest::Approx(21.0));
  CHECK(eig.sigma.prod() == doctest::Approx(oracles::lu_determinant(block.entries)));
}

TEST_CASE("chebyshev_eigen: 1x1 block at depth 2") {
  const JacobiBlock block = jacobi_block(1.0, 1.0, 2, JacobiBoundary::Interior);
  const ChebyshevEigen eig = chebyshev_eigen(block);
  CHECK(eig.sigma(0) == doctest::Approx(2.0));  // 2 - 2 cos(pi/2)
  CHECK(eig.s(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("chebyshev_eigen: orthogonality and congruence up to depth 64") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.3, 2.0);
  for (int n : {2, 3, 5, 8, 16, 33, 64}) {
    const double lk = uni(rng), ll = uni(rng);
    const JacobiBlock block = jacobi_block(lk, ll, n, JacobiBoundary::Interior);
    const ChebyshevEigen eig = chebyshev_eigen(block);
    const int m = n - 1;
    CHECK((eig.s * eig.s.transpose() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-10);
    const Matrix diag = eig.s * block.entries * eig.s.transpose();
    CHECK((diag - Matrix(eig.sigma.asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("block_det: anchored value, limit branch, depth 1") {
  CHECK(block_det(2.0, 1.0, 3) == doctest::Approx(21.0));
  const JacobiBlock block = jacobi_block(2.0, 1.0, 3, JacobiBoundary::Interior);
  CHECK(block_det(2.0, 1.0, 3) == doctest::Approx(oracles::lu_determinant(block.entries)));

  for (int n : {1, 2, 5}) {
    const double lam = 1.3;
    CHECK(block_det(lam, lam, n) == doctest::Approx(n * std::pow(lam, 2.0 * (n - 1))));
  }
  CHECK(block_det(0.9, 1.7, 1) == doctest::Approx(1.0));
}

TEST_CASE("eigenvalue product equals the closed-form determinant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.2, 3.0);
  for (int n = 2; n <= 16; ++n) {
    const double lk = uni(rng), ll = uni(rng);
    const ChebyshevEigen eig =
        chebyshev_eigen(jacobi_block(lk, ll, n, JacobiBoundary::Interior));
    const double closed = block_det(lk, ll, n);
    CHECK(std::abs(eig.sigma.prod() - closed) / closed < 1e-9);
  }
}

TEST_CASE("block_det matches the LU determinant on random pairs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.1, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double lk = uni(rng), ll = uni(rng);
    const int n = 2 + int(rng() % 11);
    const double closed = block_det(lk, ll, n);
    const double lu =
        oracles::lu_determinant(jacobi_block(lk, ll, n, JacobiBoundary::Interior).entries);
    CHECK(std::abs(closed - lu) / std::abs(closed) < 1e-9);
  }
}

TEST_CASE("p_matrix: anchored rows and the geometric eigen-relation") {
  const PMatrix p = p_matrix(2.0, 1.0, 2);
  const double s0 = 22.5;  // (1-4)(1-16)/2
  CHECK(p.entries(0, 0) == doctest::Approx(1.0 / std::sqrt(s0)));
  CHECK(p.entries(0, 1) == doctest::Approx(2.0 / std::sqrt(s0)));
  CHECK(p.entries(0, 2) == doctest::Approx(4.0 / std::sqrt(s0)));

  // h~ a = (ll^2-lk^2)/2 * (a_0, 0, ..., 0, -a_N) for a_q = lk^q ll^{N-q}
  const JacobiBlock ext = jacobi_block(2.0, 1.0, 2, JacobiBoundary::Extended);
  Vector a(3);
  a << 1, 2, 4;
  const Vector ha = ext.entries * a;
  CHECK(ha(0) == doctest::Approx(-1.5));
  CHECK(ha(1) == doctest::Approx(0.0));
  CHECK(ha(2) == doctest::Approx(6.0));

  Vector b(3);
  b << 4, 2, 1;
  CHECK(std::abs(b.dot(ha)) < 1e-12);  // telescoping a_0 b_0 - a_N b_N = 0
}

TEST_CASE("p_matrix: congruence identity P h~ P^T = I") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.3, 2.2);
  for (int trial = 0; trial < 25; ++trial) {
    const double lk = uni(rng), ll = uni(rng);
    if (std::abs(lk - ll) < 0.05) continue;
    const int n = 1 + int(rng() % 16);
    const PMatrix p = p_matrix(lk, ll, n);
    const JacobiBlock ext = jacobi_block(lk, ll, n, JacobiBoundary::Extended);
    const Matrix prod = p.entries * ext.entries * p.entries.transpose();
    CHECK((prod - Matrix::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("p_matrix rejects coincident lambdas") {
  CHECK_THROWS_AS(p_matrix(1.0, 1.0, 4), CoincidentSingularValues);
}

}  // TEST_SUITE
