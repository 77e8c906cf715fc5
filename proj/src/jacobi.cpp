#include "dln/jacobi.hpp"

#include <cmath>
#include <numbers>

namespace dln {

namespace {

void require_positive_lambdas(double lk, double ll, const std::string& who) {
  if (!(lk > 0.0) || !(ll > 0.0))
    throw RankDeficient(who + ": lambda values must be strictly positive");
  if (!std::isfinite(lk) || !std::isfinite(ll)) throw NonFinite(who + ": non-finite lambda");
}

bool lambdas_coincide(double lk, double ll) {
  return std::abs(lk - ll) < tol::kCoincidentRel * std::max(lk, ll);
}

}  // namespace

JacobiBlock jacobi_block(double lambda_k, double lambda_l, int depth, JacobiBoundary boundary) {
  require_positive_lambdas(lambda_k, lambda_l, "jacobi_block");
  if (depth < 1) throw UnsupportedDimension("jacobi_block: depth must be >= 1");
  JacobiBlock block;
  block.lambda_k = lambda_k;
  block.lambda_l = lambda_l;
  block.depth = depth;
  block.boundary = boundary;
  const double diag = lambda_k * lambda_k + lambda_l * lambda_l;
  const double off = -lambda_k * lambda_l;
  const int m = boundary == JacobiBoundary::Interior ? depth - 1 : depth + 1;
  block.entries = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    block.entries(i, i) = diag;
    if (i + 1 < m) {
      block.entries(i, i + 1) = off;
      block.entries(i + 1, i) = off;
    }
  }
  if (boundary == JacobiBoundary::Extended && m >= 1) {
    block.entries(0, 0) = 0.5 * diag;
    block.entries(m - 1, m - 1) = 0.5 * diag;
  }
  return block;
}

ChebyshevEigen chebyshev_eigen(const JacobiBlock& block) {
  if (block.boundary != JacobiBoundary::Interior)
    throw ShapeMismatch("chebyshev_eigen: expects the interior block");
  const int n = block.depth;
  const int m = n - 1;
  ChebyshevEigen out;
  out.s = Matrix::Zero(std::max(m, 0), std::max(m, 0));
  out.sigma = Vector::Zero(std::max(m, 0));
  const double norm = std::sqrt(2.0 / n);
  const double pi = std::numbers::pi;
  for (int p = 1; p <= m; ++p) {
    out.sigma(p - 1) = block.lambda_k * block.lambda_k + block.lambda_l * block.lambda_l -
                       2.0 * block.lambda_k * block.lambda_l * std::cos(p * pi / n);
    for (int q = 1; q <= m; ++q) out.s(p - 1, q - 1) = norm * std::sin(p * q * pi / n);
  }
  return out;
}

double block_det(double lambda_k, double lambda_l, int depth) {
  require_positive_lambdas(lambda_k, lambda_l, "block_det");
  if (depth < 1) throw UnsupportedDimension("block_det: depth must be >= 1");
  if (lambdas_coincide(lambda_k, lambda_l)) {
    const double lam = 0.5 * (lambda_k + lambda_l);
    return depth * std::pow(lam, 2.0 * (depth - 1));
  }
  return (std::pow(lambda_k, 2.0 * depth) - std::pow(lambda_l, 2.0 * depth)) /
         (lambda_k * lambda_k - lambda_l * lambda_l);
}

PMatrix p_matrix(double lambda_k, double lambda_l, int depth) {
  require_positive_lambdas(lambda_k, lambda_l, "p_matrix");
  if (depth < 1) throw UnsupportedDimension("p_matrix: depth must be >= 1");
  if (lambdas_coincide(lambda_k, lambda_l))
    throw CoincidentSingularValues(
        "p_matrix: extended block is singular at lambda_k = lambda_l");
  const int n = depth;
  const double lk = lambda_k, ll = lambda_l;
  PMatrix p;
  p.lambda_k = lk;
  p.lambda_l = ll;
  p.depth = n;
  p.entries = Matrix::Zero(n + 1, n + 1);

  // Boundary norms sigma_0 = sigma_N = (ll^2 - lk^2)(ll^{2N} - lk^{2N}) / 2.
  const double sigma_end =
      0.5 * (ll * ll - lk * lk) * (std::pow(ll, 2.0 * n) - std::pow(lk, 2.0 * n));
  const double inv_end = 1.0 / std::sqrt(sigma_end);
  for (int q = 0; q <= n; ++q) {
    p.entries(0, q) = inv_end * std::pow(lk, q) * std::pow(ll, n - q);
    p.entries(n, q) = inv_end * std::pow(lk, n - q) * std::pow(ll, q);
  }

  const double pi = std::numbers::pi;
  const double norm = std::sqrt(2.0 / n);
  for (int row = 1; row <= n - 1; ++row) {
    const double sigma_p =
        lk * lk + ll * ll - 2.0 * lk * ll * std::cos(row * pi / n);
    const double inv = 1.0 / std::sqrt(sigma_p);
    for (int q = 1; q <= n - 1; ++q)
      p.entries(row, q) = inv * norm * std::sin(row * q * pi / n);
  }
  return p;
}

}  // namespace dln
