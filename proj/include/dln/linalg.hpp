#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "dln/errors.hpp"

namespace dln {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tol {
// Singular values closer than kCoincidentRel * sigma_1 are treated as equal
// and all spectral formulas switch to their L'Hospital limit branch.
inline constexpr double kCoincidentRel = 1e-8;
// A matrix with sigma_d <= kRankRel * sigma_1 is treated as rank deficient.
inline constexpr double kRankRel = 1e-10;
// Default acceptance threshold on the max balance residual.
inline constexpr double kBalance = 1e-8;
}  // namespace tol

/// Singular values in decreasing order together with their cached depth
/// roots lambda_k = sigma_k^{1/N}.
struct Spectrum {
  Vector sigma;
  Vector lambda;
  int depth = 1;

  static Spectrum from_sigma(Vector sigma, int depth);
  static Spectrum from_lambda(Vector lambda, int depth);

  int dim() const { return static_cast<int>(sigma.size()); }
  double coincidence_threshold() const { return tol::kCoincidentRel * sigma(0); }
  bool has_distinct_sigma() const;
  // Throws RankDeficient unless sigma_d > kRankRel * sigma_1.
  void require_full_rank(const std::string& who) const;
  // Throws CoincidentSingularValues unless all gaps exceed the threshold.
  void require_distinct(const std::string& who) const;
};

/// X = q_left * diag(sigma) * q_right^T with singular values in decreasing
/// order. Sign convention: the largest-magnitude entry of each left singular
/// vector is positive, ties broken by the lowest row index. This makes the
/// factorization deterministic for a fixed input.
struct SvdTriple {
  Matrix q_left;
  Vector sigma;
  Matrix q_right;

  Matrix reconstruct() const { return q_left * sigma.asDiagonal() * q_right.transpose(); }
  Spectrum spectrum(int depth) const { return Spectrum::from_sigma(sigma, depth); }
  int dim() const { return static_cast<int>(sigma.size()); }
};

SvdTriple svd_descending(const Matrix& x);

/// Haar-distributed sample from O_d: Gaussian matrix, orthogonal-triangular
/// factorization, columns rescaled by the sign of the triangular diagonal.
Matrix haar_orthogonal(int dim, std::uint64_t seed);
Matrix haar_orthogonal(int dim, std::mt19937_64& rng);

/// prod_{i<j} (vals[j] - vals[i]); 1 for fewer than two entries.
double vandermonde(const Vector& vals);

/// alpha^{k,l} = (e_k e_l^T - e_l e_k^T)/sqrt(2), 1-based indices k < l.
/// Unit Frobenius norm, antisymmetric.
Matrix skew_basis_element(int k, int l, int dim);

inline void require_square_finite(const Matrix& m, const std::string& who) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ShapeMismatch(who + ": expected a nonempty square matrix, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (!m.allFinite()) throw NonFinite(who + ": matrix contains NaN/Inf");
}

}  // namespace dln
