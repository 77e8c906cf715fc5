#pragma once

#include "dln/linalg.hpp"

namespace dln {

enum class ApplyDirection { Forward, Inverse };

/// The positive map A_{N,X} behind the depth-N metric on invertible
/// matrices. It is diagonal in the rank-one basis q_{N,k} q_{0,l}^T built
/// from the SVD of the base point; eigen_table()(k,l) holds the eigenvalue
///
///   nu_{k,l} = (sigma_k^2 - sigma_l^2) / (sigma_k^{2/N} - sigma_l^{2/N}),
///
/// with the continuous limit N sigma^{2-2/N} substituted on the diagonal and
/// whenever two singular values coincide below the threshold. Applying the
/// map spectrally keeps it stable near coincident singular values; the
/// literal power-sum form is kept as a test oracle only.
class MetricOperator {
public:
  MetricOperator(const Matrix& x, int depth);
  MetricOperator(SvdTriple svd, int depth);

  int depth() const { return depth_; }
  int dim() const { return svd_.dim(); }
  const SvdTriple& svd() const { return svd_; }
  const Matrix& eigen_table() const { return nu_; }

  /// Forward: sum_p (XX^T)^{(N-p)/N} P (X^T X)^{(p-1)/N}, evaluated
  /// spectrally. Inverse: entrywise division by the eigen table, so that
  /// apply(Inverse) after apply(Forward) is the identity.
  Matrix apply(const Matrix& p, ApplyDirection dir) const;

  /// g^N(z1, z2) = Tr(z1^T A^{-1} z2). Positive definite.
  double metric(const Matrix& z1, const Matrix& z2) const;

private:
  SvdTriple svd_;
  int depth_;
  Matrix nu_;
};

/// Volume density det(Sigma^2)^{(N-1)/(2N)} * van(Sigma^{2/N}) in SVD
/// coordinates (Sigma, Q_0, Q_N).
double volume_density(const Spectrum& spec, int depth);

}  // namespace dln
