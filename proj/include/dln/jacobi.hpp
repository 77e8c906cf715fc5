#pragma once

#include "dln/linalg.hpp"

namespace dln {

enum class JacobiBoundary { Interior, Extended };

/// Symmetric tridiagonal block coupling one gauge plane (k,l) across depth.
/// Interior form: size (N-1), diagonal lambda_k^2 + lambda_l^2, off-diagonal
/// -lambda_k lambda_l; positive definite for lambda_k != lambda_l. Extended
/// form: size (N+1) with the two corner diagonal entries halved; singular at
/// lambda_k = lambda_l (Neumann boundary conditions).
struct JacobiBlock {
  double lambda_k = 0.0;
  double lambda_l = 0.0;
  int depth = 1;
  JacobiBoundary boundary = JacobiBoundary::Interior;
  Matrix entries;  // possibly 0x0 for the interior block at depth 1

  int size() const { return static_cast<int>(entries.rows()); }
};

JacobiBlock jacobi_block(double lambda_k, double lambda_l, int depth, JacobiBoundary boundary);

/// Discrete sine transform that diagonalizes the interior block:
/// s(p,q) = sqrt(2/N) sin(p q pi / N) and
/// sigma_p = lambda_k^2 + lambda_l^2 - 2 lambda_k lambda_l cos(p pi / N),
/// so that S h S^T = diag(sigma_p) with S orthogonal.
struct ChebyshevEigen {
  Matrix s;
  Vector sigma;
};

ChebyshevEigen chebyshev_eigen(const JacobiBlock& block);

/// Closed-form determinant of the interior block,
/// (lambda_k^{2N} - lambda_l^{2N}) / (lambda_k^2 - lambda_l^2),
/// with limit N lambda^{2(N-1)} at coincidence. Empty block (N=1) gives 1.
double block_det(double lambda_k, double lambda_l, int depth);

/// (N+1)x(N+1) congruence diagonalizer of the extended block: rows 0 and N
/// are the normalized geometric sequences lambda_k^q lambda_l^{N-q} and
/// lambda_k^{N-q} lambda_l^q, interior rows are sine rows scaled by
/// 1/sqrt(sigma_p). Satisfies P h~ P^T = I_{N+1}.
struct PMatrix {
  double lambda_k = 0.0;
  double lambda_l = 0.0;
  int depth = 1;
  Matrix entries;
};

PMatrix p_matrix(double lambda_k, double lambda_l, int depth);

}  // namespace dln
