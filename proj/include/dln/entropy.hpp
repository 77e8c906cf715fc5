#pragma once

#include "dln/linalg.hpp"
#include "dln/network.hpp"

namespace dln {

/// Normalization of the orthogonal-group volume constant c_d.
///  - Embedded: volume of O_d under the metric inherited from the Frobenius
///    embedding in d x d matrices (d=2 value: 4 sqrt(2) pi). Default, and the
///    one matched by the numeric orbit-volume oracle.
///  - Ponting: 2^{d(d+3)/2} prod_{r=1}^d pi^{r/2} / Gamma(r/2).
enum class HaarConvention { Embedded, Ponting };

double haar_volume_od(int dim, HaarConvention convention);

/// Boltzmann entropy of the gauge orbit over a full-rank observable, in nats:
/// total = (N-1) log c_d + (1/2) log( van(Sigma^2) / van(Sigma^{2/N}) ).
struct EntropyValue {
  double total = 0.0;
  double constant_part = 0.0;
  double ratio_part = 0.0;
  HaarConvention convention = HaarConvention::Embedded;
};

/// Pairs with |sigma_i - sigma_j| below the coincidence threshold use the
/// L'Hospital limit N sigma^{2-2/N} for the ratio factor.
EntropyValue entropy(const Spectrum& spec, int depth, HaarConvention convention);

/// Renormalized infinite-depth entropy
/// (1/2) log( van(Sigma^2) / van(log Sigma^2) ),
/// with the pairwise limit sigma_i^2 substituted at coincidence.
double entropy_infinite(const Spectrum& spec);

/// dS as a matrix: Q_N diag(dS/dsigma_k) Q_0^T with
/// dS/dsigma_k = (1/2) sum_{j != k} [ 2 sigma_k / (sigma_k^2 - sigma_j^2)
///   - (2/N) sigma_k^{2/N-1} / (sigma_k^{2/N} - sigma_j^{2/N}) ].
/// Requires pairwise-distinct singular values.
Matrix entropy_gradient(const Spectrum& spec, int depth, const SvdTriple& svd);

/// Closed-form orbit volume c_d^{N-1} sqrt( van(Sigma^2)/van(Sigma^{2/N}) ).
double orbit_volume_formula(const Spectrum& spec, int depth, HaarConvention convention);

/// Brute-force orbit volume for width 2 and depth 2 or 3, by trapezoid
/// integration of the embedded arc length / surface area of the gauge orbit
/// through the center. Independent of the closed forms above.
double orbit_volume_numeric(const Matrix& x, int depth, int grid);

/// Gram matrix of the pushed-forward gauge generators at a balanced point,
/// computed by plain trace sums. Rows/columns are grouped by the pair (k,l)
/// in lexicographic order, depth index p = 1..N-1 within each group; the
/// result is block tridiagonal with diagonal lambda_k^2 + lambda_l^2 and
/// off-diagonal -lambda_k lambda_l.
Matrix gram_orbit(const Network& w, double balance_tol = tol::kBalance);

}  // namespace dln
