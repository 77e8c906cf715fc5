#include "dln/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace dln {

Spectrum Spectrum::from_sigma(Vector sigma, int depth) {
  if (depth < 1) throw UnsupportedDimension("Spectrum: depth must be >= 1");
  if (sigma.size() < 1) throw UnsupportedDimension("Spectrum: empty singular value list");
  if (!sigma.allFinite()) throw NonFinite("Spectrum: non-finite singular value");
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) < 0.0)
      throw RankDeficient("Spectrum: negative singular value " + std::to_string(sigma(i)));
  std::sort(sigma.data(), sigma.data() + sigma.size(), std::greater<double>());
  Spectrum s;
  s.sigma = sigma;
  s.depth = depth;
  s.lambda = sigma.array().pow(1.0 / depth);
  return s;
}

Spectrum Spectrum::from_lambda(Vector lambda, int depth) {
  if (depth < 1) throw UnsupportedDimension("Spectrum: depth must be >= 1");
  Vector sigma = lambda.array().pow(double(depth));
  Spectrum s = from_sigma(sigma, depth);
  return s;
}

bool Spectrum::has_distinct_sigma() const {
  const double tau = coincidence_threshold();
  for (int i = 0; i + 1 < sigma.size(); ++i)
    if (sigma(i) - sigma(i + 1) < tau) return false;
  return true;
}

void Spectrum::require_full_rank(const std::string& who) const {
  const int d = dim();
  if (sigma(0) <= 0.0 || sigma(d - 1) <= tol::kRankRel * sigma(0))
    throw RankDeficient(who + ": smallest singular value " + std::to_string(sigma(d - 1)) +
                        " below rank threshold");
}

void Spectrum::require_distinct(const std::string& who) const {
  if (!has_distinct_sigma())
    throw CoincidentSingularValues(who + ": singular values coincide below threshold");
}

SvdTriple svd_descending(const Matrix& x) {
  require_square_finite(x, "svd_descending");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = svd.matrixU();
  Matrix v = svd.matrixV();
  Vector s = svd.singularValues();  // already decreasing
  const int d = static_cast<int>(s.size());
  for (int k = 0; k < d; ++k) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < d; ++i) {
      const double a = std::abs(u(i, k));
      if (a > best) {  // strict comparison keeps the lowest row on ties
        best = a;
        arg = i;
      }
    }
    if (u(arg, k) < 0.0) {
      u.col(k) *= -1.0;
      v.col(k) *= -1.0;
    }
  }
  return SvdTriple{u, s, v};
}

Matrix haar_orthogonal(int dim, std::mt19937_64& rng) {
  if (dim < 1) throw UnsupportedDimension("haar_orthogonal: dim must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Matrix haar_orthogonal(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_orthogonal(dim, rng);
}

double vandermonde(const Vector& vals) {
  const int n = static_cast<int>(vals.size());
  double prod = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) prod *= vals(j) - vals(i);
  return prod;
}

Matrix skew_basis_element(int k, int l, int dim) {
  if (!(1 <= k && k < l && l <= dim))
    throw IndexError("skew_basis_element: need 1 <= k < l <= dim, got k=" + std::to_string(k) +
                     ", l=" + std::to_string(l) + ", dim=" + std::to_string(dim));
  Matrix a = Matrix::Zero(dim, dim);
  const double c = 1.0 / std::sqrt(2.0);
  a(k - 1, l - 1) = c;
  a(l - 1, k - 1) = -c;
  return a;
}

}  // namespace dln
