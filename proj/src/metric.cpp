#include "dln/metric.hpp"

#include <cmath>

namespace dln {

namespace {

Matrix eigen_table_for(const Vector& sigma, int depth) {
  const int d = static_cast<int>(sigma.size());
  const double tau = tol::kCoincidentRel * sigma(0);
  Matrix nu(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const double gap = std::abs(sigma(k) - sigma(l));
      if (gap < tau) {
        const double s = 0.5 * (sigma(k) + sigma(l));
        nu(k, l) = depth * std::pow(s, 2.0 - 2.0 / depth);
      } else {
        nu(k, l) = (sigma(k) * sigma(k) - sigma(l) * sigma(l)) /
                   (std::pow(sigma(k), 2.0 / depth) - std::pow(sigma(l), 2.0 / depth));
      }
    }
  }
  return nu;
}

}  // namespace

MetricOperator::MetricOperator(SvdTriple svd, int depth) : svd_(std::move(svd)), depth_(depth) {
  if (depth_ < 1) throw UnsupportedDimension("MetricOperator: depth must be >= 1");
  svd_.spectrum(depth_).require_full_rank("MetricOperator");
  nu_ = eigen_table_for(svd_.sigma, depth_);
}

MetricOperator::MetricOperator(const Matrix& x, int depth)
    : MetricOperator(svd_descending(x), depth) {}

Matrix MetricOperator::apply(const Matrix& p, ApplyDirection dir) const {
  if (p.rows() != dim() || p.cols() != dim())
    throw ShapeMismatch("MetricOperator::apply: operand shape mismatch");
  Matrix m = svd_.q_left.transpose() * p * svd_.q_right;
  if (dir == ApplyDirection::Forward)
    m = m.cwiseProduct(nu_);
  else
    m = m.cwiseQuotient(nu_);
  return svd_.q_left * m * svd_.q_right.transpose();
}

double MetricOperator::metric(const Matrix& z1, const Matrix& z2) const {
  if (z1.rows() != dim() || z1.cols() != dim() || z2.rows() != dim() || z2.cols() != dim())
    throw ShapeMismatch("MetricOperator::metric: operand shape mismatch");
  const Matrix m1 = svd_.q_left.transpose() * z1 * svd_.q_right;
  const Matrix m2 = svd_.q_left.transpose() * z2 * svd_.q_right;
  return m1.cwiseProduct(m2).cwiseQuotient(nu_).sum();
}

double volume_density(const Spectrum& spec, int depth) {
  if (depth < 1) throw UnsupportedDimension("volume_density: depth must be >= 1");
  if (spec.depth != depth)
    throw ShapeMismatch("volume_density: spectrum/depth mismatch");
  spec.require_full_rank("volume_density");
  double logdet = 0.0;
  for (int k = 0; k < spec.dim(); ++k) logdet += std::log(spec.sigma(k));
  const double det_part = std::exp(logdet * (double(depth) - 1.0) / depth);
  const Vector powers = spec.sigma.array().pow(2.0 / depth);
  return det_part * vandermonde(powers);
}

}  // namespace dln
