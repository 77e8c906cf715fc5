#include "dln/network.hpp"

#include <cmath>

namespace dln {

namespace {

void require_layer_shapes(const std::vector<Matrix>& layers, const std::string& who) {
  if (layers.empty()) throw ShapeMismatch(who + ": a network needs at least one layer");
  const auto d = layers.front().rows();
  for (const Matrix& m : layers) {
    require_square_finite(m, who);
    if (m.rows() != d) throw ShapeMismatch(who + ": layers have mixed widths");
  }
}

void require_orthogonal(const Matrix& q, const std::string& who) {
  require_square_finite(q, who);
  const double dev = (q.transpose() * q - Matrix::Identity(q.rows(), q.cols())).norm();
  if (dev > 1e-8)
    throw ShapeMismatch(who + ": factor is not orthogonal (deviation " + std::to_string(dev) + ")");
}

}  // namespace

Network::Network(std::vector<Matrix> layers_ascending) : layers_(std::move(layers_ascending)) {
  require_layer_shapes(layers_, "Network");
}

const Matrix& Network::layer(int p) const {
  if (p < 1 || p > depth()) throw IndexError("Network::layer: p out of range");
  return layers_[p - 1];
}

Matrix& Network::layer(int p) {
  if (p < 1 || p > depth()) throw IndexError("Network::layer: p out of range");
  return layers_[p - 1];
}

TangentVector TangentVector::zeros(int depth, int width) {
  TangentVector t;
  t.slots.assign(depth, Matrix::Zero(width, width));
  return t;
}

double TangentVector::norm() const { return std::sqrt(frobenius_ip(*this, *this)); }

double frobenius_ip(const TangentVector& v, const TangentVector& w) {
  if (v.depth() != w.depth())
    throw ShapeMismatch("frobenius_ip: tangent vectors have different depths");
  double acc = 0.0;
  for (int p = 0; p < v.depth(); ++p) {
    if (v.slots[p].rows() != w.slots[p].rows() || v.slots[p].cols() != w.slots[p].cols())
      throw ShapeMismatch("frobenius_ip: slot shapes differ at depth " + std::to_string(p + 1));
    acc += v.slots[p].cwiseProduct(w.slots[p]).sum();
  }
  return acc;
}

Network assemble_network(const Spectrum& spec, const FrameTuple& frames) {
  const int n = spec.depth;
  const int d = spec.dim();
  if (frames.depth() != n)
    throw ShapeMismatch("assemble_network: frame tuple has " +
                        std::to_string(frames.q.size()) + " factors, expected depth+1");
  for (int k = 0; k < d; ++k)
    if (spec.lambda(k) <= 0.0)
      throw RankDeficient("assemble_network: lambda_" + std::to_string(k + 1) +
                          " is not strictly positive");
  for (const Matrix& q : frames.q) {
    require_orthogonal(q, "assemble_network");
    if (q.rows() != d) throw ShapeMismatch("assemble_network: frame width mismatch");
  }
  std::vector<Matrix> layers(n);
  for (int p = 1; p <= n; ++p)
    layers[p - 1] = frames.q[p] * spec.lambda.asDiagonal() * frames.q[p - 1].transpose();
  return Network(std::move(layers));
}

Matrix end_to_end(const Network& w) {
  Matrix x = w.layer(1);
  for (int p = 2; p <= w.depth(); ++p) x = w.layer(p) * x;
  return x;
}

BalanceReport balance_residual(const Network& w) {
  const int n = w.depth();
  BalanceReport report;
  report.residuals = Vector::Zero(std::max(0, n - 1));
  report.max_residual = 0.0;
  for (int p = 1; p <= n - 1; ++p) {
    const Matrix diff = w.layer(p + 1).transpose() * w.layer(p + 1) -
                        w.layer(p) * w.layer(p).transpose();
    report.residuals(p - 1) = diff.norm();
    report.max_residual = std::max(report.max_residual, report.residuals(p - 1));
  }
  return report;
}

ChargeTuple g_charges(const Network& w) {
  ChargeTuple g;
  g.charges.reserve(std::max(0, w.depth() - 1));
  for (int p = 1; p <= w.depth() - 1; ++p)
    g.charges.push_back(w.layer(p + 1).transpose() * w.layer(p + 1) -
                        w.layer(p) * w.layer(p).transpose());
  return g;
}

Network center_of_fiber(const Matrix& x, int depth) {
  require_square_finite(x, "center_of_fiber");
  if (depth < 1) throw UnsupportedDimension("center_of_fiber: depth must be >= 1");
  if (depth == 1) return Network({x});
  const SvdTriple svd = svd_descending(x);
  const Spectrum spec = svd.spectrum(depth);
  spec.require_full_rank("center_of_fiber");
  std::vector<Matrix> layers(depth);
  const Matrix lam = spec.lambda.asDiagonal();
  layers[0] = lam * svd.q_right.transpose();
  for (int p = 2; p < depth; ++p) layers[p - 1] = lam;
  layers[depth - 1] = svd.q_left * lam;
  return Network(std::move(layers));
}

Network gauge_act(const GaugeElement& g, const Network& w) {
  const int n = w.depth();
  const int d = w.width();
  if (g.depth() != n) throw ShapeMismatch("gauge_act: gauge element depth mismatch");
  std::vector<Matrix> layers(n);
  for (int p = 1; p <= n; ++p) {
    Matrix m = w.layer(p);
    if (p <= n - 1) {
      if (g.rotation(p).rows() != d) throw ShapeMismatch("gauge_act: rotation width mismatch");
      m = g.rotation(p) * m;
    }
    if (p >= 2) m = m * g.rotation(p - 1).transpose();
    layers[p - 1] = std::move(m);
  }
  return Network(std::move(layers));
}

Network full_orthogonal_act(const FrameTuple& frames, const Network& w) {
  const int n = w.depth();
  const int d = w.width();
  if (frames.depth() != n) throw ShapeMismatch("full_orthogonal_act: frame tuple depth mismatch");
  for (const Matrix& q : frames.q)
    if (q.rows() != d || q.cols() != d)
      throw ShapeMismatch("full_orthogonal_act: frame width mismatch");
  std::vector<Matrix> layers(n);
  for (int p = 1; p <= n; ++p)
    layers[p - 1] = frames.q[p] * w.layer(p) * frames.q[p - 1].transpose();
  return Network(std::move(layers));
}

GaugeElement random_gauge(int depth, int width, std::uint64_t seed) {
  if (depth < 1) throw UnsupportedDimension("random_gauge: depth must be >= 1");
  std::mt19937_64 rng(seed);
  GaugeElement g;
  g.rotations.reserve(depth - 1);
  for (int p = 1; p <= depth - 1; ++p) g.rotations.push_back(haar_orthogonal(width, rng));
  return g;
}

FrameTuple random_frames(int depth, int width, std::uint64_t seed) {
  if (depth < 1) throw UnsupportedDimension("random_frames: depth must be >= 1");
  std::mt19937_64 rng(seed);
  FrameTuple f;
  f.q.reserve(depth + 1);
  for (int s = 0; s <= depth; ++s) f.q.push_back(haar_orthogonal(width, rng));
  return f;
}

}  // namespace dln
