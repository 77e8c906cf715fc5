#pragma once

#include <cstdint>
#include <vector>

#include "dln/linalg.hpp"

namespace dln {

/// A deep linear network (W_N,...,W_1) of square layers. Layers are stored
/// with the depth index p ascending, so layer(1) = W_1 is applied first and
/// layer(N) = W_N last.
class Network {
public:
  Network() = default;
  explicit Network(std::vector<Matrix> layers_ascending);

  int depth() const { return static_cast<int>(layers_.size()); }
  int width() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().rows()); }

  const Matrix& layer(int p) const;
  Matrix& layer(int p);
  const std::vector<Matrix>& layers() const { return layers_; }
  std::vector<Matrix>& layers() { return layers_; }

private:
  std::vector<Matrix> layers_;
};

/// Element of the tangent space at a Network. slot(p) pairs with layer(p).
struct TangentVector {
  std::vector<Matrix> slots;

  static TangentVector zeros(int depth, int width);
  int depth() const { return static_cast<int>(slots.size()); }
  const Matrix& slot(int p) const { return slots.at(p - 1); }
  Matrix& slot(int p) { return slots.at(p - 1); }
  double norm() const;
};

/// sum_p Tr(v_p^T w_p); symmetric and bilinear.
double frobenius_ip(const TangentVector& v, const TangentVector& w);

struct BalanceReport {
  Vector residuals;  // r_p = |W_{p+1}^T W_{p+1} - W_p W_p^T|_F, p = 1..N-1
  double max_residual = 0.0;
};

/// Inter-layer rotations (Q_{N-1},...,Q_1); rotation(p) = Q_p for p=1..N-1.
struct GaugeElement {
  std::vector<Matrix> rotations;
  int depth() const { return static_cast<int>(rotations.size()) + 1; }
  const Matrix& rotation(int p) const { return rotations.at(p - 1); }
};

/// Frames (Q_N,...,Q_0); q[s] is Q_s for s = 0..N.
struct FrameTuple {
  std::vector<Matrix> q;
  int depth() const { return static_cast<int>(q.size()) - 1; }
};

/// Conserved charges (G_{N-1},...,G_1); charge(p) = G_p for p=1..N-1.
struct ChargeTuple {
  std::vector<Matrix> charges;
  const Matrix& charge(int p) const { return charges.at(p - 1); }
};

/// W_p = Q_p Lambda Q_{p-1}^T. The result is balanced by construction with
/// end-to-end matrix Q_N Lambda^N Q_0^T.
Network assemble_network(const Spectrum& spec, const FrameTuple& frames);

/// End-to-end matrix X = W_N W_{N-1} ... W_1.
Matrix end_to_end(const Network& w);

BalanceReport balance_residual(const Network& w);

/// G_p = W_{p+1}^T W_{p+1} - W_p W_p^T, conserved along the training flow.
ChargeTuple g_charges(const Network& w);

/// The distinguished balanced network (Q_N Lambda, Lambda, ..., Lambda Q_0^T)
/// over X, with Lambda = Sigma^{1/N}.
Network center_of_fiber(const Matrix& x, int depth);

/// (W_N Q_{N-1}^T, Q_{N-1} W_{N-1} Q_{N-2}^T, ..., Q_1 W_1). Leaves the
/// end-to-end matrix unchanged and acts by isometry.
Network gauge_act(const GaugeElement& g, const Network& w);

/// (Q_N W_N Q_{N-1}^T, ..., Q_1 W_1 Q_0^T). Maps balanced networks to
/// balanced networks; the end-to-end matrix maps to Q_N X Q_0^T.
Network full_orthogonal_act(const FrameTuple& frames, const Network& w);

GaugeElement random_gauge(int depth, int width, std::uint64_t seed);
FrameTuple random_frames(int depth, int width, std::uint64_t seed);

}  // namespace dln
