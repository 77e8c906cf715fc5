#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dln/entropy.hpp"
#include "dln/metric.hpp"
#include "dln/network.hpp"

namespace dln {

/// Loss on the end-to-end matrix together with its differential dE(X).
struct LossSpec {
  enum class Kind { Quadratic, MaskedQuadratic };

  Kind kind = Kind::Quadratic;
  Matrix target;
  Matrix mask;  // 0/1 entries; only used by MaskedQuadratic

  static LossSpec quadratic(Matrix target);
  static LossSpec masked_quadratic(Matrix target, Matrix mask);

  double value(const Matrix& x) const;
  Matrix differential(const Matrix& x) const;
};

struct FlowConfig {
  double dt = 1e-3;
  int steps = 1000;
  double beta = std::numeric_limits<double>::infinity();
  int record_every = 10;
  HaarConvention convention = HaarConvention::Embedded;
};

struct FlowSample {
  double t = 0.0;
  Matrix x;
  double loss = 0.0;
  double free_energy = 0.0;
  double entropy = 0.0;  // NaN when the spectrum is rank deficient
  double balance_residual = 0.0;
  double charge_drift = 0.0;
  Vector sigma;
};

struct Trajectory {
  std::vector<FlowSample> samples;
  std::vector<Network> networks;  // aligned with samples for network-state flows
  bool stopped_early = false;
  std::string stop_reason;

  const FlowSample& back() const { return samples.back(); }
};

/// Gradient flow in parameter space,
/// dW_p/dt = -(W_N...W_{p+1})^T dE(X) (W_{p-1}...W_1)^T, fixed-step RK4.
Trajectory param_flow(const Network& w0, const LossSpec& loss, const FlowConfig& cfg);

/// End-to-end flow dX/dt = -sum_p (A_{p+1} A_{p+1}^T) dE(X) (B_{p-1}^T B_{p-1})
/// with partial products A_p = W_N...W_p, B_p = W_p...W_1 taken from a
/// co-integrated copy of the full network. X is integrated as its own state,
/// which makes the emitted trajectory an independent cross-check of the
/// parameter-space flow.
Trajectory closed_flow_general(const Network& w0, const LossSpec& loss, const FlowConfig& cfg);

/// Balanced end-to-end flow
/// dX/dt = -sum_p (XX^T)^{(N-p)/N} dE(X) (X^T X)^{(p-1)/N},
/// applied spectrally through the metric operator. Stops flagged if the
/// smallest singular value crosses the rank threshold.
Trajectory balanced_flow(const Matrix& x0, int depth, const LossSpec& loss,
                         const FlowConfig& cfg);

/// grad_{g^N} E = A_{N,X}(dE); satisfies g^N(grad, Z) = Tr(dE^T Z).
Matrix riemannian_grad(const MetricOperator& op, const Matrix& de);

/// F_beta(X) = E(X) - S(X)/beta; beta = infinity gives E(X).
double free_energy(const Matrix& x, const LossSpec& loss, int depth, double beta,
                   HaarConvention convention);

/// Gradient flow of the free energy,
/// dX/dt = -A_{N,X}(dE(X) - entropy_gradient(X)/beta). Stops flagged on rank
/// loss or coincident singular values.
Trajectory free_energy_flow(const Matrix& x0, int depth, const LossSpec& loss,
                            const FlowConfig& cfg);

}  // namespace dln
