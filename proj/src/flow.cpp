#include "dln/flow.hpp"

#include <cmath>
#include <functional>

namespace dln {

namespace {

using State = std::vector<Matrix>;

State axpy(const State& base, double h, const State& k) {
  State out = base;
  for (size_t i = 0; i < out.size(); ++i) out[i] += h * k[i];
  return out;
}

bool state_finite(const State& s) {
  for (const Matrix& m : s)
    if (!m.allFinite()) return false;
  return true;
}

/// One classical RK4 step; rhs may throw a DlnError to abort the step.
State rk4_step(const State& y, double dt, const std::function<State(const State&)>& rhs) {
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, 0.5 * dt, k1));
  const State k3 = rhs(axpy(y, 0.5 * dt, k2));
  const State k4 = rhs(axpy(y, dt, k3));
  State out = y;
  for (size_t i = 0; i < out.size(); ++i)
    out[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

void require_config(const FlowConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw UnsupportedDimension("FlowConfig: dt must be positive and finite");
  if (cfg.steps < 1) throw UnsupportedDimension("FlowConfig: steps must be >= 1");
  if (cfg.record_every < 1) throw UnsupportedDimension("FlowConfig: record_every must be >= 1");
  if (cfg.beta <= 0.0) throw UnsupportedDimension("FlowConfig: beta must be positive");
}

State param_rhs(const State& layers, const LossSpec& loss) {
  const int n = static_cast<int>(layers.size());
  const int d = static_cast<int>(layers[0].rows());
  // prefix[p] = W_N ... W_{p+1}, suffix[p] = W_{p-1} ... W_1
  std::vector<Matrix> prefix(n + 1), suffix(n + 1);
  prefix[n] = Matrix::Identity(d, d);
  for (int p = n - 1; p >= 1; --p) prefix[p] = prefix[p + 1] * layers[p];
  suffix[1] = Matrix::Identity(d, d);
  for (int p = 2; p <= n; ++p) suffix[p] = layers[p - 2] * suffix[p - 1];
  const Matrix x = prefix[1] * layers[0];
  const Matrix de = loss.differential(x);
  State k(n);
  for (int p = 1; p <= n; ++p)
    k[p - 1] = -(prefix[p].transpose() * de * suffix[p].transpose());
  return k;
}

double charge_drift_vs(const ChargeTuple& now, const ChargeTuple& initial) {
  double drift = 0.0;
  for (size_t i = 0; i < now.charges.size(); ++i)
    drift = std::max(drift, (now.charges[i] - initial.charges[i]).norm());
  return drift;
}

class Recorder {
public:
  Recorder(Trajectory& traj, const LossSpec& loss, const FlowConfig& cfg, int depth)
      : traj_(traj), loss_(loss), cfg_(cfg), depth_(depth) {}

  void record_x(double t, const Matrix& x, double balance, double drift,
                const Network* net = nullptr) {
    FlowSample s;
    s.t = t;
    s.x = x;
    s.loss = loss_.value(x);
    s.balance_residual = balance;
    s.charge_drift = drift;
    const SvdTriple svd = svd_descending(x);
    s.sigma = svd.sigma;
    try {
      s.entropy = entropy(svd.spectrum(depth_), depth_, cfg_.convention).total;
    } catch (const RankDeficient&) {
      s.entropy = std::numeric_limits<double>::quiet_NaN();
    }
    s.free_energy = std::isfinite(cfg_.beta) ? s.loss - s.entropy / cfg_.beta : s.loss;
    traj_.samples.push_back(std::move(s));
    if (net != nullptr) traj_.networks.push_back(*net);
  }

private:
  Trajectory& traj_;
  const LossSpec& loss_;
  const FlowConfig& cfg_;
  int depth_;
};

}  // namespace

LossSpec LossSpec::quadratic(Matrix target) {
  require_square_finite(target, "LossSpec::quadratic");
  LossSpec spec;
  spec.kind = Kind::Quadratic;
  spec.target = std::move(target);
  return spec;
}

LossSpec LossSpec::masked_quadratic(Matrix target, Matrix mask) {
  require_square_finite(target, "LossSpec::masked_quadratic");
  require_square_finite(mask, "LossSpec::masked_quadratic");
  if (mask.rows() != target.rows())
    throw ShapeMismatch("LossSpec::masked_quadratic: mask/target shape mismatch");
  LossSpec spec;
  spec.kind = Kind::MaskedQuadratic;
  spec.target = std::move(target);
  spec.mask = std::move(mask);
  return spec;
}

double LossSpec::value(const Matrix& x) const {
  if (x.rows() != target.rows() || x.cols() != target.cols())
    throw ShapeMismatch("LossSpec::value: operand shape mismatch");
  if (kind == Kind::Quadratic) return 0.5 * (x - target).squaredNorm();
  return 0.5 * mask.cwiseProduct(x - target).squaredNorm();
}

Matrix LossSpec::differential(const Matrix& x) const {
  if (x.rows() != target.rows() || x.cols() != target.cols())
    throw ShapeMismatch("LossSpec::differential: operand shape mismatch");
  if (kind == Kind::Quadratic) return x - target;
  return mask.cwiseProduct(x - target);
}

Trajectory param_flow(const Network& w0, const LossSpec& loss, const FlowConfig& cfg) {
  require_config(cfg);
  for (const Matrix& m : w0.layers()) require_square_finite(m, "param_flow");
  const ChargeTuple g0 = g_charges(w0);

  Trajectory traj;
  Recorder rec(traj, loss, cfg, w0.depth());
  State state = w0.layers();

  auto record = [&](int step) {
    Network net(state);
    rec.record_x(step * cfg.dt, end_to_end(net), balance_residual(net).max_residual,
                 charge_drift_vs(g_charges(net), g0), &net);
  };
  record(0);
  for (int step = 1; step <= cfg.steps; ++step) {
    State next = rk4_step(state, cfg.dt, [&](const State& y) { return param_rhs(y, loss); });
    if (!state_finite(next)) {
      traj.stopped_early = true;
      traj.stop_reason = "NonFinite";
      break;
    }
    state = std::move(next);
    if (step % cfg.record_every == 0 || step == cfg.steps) record(step);
  }
  return traj;
}

Trajectory closed_flow_general(const Network& w0, const LossSpec& loss, const FlowConfig& cfg) {
  require_config(cfg);
  for (const Matrix& m : w0.layers()) require_square_finite(m, "closed_flow_general");
  const int n = w0.depth();
  const int d = w0.width();
  const ChargeTuple g0 = g_charges(w0);

  // Joint state: N layers followed by the separately integrated X.
  State state = w0.layers();
  state.push_back(end_to_end(w0));

  auto rhs = [&](const State& y) {
    State layers(y.begin(), y.end() - 1);
    const Matrix& x = y.back();
    State k = param_rhs(layers, loss);
    // Partial products of the co-integrated network; A_{N+1} = B_0 = I.
    std::vector<Matrix> a(n + 2), b(n + 1);
    a[n + 1] = Matrix::Identity(d, d);
    for (int p = n; p >= 1; --p) a[p] = a[p + 1] * layers[p - 1];
    b[0] = Matrix::Identity(d, d);
    for (int p = 1; p <= n; ++p) b[p] = layers[p - 1] * b[p - 1];
    const Matrix de = loss.differential(x);
    Matrix xdot = Matrix::Zero(d, d);
    for (int p = 1; p <= n; ++p)
      xdot -= a[p + 1] * a[p + 1].transpose() * de * b[p - 1].transpose() * b[p - 1];
    k.push_back(std::move(xdot));
    return k;
  };

  Trajectory traj;
  Recorder rec(traj, loss, cfg, n);
  auto record = [&](int step) {
    Network net(State(state.begin(), state.end() - 1));
    rec.record_x(step * cfg.dt, state.back(), balance_residual(net).max_residual,
                 charge_drift_vs(g_charges(net), g0), &net);
  };
  record(0);
  for (int step = 1; step <= cfg.steps; ++step) {
    State next = rk4_step(state, cfg.dt, rhs);
    if (!state_finite(next)) {
      traj.stopped_early = true;
      traj.stop_reason = "NonFinite";
      break;
    }
    state = std::move(next);
    if (step % cfg.record_every == 0 || step == cfg.steps) record(step);
  }
  return traj;
}

namespace {

Trajectory x_state_flow(const Matrix& x0, int depth, const LossSpec& loss, const FlowConfig& cfg,
                        bool with_entropy_term) {
  require_config(cfg);
  require_square_finite(x0, "end_to_end_flow");
  const bool use_entropy = with_entropy_term && std::isfinite(cfg.beta);

  auto rhs = [&](const State& y) {
    const MetricOperator op(y[0], depth);  // throws RankDeficient at rank loss
    Matrix force = loss.differential(y[0]);
    if (use_entropy) {
      const Spectrum spec = op.svd().spectrum(depth);
      force -= (1.0 / cfg.beta) * entropy_gradient(spec, depth, op.svd());
    }
    return State{-op.apply(force, ApplyDirection::Forward)};
  };

  Trajectory traj;
  Recorder rec(traj, loss, cfg, depth);
  State state{x0};
  rhs(state);  // validate the initial point eagerly
  rec.record_x(0.0, state[0], 0.0, 0.0);
  for (int step = 1; step <= cfg.steps; ++step) {
    State next;
    try {
      next = rk4_step(state, cfg.dt, rhs);
    } catch (const DlnError& err) {
      traj.stopped_early = true;
      traj.stop_reason = err.name();
      break;
    }
    if (!state_finite(next)) {
      traj.stopped_early = true;
      traj.stop_reason = "NonFinite";
      break;
    }
    state = std::move(next);
    if (step % cfg.record_every == 0 || step == cfg.steps)
      rec.record_x(step * cfg.dt, state[0], 0.0, 0.0);
  }
  return traj;
}

}  // namespace

Trajectory balanced_flow(const Matrix& x0, int depth, const LossSpec& loss,
                         const FlowConfig& cfg) {
  return x_state_flow(x0, depth, loss, cfg, /*with_entropy_term=*/false);
}

Matrix riemannian_grad(const MetricOperator& op, const Matrix& de) {
  return op.apply(de, ApplyDirection::Forward);
}

double free_energy(const Matrix& x, const LossSpec& loss, int depth, double beta,
                   HaarConvention convention) {
  const double e = loss.value(x);
  if (!std::isfinite(beta)) return e;
  if (beta <= 0.0) throw UnsupportedDimension("free_energy: beta must be positive");
  const Spectrum spec = svd_descending(x).spectrum(depth);
  return e - entropy(spec, depth, convention).total / beta;
}

Trajectory free_energy_flow(const Matrix& x0, int depth, const LossSpec& loss,
                            const FlowConfig& cfg) {
  return x_state_flow(x0, depth, loss, cfg, /*with_entropy_term=*/true);
}

}  // namespace dln
