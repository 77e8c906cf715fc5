#include "dln/basis.hpp"

#include <cmath>

#include "dln/metric.hpp"

namespace dln {

FrameDecomposition recover_frames(const Network& w, double balance_tol) {
  const BalanceReport report = balance_residual(w);
  if (report.max_residual > balance_tol)
    throw NotBalanced("recover_frames: max balance residual " +
                      std::to_string(report.max_residual) + " exceeds tolerance " +
                      std::to_string(balance_tol));
  const int n = w.depth();
  const int d = w.width();

  const SvdTriple first = svd_descending(w.layer(1));
  Spectrum lam_spec = Spectrum::from_sigma(first.sigma, 1);  // singular values of one layer
  lam_spec.require_full_rank("recover_frames");
  lam_spec.require_distinct("recover_frames");

  FrameDecomposition fd;
  fd.spectrum = Spectrum::from_lambda(first.sigma, n);
  fd.frames.q.resize(n + 1);
  fd.frames.q[0] = first.q_right;
  fd.frames.q[1] = first.q_left;
  const Vector inv_lambda = fd.spectrum.lambda.cwiseInverse();
  for (int p = 2; p <= n; ++p)
    fd.frames.q[p] = w.layer(p) * fd.frames.q[p - 1] * inv_lambda.asDiagonal();
  for (int s = 0; s <= n; ++s) {
    const double dev =
        (fd.frames.q[s].transpose() * fd.frames.q[s] - Matrix::Identity(d, d)).norm();
    if (dev > 1e-6)
      throw NotBalanced("recover_frames: recovered frame " + std::to_string(s) +
                        " deviates from orthogonality by " + std::to_string(dev));
  }
  return fd;
}

TangentVector center_tangent_c(int k, int l, int p, const Spectrum& spec) {
  const int n = spec.depth;
  const int d = spec.dim();
  if (!(1 <= k && k < l && l <= d))
    throw IndexError("center_tangent_c: need 1 <= k < l <= d");
  if (p < 0 || p > n) throw IndexError("center_tangent_c: need 0 <= p <= depth");
  const Matrix alpha = skew_basis_element(k, l, d);
  const Matrix lam = spec.lambda.asDiagonal();
  TangentVector t = TangentVector::zeros(n, d);
  if (p >= 1) t.slot(p) = alpha * lam;
  if (p + 1 <= n) t.slot(p + 1) = -(lam * alpha);
  return t;
}

TangentVector center_tangent_m(int k, const Spectrum& spec) {
  const int d = spec.dim();
  if (k < 1 || k > d) throw IndexError("center_tangent_m: k out of range");
  TangentVector t = TangentVector::zeros(spec.depth, d);
  for (int p = 1; p <= spec.depth; ++p) t.slot(p)(k - 1, k - 1) = 1.0;
  return t;
}

TangentVector translate_tangent(const FrameTuple& frames, const TangentVector& center_vec) {
  const int n = center_vec.depth();
  if (frames.depth() != n) throw ShapeMismatch("translate_tangent: frame depth mismatch");
  TangentVector t = center_vec;
  for (int s = 1; s <= n; ++s)
    t.slot(s) = frames.q[s] * center_vec.slot(s) * frames.q[s - 1].transpose();
  return t;
}

int OrthonormalBasis::kernel_dimension() const {
  int count = 0;
  const int n = decomposition.frames.depth();
  for (const BasisLabel& label : labels)
    if (label.is_kernel(n)) ++count;
  return count;
}

OrthonormalBasis onb_vectors(const Network& w, double balance_tol) {
  OrthonormalBasis basis;
  basis.decomposition = recover_frames(w, balance_tol);
  const Spectrum& spec = basis.decomposition.spectrum;
  const FrameTuple& frames = basis.decomposition.frames;
  const int n = w.depth();
  const int d = w.width();
  const double inv_sqrt_n = 1.0 / std::sqrt(double(n));

  // Radial vectors v^k with slots q_{s,k} q_{s-1,k}^T / sqrt(N).
  for (int k = 1; k <= d; ++k) {
    TangentVector v = TangentVector::zeros(n, d);
    for (int s = 1; s <= n; ++s)
      v.slot(s) = inv_sqrt_n * frames.q[s].col(k - 1) * frames.q[s - 1].col(k - 1).transpose();
    basis.vectors.push_back(std::move(v));
    basis.labels.push_back({BasisLabel::Kind::Radial, k, 0, 0});
  }

  // Gauge-plane vectors u^{k,l,p}. The endpoint vectors p = 0 and p = N are
  // the normalized geometric sequences
  //   u_s^{k,l,0} = gamma lambda_k^{s-1} lambda_l^{N-s} q_{s,l} q_{s-1,k}^T,
  //   u_s^{k,l,N} = gamma lambda_k^{N-s} lambda_l^{s-1} q_{s,k} q_{s-1,l}^T,
  // with gamma = sqrt((lambda_k^2 - lambda_l^2)/(lambda_k^{2N} - lambda_l^{2N})).
  // Interior vectors come from the sine rows of the P matrix applied to the
  // translated generators c^{k,l,r}.
  for (int k = 1; k <= d; ++k) {
    for (int l = k + 1; l <= d; ++l) {
      const double lk = spec.lambda(k - 1);
      const double ll = spec.lambda(l - 1);
      const double gamma = std::sqrt((lk * lk - ll * ll) /
                                     (std::pow(lk, 2.0 * n) - std::pow(ll, 2.0 * n)));
      std::vector<TangentVector> c(n);
      for (int r = 1; r <= n - 1; ++r)
        c[r] = translate_tangent(frames, center_tangent_c(k, l, r, spec));
      const PMatrix pm = p_matrix(lk, ll, n);
      for (int p = 0; p <= n; ++p) {
        TangentVector u = TangentVector::zeros(n, d);
        if (p == 0) {
          for (int s = 1; s <= n; ++s)
            u.slot(s) = gamma * std::pow(lk, s - 1) * std::pow(ll, n - s) *
                        frames.q[s].col(l - 1) * frames.q[s - 1].col(k - 1).transpose();
        } else if (p == n) {
          for (int s = 1; s <= n; ++s)
            u.slot(s) = gamma * std::pow(lk, n - s) * std::pow(ll, s - 1) *
                        frames.q[s].col(k - 1) * frames.q[s - 1].col(l - 1).transpose();
        } else {
          for (int r = 1; r <= n - 1; ++r) {
            const double coeff = pm.entries(p, r);
            for (int s = 1; s <= n; ++s) u.slot(s) += coeff * c[r].slot(s);
          }
        }
        basis.vectors.push_back(std::move(u));
        basis.labels.push_back({BasisLabel::Kind::GaugePlane, k, l, p});
      }
    }
  }
  return basis;
}

Matrix pushforward_dphi(const Network& w, const TangentVector& t) {
  const int n = w.depth();
  const int d = w.width();
  if (t.depth() != n) throw ShapeMismatch("pushforward_dphi: tangent depth mismatch");
  for (int p = 1; p <= n; ++p)
    if (t.slot(p).rows() != d || t.slot(p).cols() != d)
      throw ShapeMismatch("pushforward_dphi: slot shape mismatch");

  // prefix[p] = W_N ... W_{p+1}, suffix[p] = W_{p-1} ... W_1
  std::vector<Matrix> prefix(n + 2), suffix(n + 1);
  prefix[n] = Matrix::Identity(d, d);
  for (int p = n - 1; p >= 1; --p) prefix[p] = prefix[p + 1] * w.layer(p + 1);
  suffix[1] = Matrix::Identity(d, d);
  for (int p = 2; p <= n; ++p) suffix[p] = w.layer(p - 1) * suffix[p - 1];

  Matrix out = Matrix::Zero(d, d);
  for (int p = 1; p <= n; ++p) out += prefix[p] * t.slot(p) * suffix[p];
  return out;
}

double SubmersionReport::worst() const {
  return std::max(kernel_max, std::max(isometry_max, closed_form_max));
}

SubmersionReport submersion_report(const Network& w, double balance_tol) {
  const OrthonormalBasis basis = onb_vectors(w, balance_tol);
  const Spectrum& spec = basis.decomposition.spectrum;
  const FrameTuple& frames = basis.decomposition.frames;
  const int n = w.depth();
  const Matrix x = end_to_end(w);
  const MetricOperator op(x, n);

  SubmersionReport report;
  std::vector<Matrix> horizontal;
  for (size_t i = 0; i < basis.vectors.size(); ++i) {
    const Matrix push = pushforward_dphi(w, basis.vectors[i]);
    const BasisLabel& label = basis.labels[i];
    if (label.is_kernel(n)) {
      report.kernel_max = std::max(report.kernel_max, push.norm());
      continue;
    }
    if (label.kind == BasisLabel::Kind::GaugePlane) {
      const double lk = spec.lambda(label.k - 1);
      const double ll = spec.lambda(label.l - 1);
      const double coeff = std::sqrt((std::pow(lk, 2.0 * n) - std::pow(ll, 2.0 * n)) /
                                     (lk * lk - ll * ll));
      const Matrix qn_col =
          label.p == 0 ? frames.q[n].col(label.l - 1) : frames.q[n].col(label.k - 1);
      const Matrix q0_col =
          label.p == 0 ? frames.q[0].col(label.k - 1) : frames.q[0].col(label.l - 1);
      const Matrix closed = coeff * qn_col * q0_col.transpose();
      report.closed_form_max = std::max(report.closed_form_max, (push - closed).norm());
    }
    horizontal.push_back(push);
  }

  for (size_t i = 0; i < horizontal.size(); ++i)
    for (size_t j = i; j < horizontal.size(); ++j) {
      const double g = op.metric(horizontal[i], horizontal[j]);
      const double target = i == j ? 1.0 : 0.0;
      report.isometry_max = std::max(report.isometry_max, std::abs(g - target));
    }
  return report;
}

}  // namespace dln
