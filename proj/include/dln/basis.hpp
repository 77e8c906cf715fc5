#pragma once

#include <vector>

#include "dln/jacobi.hpp"
#include "dln/network.hpp"

namespace dln {

/// Factorization of a balanced network as W_p = Q_p Lambda Q_{p-1}^T.
/// Frames are recovered layer by layer: (Q_1, Q_0) from the sign-fixed SVD
/// of W_1, then Q_p = W_p Q_{p-1} Lambda^{-1}. The recovery is one
/// deterministic choice among the finitely many gauge-equivalent ones; it
/// requires distinct singular values.
struct FrameDecomposition {
  Spectrum spectrum;
  FrameTuple frames;
};

FrameDecomposition recover_frames(const Network& w, double balance_tol = tol::kBalance);

/// Gauge generator pushed through the parametrization at the center:
/// slot p+1 = -Lambda alpha^{k,l}, slot p = alpha^{k,l} Lambda, with the
/// single-slot endpoint cases p = 0 and p = N.
TangentVector center_tangent_c(int k, int l, int p, const Spectrum& spec);

/// (e_k e_k^T, ..., e_k e_k^T): the radial direction at the center.
TangentVector center_tangent_m(int k, const Spectrum& spec);

/// Translate a center tangent vector to the point with the given frames:
/// slot s maps to Q_s w_s Q_{s-1}^T. Isometric.
TangentVector translate_tangent(const FrameTuple& frames, const TangentVector& center_vec);

/// Orthonormal basis of the tangent space of the balanced manifold at w:
/// d radial vectors v^k followed by (N+1) d(d-1)/2 gauge-plane vectors
/// u^{k,l,p}, grouped by the pair (k,l) with p = 0..N. The u vectors are the
/// P-matrix combinations of the translated center generators, so their Gram
/// matrix is the identity. p in 1..N-1 spans the kernel of the end-to-end
/// differential; p in {0, N} together with the v^k span the horizontal space.
struct BasisLabel {
  enum class Kind { Radial, GaugePlane };
  Kind kind = Kind::Radial;
  int k = 0;
  int l = 0;
  int p = 0;

  bool is_kernel(int depth) const {
    return kind == Kind::GaugePlane && p >= 1 && p <= depth - 1;
  }
};

struct OrthonormalBasis {
  std::vector<TangentVector> vectors;
  std::vector<BasisLabel> labels;
  FrameDecomposition decomposition;

  int kernel_dimension() const;
};

OrthonormalBasis onb_vectors(const Network& w, double balance_tol = tol::kBalance);

/// Differential of the end-to-end product:
/// sum_p W_N ... W_{p+1} t_p W_{p-1} ... W_1.
Matrix pushforward_dphi(const Network& w, const TangentVector& t);

/// Numerical certificate that the end-to-end map is a Riemannian submersion
/// at w: the gauge directions push forward to zero, the horizontal basis
/// pushes forward to a g^N-orthonormal family, and the boundary gauge
/// vectors match their rank-one closed forms with coefficient
/// sqrt((lambda_k^{2N} - lambda_l^{2N}) / (lambda_k^2 - lambda_l^2)).
struct SubmersionReport {
  double kernel_max = 0.0;
  double isometry_max = 0.0;
  double closed_form_max = 0.0;

  double worst() const;
};

SubmersionReport submersion_report(const Network& w, double balance_tol = tol::kBalance);

}  // namespace dln
