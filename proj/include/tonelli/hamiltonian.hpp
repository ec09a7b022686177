#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tonelli/types.hpp"

namespace tonelli {

/// Smooth Hamiltonian on the cotangent bundle of the d-torus, fiberwise
/// convex with positive-definite fiber Hessian. Callbacks take (q, p); q is
/// interpreted 1-periodically in every component. Closed-form flow maps are
/// optional fast paths used by the integrators when present.
struct HamiltonianSpec {
  std::string name;
  int dim = 0;
  bool separable = false;  // H(q,p) = T(p) + V(q)

  std::function<double(const Vec&, const Vec&)> value;
  std::function<Vec(const Vec&, const Vec&)> grad_q;
  std::function<Vec(const Vec&, const Vec&)> grad_p;
  std::function<Mat(const Vec&, const Vec&)> hess_pp;
  std::function<Mat(const Vec&, const Vec&)> hess_qq;
  /// Mixed block, entry (i, j) = d^2 H / dq_i dp_j. May be null when the
  /// Hamiltonian is separable (then it is identically zero).
  std::function<Mat(const Vec&, const Vec&)> hess_qp;

  std::function<PhasePoint(const PhasePoint&, double)> exact_flow;
  /// Derivative of the exact flow, 2d x 2d in stacked (dq, dp) blocks.
  std::function<Mat(const PhasePoint&, double)> exact_tangent_flow;

  Mat mixed_hessian(const Vec& q, const Vec& p) const;
};

/// Hamiltonian vector field (dH/dp, -dH/dq) at x.
TangentVector vector_field(const HamiltonianSpec& H, const PhasePoint& x);

/// Jacobian of the vector field, 2d x 2d in stacked (dq, dp) blocks.
Mat vector_field_jacobian(const HamiltonianSpec& H, const PhasePoint& x);

struct HamiltonianCheck {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Sample-based sanity check: fiber Hessian positive definite (Cholesky) at
/// every sample, analytic gradients within 1e-5 relative of central finite
/// differences of the value.
HamiltonianCheck validate(const HamiltonianSpec& H, const std::vector<PhasePoint>& samples);

/// Deterministic sample cloud for validate(): n points with q uniform on the
/// torus and p uniform in a centered box of the given half-width.
std::vector<PhasePoint> sample_cloud(int dim, int n, double p_halfwidth, unsigned seed);

}  // namespace tonelli
