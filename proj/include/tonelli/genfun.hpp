#pragma once

#include <functional>

#include "tonelli/parallel.hpp"
#include "tonelli/quadrature.hpp"
#include "tonelli/types.hpp"

namespace tonelli {

/// Even C^2 bump: constant on [-plateau, plateau], quintic taper to zero at
/// |t| = 1, unit integral in exact arithmetic for every plateau value.
struct MollifierSpec {
  double plateau = 0.25;

  double plateau_value() const { return 1.0 / (1.0 + plateau); }
  double alpha(double t) const;
  double alpha_prime(double t) const;
  std::vector<double> breakpoints() const { return {-1.0, -plateau, plateau, 1.0}; }
};

/// Lift of a torus diffeomorphism isotopic to the identity:
/// lift(q + k) = lift(q) + k for integer vectors k.
struct BaseMap {
  std::string name;
  int dim = 0;
  std::function<Vec(const Vec&)> lift;
  std::function<Mat(const Vec&)> dlift;

  Mat dlift_at(const Vec& q, double fd_step = 1e-6) const;
};

struct BaseMapCloseness {
  double c0 = 0.0;  // sup |lift(q) - q|
  double c1 = 0.0;  // sup |Dlift(q) - I| (max-abs entry)
};

BaseMapCloseness basemap_closeness(const BaseMap& f, int samples_per_axis = 16);

/// Sup over samples and unit integer shifts of |lift(q+k) - lift(q) - k|.
double equivariance_defect(const BaseMap& f, int samples_per_axis = 8);

BaseMap make_identity_map(int dim);
BaseMap make_translation_map(const Vec& c);
/// lift_i(q) = q_i + (eps / 2 pi) sin(2 pi q_{(i+1) mod dim}).
BaseMap make_sine_map(int dim, double eps);
/// One-dimensional displacement table on n uniform nodes, periodic cubic
/// spline interpolant.
BaseMap make_tabulated_map(const std::vector<double>& displacement);

/// Mollified primitive A(q, p) = integral of eta(v) lift(q - |p| v) . p dv,
/// realized on a fixed panel-Gauss tensor rule (exact for the piecewise
/// polynomial mollifier, symmetric node set).
struct GeneratingFunction {
  BaseMap base;
  MollifierSpec mollifier;
  int order_per_panel = 8;
  /// Flattened tensor rule: node vectors and combined weights w * eta(v).
  std::vector<Vec> nodes;
  std::vector<double> weights;
};

GeneratingFunction make_generating_function(BaseMap base, MollifierSpec mollifier = {},
                                            int order_per_panel = 8);

double eval_A(const GeneratingFunction& gf, const Vec& q, const Vec& p);

struct GradA {
  Vec dq;
  Vec dp;
};

/// Exact gradient of the quadrature-realized A (the integrand is
/// differentiated under the fixed rule). The p = 0 limit is handled closed
/// form: dq = 0, dp = lift(q).
GradA grad_A(const GeneratingFunction& gf, const Vec& q, const Vec& p);

struct ZeroSectionJets {
  Vec grad_q;  // zero
  Vec grad_p;  // lift(q)
  /// (i, j) entry: d^2 A / dq_i dp_j = d lift_j / d q_i.
  Mat mixed;
  Mat pp;  // zero
};

ZeroSectionJets hessian_A_at_zero_section(const GeneratingFunction& gf, const Vec& q);

struct ExtensionOptions {
  double solver_tol = 1e-10;
  int max_iter = 100;
  /// Fixed-point iterations before switching to the Newton fallback.
  int newton_after = 20;
  double contraction_bound = 0.1;
  double cutoff_on = 0.5;
  double cutoff_off = 1.0;
  double fd_step = 1e-6;
};

/// Symplectic extension of the base map to the cotangent bundle, generated
/// by cal_A(q, P) = chi(|P|) (A(q, P) - q . P): F(q, p) = (Q, P) with
/// P = p - d cal_A/dq(q, P) and Q = q + d cal_A/dP(q, P). Outside |P| >=
/// cutoff_off the cutoff chi vanishes and F is the identity; on the zero
/// section F recovers the base map exactly.
struct ExtensionMap {
  GeneratingFunction gf;
  ExtensionOptions opts;
};

ExtensionMap make_extension(BaseMap base, const ExtensionOptions& opts = {},
                            MollifierSpec mollifier = {}, int order_per_panel = 8);

double cutoff_chi(const ExtensionOptions& opts, double r);
double cutoff_chi_prime(const ExtensionOptions& opts, double r);

/// Gradient of cal_A at (q, P).
GradA grad_calA(const ExtensionMap& em, const Vec& q, const Vec& P);

struct SolveResult {
  Vec Q;
  Vec P;
  int iterations = 0;
  bool used_newton = false;
  /// Largest observed ratio of consecutive fixed-point increments.
  double contraction = 0.0;
  double residual = 0.0;
};

SolveResult solve_F(const ExtensionMap& em, const Vec& q, const Vec& p);

/// Max over samples of |J^T Omega J - Omega| for the finite-difference
/// Jacobian of F; samples are drawn deterministically with |p| <= p_radius.
double symplecticity_residual(const ExtensionMap& em, int n_samples, double p_radius,
                              unsigned seed, double fd_step = 1e-6,
                              ExecPolicy policy = ExecPolicy::OpenMP);

/// Smooth isotopy from the identity (t = 0) to a target base map (t = 1).
struct Isotopy {
  std::string name;
  int dim = 0;
  std::function<Vec(double, const Vec&)> lift;
  std::function<Mat(double, const Vec&)> dlift;
};

Isotopy make_sine_isotopy(int dim, double eps);

/// Split the time-one map into n factors g_k = f_{k/n} o f_{(k-1)/n}^{-1}.
/// Every factor must have C^1 closeness below the bound, else an error asks
/// for a larger n. Inverses are evaluated by Newton iteration on the lift.
std::vector<BaseMap> factor_near_identity(const Isotopy& iso, int n, double closeness_bound,
                                          int samples_per_axis = 16);

}  // namespace tonelli
