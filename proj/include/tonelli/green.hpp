#pragma once

#include <vector>

#include "tonelli/hamiltonian.hpp"

namespace tonelli {

enum class GreenSide { Minus, Plus };

struct GreenOptions {
  double step = 1e-3;
  bool use_exact = true;
  /// Time between QR renormalizations of the transported frame.
  double renorm_every = 1.0;
  double symmetry_tol = 1e-9;
  /// Convergence is declared when the last increment drops below this.
  double convergence_tol = 1e-6;
  /// Scan the relevant semi-orbit for conjugate points before estimating.
  bool check_conjugate = true;
  double conjugate_dt = 0.05;
  /// Dense conjugate scanning is capped at this horizon (it is a
  /// precondition probe, not the estimate itself).
  double conjugate_horizon_cap = 200.0;
};

/// Limit bundle estimate: push the vertical space at phi_{-T}(x0) forward by
/// Dphi_T (side Minus) or the vertical at phi_{+T}(x0) backward (side Plus).
/// For every horizon the image is transverse to the vertical and is written
/// as the graph {(u, S u)} over the horizontal; S is the reported symmetric
/// matrix, and the residual is the operator norm of the last increment
/// between consecutive horizons.
struct GreenBundleEstimate {
  GreenSide side = GreenSide::Minus;
  Mat S;
  double horizon = 0.0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> horizons;
  std::vector<Mat> history;
  double symmetry_defect = 0.0;
  std::vector<std::string> warnings;
};

/// Geometric default schedule 1, 2, 4, ..., 2^14.
std::vector<double> green_default_horizons();

GreenBundleEstimate green_bundle(const HamiltonianSpec& H, const PhasePoint& x0, GreenSide side,
                                 const std::vector<double>& horizons, const GreenOptions& opts = {});

/// Growth probe for the dynamical criterion: minimal norm of the transported
/// vector over forward and backward horizon samples.
struct BoundednessProbe {
  std::vector<double> horizons;
  std::vector<double> forward_norms;
  std::vector<double> backward_norms;
  double forward_min = 0.0;
  double backward_min = 0.0;
};

BoundednessProbe boundedness_probe(const HamiltonianSpec& H, const PhasePoint& x0,
                                   const TangentVector& v, const std::vector<double>& horizons,
                                   const GreenOptions& opts = {});

}  // namespace tonelli
