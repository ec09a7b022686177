#pragma once

#include <vector>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/types.hpp"

namespace tonelli {

struct FlowOptions {
  double step = 1e-3;
  double max_horizon = 1e4;
  /// |H(end) - H(start)| above this raises an error for conservative runs.
  double energy_drift_tol = 1e-4;
  /// Prefer the closed-form flow when the Hamiltonian carries one.
  bool use_exact = true;
  /// Spacing of recorded states; 0 records every internal step.
  double record_dt = 0.0;
};

/// Time-stepping engine advancing a phase point and, optionally, a frame of
/// tangent vectors transported by the exact derivative of the numeric
/// one-step map (Stoermer-Verlet for separable Hamiltonians, classical RK4
/// otherwise). Because the tangent update differentiates the map itself, the
/// transported frame satisfies the discrete symplecticity identity to
/// rounding for the Verlet path.
class Stepper {
 public:
  Stepper(const HamiltonianSpec& H, PhasePoint x0);

  /// Attach a 2d x m tangent frame to transport alongside the base point.
  void set_tangent(Mat W0);

  /// One step of size h (h may be negative).
  void step(double h);

  /// Integrate by dt using steps of magnitude at most h, landing exactly.
  void advance(double dt, double h);

  /// Replace the tangent frame by its thin-QR orthonormalization, keeping
  /// the accumulated log of the dropped column scales. The R factor is kept
  /// with positive diagonal, so determinant signs of square subblocks are
  /// preserved up to the positive factor exp(log_scale).
  void renormalize_tangent();

  double time() const { return t_; }
  const PhasePoint& state() const { return x_; }
  bool has_tangent() const { return W_.size() > 0; }
  const Mat& tangent() const { return W_; }
  double tangent_log_scale() const { return log_scale_; }

 private:
  void verlet_step(double h);
  void rk4_step(double h);

  const HamiltonianSpec& H_;
  PhasePoint x_;
  Mat W_;
  double t_ = 0.0;
  double log_scale_ = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<double> energies;
  double energy_drift = 0.0;
};

/// Flow x0 for time t (t may be negative). Uses the closed-form flow when
/// available and permitted, the scheme selected by separability otherwise.
Trajectory flow(const HamiltonianSpec& H, const PhasePoint& x0, double t,
                const FlowOptions& opts = {});

struct TangentTrajectory {
  Trajectory base;
  /// Derivative of the flow map at each recorded time, 2d x 2d.
  std::vector<Mat> jacobians;
  /// Max over records of the symplecticity defect |J^T Omega J - Omega|.
  double symplecticity_defect = 0.0;
};

/// Flow together with its derivative along the trajectory.
TangentTrajectory tangent_flow(const HamiltonianSpec& H, const PhasePoint& x0, double t,
                               const FlowOptions& opts = {});

/// Action integral of the fiberwise Legendre transform along a trajectory,
/// integral of (p . dq/dt - H) dt, composite trapezoid over the records.
double action(const HamiltonianSpec& H, const Trajectory& traj);

}  // namespace tonelli
