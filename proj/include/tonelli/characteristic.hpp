#pragma once

#include <functional>
#include <optional>

#include "tonelli/manifold.hpp"

namespace tonelli {

/// Characteristic line field of a coisotropic-type submanifold: at each grid
/// node the kernel of the restricted form, expressed both as parameter-space
/// coefficients (columns of the coordinate-frame Jacobian) and as the
/// ambient unit tangent vector. Orientations are aligned over the grid by
/// breadth-first propagation; an inconsistent cycle marks the field
/// non-orientable.
struct CharacteristicField {
  std::vector<Vec> thetas;
  /// Parameter-space direction c with || Dj c || = 1 (ambient flat metric).
  std::vector<Vec> coeffs;
  /// Ambient unit vector Dj c, stacked (dq, dp).
  std::vector<Vec> ambient;
  std::vector<int> grid_shape;
  bool orientable = true;
  double max_neighbor_angle = 0.0;
  std::vector<std::string> warnings;
};

struct CharacteristicOptions {
  double rank_tol = 1e-8;
  /// Neighboring directions beyond this angle (radians) trigger a warning.
  double continuity_angle = 0.5235987755982988;  // pi/6
};

/// Requires kernel dimension one at every grid node.
CharacteristicField characteristic_field(const ParamSubmanifold& m,
                                         const CharacteristicOptions& opts = {},
                                         ExecPolicy policy = ExecPolicy::OpenMP);

/// Velocity field on the parameter torus induced by the characteristic
/// direction; sign chosen to match hint (previous velocity) when given,
/// otherwise aligned with the nearest grid node of the oriented field.
Vec characteristic_velocity(const ParamSubmanifold& m, const CharacteristicField& field,
                            const Vec& theta, const Vec* hint, double rank_tol = 1e-8);

using ParamField = std::function<Vec(const Vec&)>;

/// Parameter-space velocity field backed by the oriented characteristic
/// directions; stateful orientation continuity along one integration path.
ParamField make_characteristic_flow_field(const ParamSubmanifold& m,
                                          const CharacteristicField& field, double rank_tol = 1e-8);

struct CurveOptions {
  double step = 1e-2;
  double record_dt = 0.0;  // 0 records every step
  double max_horizon = 1e4;
};

struct ParamCurve {
  std::vector<double> times;
  /// Lifted parameters (not wrapped); winding information is preserved.
  std::vector<Vec> thetas;
};

/// RK4 integration of a parameter-space field.
ParamCurve characteristic_flow(const ParamField& field, const Vec& theta0, double t,
                               const CurveOptions& opts = {});

/// Occupancy ratio of the cells visited by the curve in the two marked
/// parameter axes, at the given resolution per axis.
double leaf_fill_ratio(const ParamCurve& curve, int axis_a, int axis_b, int resolution);

struct PeriodOptions {
  CurveOptions curve;
  /// The orbit must leave this ball before a return counts.
  double leave_radius = 0.1;
  /// Candidate returns are refined below this closure tolerance.
  double close_tol = 1e-6;
  double horizon = 100.0;
};

struct PeriodReport {
  Vec theta0;
  bool closed = false;
  double period = 0.0;
  double closure_error = 0.0;
};

/// First-return detection for a parameter-space field: integrate, watch the
/// torus distance to the start, refine the first local minimum below
/// tolerance. Reports closed = false when no return occurs by the horizon.
PeriodReport period_scan(const ParamField& field, const Vec& theta0, const PeriodOptions& opts = {});

/// Smooth phase-space map with Jacobian (finite differences when absent).
struct PhaseMap {
  std::string name;
  std::function<PhasePoint(const PhasePoint&)> apply;
  std::function<Mat(const PhasePoint&)> jacobian;
  Mat jacobian_at(const PhasePoint& x, double fd_step = 1e-6) const;
};

struct CocycleResult {
  double factor = 0.0;
  /// Residual of Df X - factor * X(image), ambient norm.
  double residual = 0.0;
  Vec theta_image;
};

/// Scalar cocycle of an invariant map along the characteristic field:
/// Df(x) X(x) = factor * X(f(x)). The image direction is found by projecting
/// f(j(theta)) back to parameters.
CocycleResult cocycle_factor(const PhaseMap& f, const ParamSubmanifold& m,
                             const CharacteristicField& field, const Vec& theta,
                             const PhasePointIndex& index);

}  // namespace tonelli
