#pragma once

#include <array>

#include "tonelli/characteristic.hpp"

namespace tonelli {

struct SectionOptions {
  std::array<int, 3> grid{32, 32, 32};
  double flow_step = 1e-2;
  /// All orbits must close after this common period.
  double period = 1.0;
  double loop_tol = 1e-6;
  /// Orbits checked for closure before the averaging sweep.
  int precheck_seeds = 5;
};

/// Averaged first-coordinate drift data on the 3-torus for a periodic
/// parameter field: u(x) = integral over one period of the lifted first
/// coordinate, stored through its periodic part w = u - theta_1, plus the
/// level-set mesh of {u = 0 mod 1} and the per-node transversality drift
/// (the first homology component of the field, which equals the derivative
/// of u along the flow).
struct SectionField {
  std::array<int, 3> resolution{0, 0, 0};
  std::vector<double> w;      // periodic part, node-major over the grid
  std::vector<double> drift;  // <lift(period) - start, e1> per node
  /// Level-set mesh: vertices on grid-cell edges, one polygon per cut cell.
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::vector<int>> faces;
  double min_drift = 0.0;
  std::vector<std::string> warnings;

  long node_index(int i, int j, int k) const;
  /// Trilinear interpolation of w at a wrapped parameter point.
  double w_at(const Vec& theta) const;
};

/// Build the averaged section data for a field whose orbits all close with
/// the common period. Errors when a prechecked orbit fails to close within
/// loop_tol.
SectionField section_from_average(const ParamField& field, const SectionOptions& opts = {},
                                  ExecPolicy policy = ExecPolicy::OpenMP);

}  // namespace tonelli
