#pragma once

#include <vector>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/parallel.hpp"

namespace tonelli {

struct ConjugateOptions {
  double step = 1e-3;
  double grazing_tol = 1e-10;
  /// Zeros are refined until the bracket is below dt times this factor.
  double refine_frac = 1e-3;
  bool use_exact = true;
};

/// Scan record for conjugate points along an orbit: parameter values t in
/// (0, T] where the flowed vertical subspace meets the vertical again,
/// detected as zeros of the determinant of the base block of Dphi_t applied
/// to a vertical frame. The reported determinant trace uses unit-normalized
/// frame columns, so its values are scale-free and its zeros are exactly the
/// conjugate parameters.
struct ConjugateReport {
  double horizon = 0.0;
  std::vector<double> zeros;
  /// Sub-tolerance minima of |det| without a sign change (tangencies).
  std::vector<double> grazing;
  std::vector<double> sample_times;
  std::vector<double> dets;
  std::vector<std::string> warnings;
};

ConjugateReport conjugate_scan(const HamiltonianSpec& H, const PhasePoint& x0, double T,
                               double dt, const ConjugateOptions& opts = {});

/// Independent sweep over many orbits.
std::vector<ConjugateReport> conjugate_scan_batch(const HamiltonianSpec& H,
                                                  const std::vector<PhasePoint>& x0s, double T,
                                                  double dt, const ConjugateOptions& opts = {},
                                                  ExecPolicy policy = ExecPolicy::OpenMP);

}  // namespace tonelli
