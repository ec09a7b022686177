#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "tonelli/hamiltonian.hpp"
#include "tonelli/integrate.hpp"
#include "tonelli/parallel.hpp"
#include "tonelli/symplectic.hpp"

namespace tonelli {

/// Immersed submanifold of phase space given by a parametrization over a
/// parameter torus. Parameters are 1-periodic in every component. When no
/// analytic Jacobian is supplied, a central finite difference of the
/// embedding (step 1e-5, torus-aware in the base) is used.
struct ParamSubmanifold {
  std::string name;
  int param_dim = 0;
  int ambient_dim = 0;
  std::function<PhasePoint(const Vec&)> embed;
  std::function<Mat(const Vec&)> jacobian;  // 2*ambient_dim x param_dim
  std::vector<int> grid_resolution;
  /// Grid nodes sit at (i + grid_offset) / resolution along each axis.
  double grid_offset = 0.0;
  double embed_tol = 1e-8;

  Mat jacobian_at(const Vec& theta) const;
  std::vector<Vec> grid_points() const;
  Vec grid_theta(const std::vector<int>& idx) const;
};

/// Central finite-difference Jacobian of the embedding.
Mat fd_jacobian(const ParamSubmanifold& m, const Vec& theta, double h = 1e-5);

struct AnalyzeOptions {
  double rank_tol = 1e-8;
  /// Checked against the frame singular-value ratio at every node.
  double immersion_tol = 1e-10;
  bool check_injectivity = true;
};

struct GridPointAnalysis {
  Vec theta;
  int kernel_dim = 0;
  /// Kernel coefficients in the coordinate frame basis (param_dim x kernel_dim).
  Mat kernel_coeffs;
  double defect = 0.0;      // frame-independent (orthonormalized) value
  double defect_raw = 0.0;  // value on the coordinate frame as given
  double vertical_angle = 0.0;
};

struct GridAnalysis {
  std::vector<GridPointAnalysis> points;
  std::map<int, int> kernel_histogram;
  bool rank_constant = true;
  double max_defect = 0.0;
  double min_defect = 0.0;
  std::vector<std::string> warnings;
};

/// Pointwise symplectic analysis over the parameter grid: restricted form,
/// kernel, isotropy defect, vertical angle. Errors on immersion failure or
/// (optionally) on two distinct grid parameters mapping to the same phase
/// point within embed_tol.
GridAnalysis analyze_grid(const ParamSubmanifold& m, const AnalyzeOptions& opts = {},
                          ExecPolicy policy = ExecPolicy::OpenMP);

/// Spatial hash over phase points for nearest-sample seeding.
class PhasePointIndex {
 public:
  PhasePointIndex(std::vector<PhasePoint> points, std::vector<Vec> params, int cells_per_axis);
  /// Index of the stored point nearest to x in phase distance.
  int nearest(const PhasePoint& x) const;
  /// Pairs of distinct stored points within tol of each other in phase
  /// distance (bucket-neighborhood scan; tol must be below one cell width).
  std::vector<std::pair<int, int>> collisions(double tol) const;
  const PhasePoint& point(int i) const { return points_[i]; }
  const Vec& param(int i) const { return params_[i]; }
  int size() const { return static_cast<int>(points_.size()); }

 private:
  std::vector<PhasePoint> points_;
  std::vector<Vec> params_;
  int cells_ = 1;
  int dim_ = 0;
  std::vector<std::vector<int>> buckets_;
  int bucket_of(const Vec& q) const;
};

struct InvarianceOptions {
  /// Evaluate the flow at most at this many grid seeds (regular stride).
  int max_seeds = 1000;
  FlowOptions flow;
  /// Gauss-Newton refinement of the nearest-parameter problem.
  int refine_iters = 20;
  double refine_tol = 1e-10;
};

struct InvarianceResult {
  double max_deviation = 0.0;
  Vec worst_theta;
  double worst_time = 0.0;
  int refine_failures = 0;
  std::vector<std::string> warnings;
};

/// Sup over seeds and times of the distance from the flowed sample to the
/// manifold (nearest grid image, Gauss-Newton refined in parameter space).
InvarianceResult invariance_check(const HamiltonianSpec& H, const ParamSubmanifold& m,
                                  const std::vector<double>& times,
                                  const InvarianceOptions& opts = {},
                                  ExecPolicy policy = ExecPolicy::OpenMP);

/// Distance from x to the manifold: nearest-node seed plus Gauss-Newton in
/// parameter space. Returns the refined distance and parameter.
std::pair<double, Vec> manifold_distance(const ParamSubmanifold& m, const PhasePointIndex& index,
                                         const PhasePoint& x, int refine_iters = 20,
                                         double refine_tol = 1e-10, bool* converged = nullptr);

/// Build the index over the manifold grid images.
PhasePointIndex build_grid_index(const ParamSubmanifold& m);

/// Flows both points of random nearby parameter pairs by t and returns the
/// largest ratio of the flowed phase distance to the initial one: a
/// finite-horizon Lipschitz-constant estimate, never an equilipschitz
/// decision. Uses the exact flow when the Hamiltonian provides one.
double lipschitz_sample(const HamiltonianSpec& H, const ParamSubmanifold& m, double t,
                        int n_pairs, double pair_spread = 1e-3, unsigned seed = 12345,
                        ExecPolicy policy = ExecPolicy::OpenMP);

}  // namespace tonelli
