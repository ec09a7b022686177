#pragma once

#include "tonelli/manifold.hpp"

namespace tonelli {

struct GraphTestOptions {
  /// Base points closer than this fraction of the coarsest base grid spacing
  /// count as a collision candidate.
  double collision_frac = 0.45;
  /// Fibers over a collision further apart than this times the embedding
  /// Lipschitz scale mark a genuine two-sheet witness.
  double separation_frac = 2.5;
  double rank_tol = 1e-8;
};

struct GraphWitness {
  Vec theta_a;
  Vec theta_b;
  double base_dist = 0.0;
  double fiber_dist = 0.0;
};

struct GraphTestResult {
  bool is_graph = true;
  /// Base projection rank-deficient somewhere (fold), detected via the
  /// Jacobian base block.
  bool base_rank_deficient = false;
  std::optional<GraphWitness> witness;
  std::vector<std::string> warnings;
};

/// Decide whether the embedded manifold is a graph over the base torus:
/// scan grid images for distinct parameters with nearly equal base points
/// and clearly separated fibers, and check the base-projection rank of the
/// Jacobian at every node. Requires param_dim == ambient_dim.
GraphTestResult graph_test(const ParamSubmanifold& m, const GraphTestOptions& opts = {},
                           ExecPolicy policy = ExecPolicy::OpenMP);

struct WindingOptions {
  int resolution = 256;
  /// A lifted per-step increment at or above this aborts the circle (the
  /// winding would be ambiguous at this resolution).
  double step_guard = 0.25;
};

struct WindingResult {
  /// Entry (a, b): winding number of base coordinate b of the embedding
  /// along parameter circle a (other parameters held at the grid origin).
  Eigen::MatrixXi winding;
  bool ok = true;
  std::vector<std::string> failures;
};

/// Homotopy-class marker of the base projection: the integer winding matrix.
/// For a graph, the identity matrix is the zero-section marker.
WindingResult homotopy_degree(const ParamSubmanifold& m, const WindingOptions& opts = {});

/// Integral of the canonical form over a 2-parameter surface patch, composite
/// trapezoid on a uniform parameter grid; extents of 1 with wrap give the
/// closed-surface case (spectrally accurate there). Derivatives of the patch
/// are taken by central differences when no Jacobian is supplied.
double stokes_check(const std::function<PhasePoint(double, double)>& surface, int res_a, int res_b,
                    double extent_a = 1.0, double extent_b = 1.0,
                    const std::function<Mat(double, double)>* jacobian = nullptr);

}  // namespace tonelli
