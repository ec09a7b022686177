#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tonelli {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Wrap a single angular coordinate into [0,1).
double wrap_coord(double x);

/// Wrap every component into [0,1).
Vec wrap_torus(Vec q);

/// Shortest signed representative of a-b on the circle, in [-1/2, 1/2).
double torus_delta(double a, double b);

/// Componentwise shortest signed difference a-b.
Vec torus_deltas(const Vec& a, const Vec& b);

/// Euclidean length of the componentwise shortest difference.
double torus_dist(const Vec& a, const Vec& b);

/// Point of the cotangent bundle of the d-torus. Base coordinates live in
/// [0,1); fiber coordinates are unconstrained.
struct PhasePoint {
  Vec q;
  Vec p;

  PhasePoint() = default;
  PhasePoint(Vec q_in, Vec p_in);

  int dim() const { return static_cast<int>(q.size()); }
};

/// Distance combining the flat torus metric on the base with the Euclidean
/// metric on the fiber.
double phase_dist(const PhasePoint& a, const PhasePoint& b);

/// Tangent vector at a phase-space point, split into base and fiber parts.
struct TangentVector {
  Vec dq;
  Vec dp;

  TangentVector() = default;
  TangentVector(Vec dq_in, Vec dp_in);

  int dim() const { return static_cast<int>(dq.size()); }

  /// Stack (dq, dp) into one 2d-vector.
  Vec stacked() const;
  static TangentVector from_stacked(const Vec& v);
};

/// Canonical symplectic pairing: omega(v, w) = dq(v).dp(w) - dq(w).dp(v).
double omega(const TangentVector& v, const TangentVector& w);

/// Liouville one-form p.dq evaluated on a tangent vector at x.
double liouville(const PhasePoint& x, const TangentVector& v);

/// 2d x 2d matrix of the canonical form in (dq, dp) block coordinates.
Mat omega_matrix(int dim);

}  // namespace tonelli
