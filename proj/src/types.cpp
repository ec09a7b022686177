#include "tonelli/types.hpp"

#include <cmath>

namespace tonelli {

double wrap_coord(double x) {
  double y = x - std::floor(x);
  // floor can round y up to 1.0 for tiny negative x
  if (y >= 1.0) y -= 1.0;
  return y;
}

Vec wrap_torus(Vec q) {
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = wrap_coord(q[i]);
  return q;
}

double torus_delta(double a, double b) {
  double d = wrap_coord(a - b);
  if (d >= 0.5) d -= 1.0;
  return d;
}

Vec torus_deltas(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw Error("torus_deltas: dimension mismatch");
  Vec d(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) d[i] = torus_delta(a[i], b[i]);
  return d;
}

double torus_dist(const Vec& a, const Vec& b) {
  return torus_deltas(a, b).norm();
}

PhasePoint::PhasePoint(Vec q_in, Vec p_in) : q(wrap_torus(std::move(q_in))), p(std::move(p_in)) {
  if (q.size() != p.size()) throw Error("PhasePoint: base and fiber dimensions differ");
}

double phase_dist(const PhasePoint& a, const PhasePoint& b) {
  if (a.dim() != b.dim()) throw Error("phase_dist: dimension mismatch");
  double dq2 = torus_deltas(a.q, b.q).squaredNorm();
  double dp2 = (a.p - b.p).squaredNorm();
  return std::sqrt(dq2 + dp2);
}

TangentVector::TangentVector(Vec dq_in, Vec dp_in) : dq(std::move(dq_in)), dp(std::move(dp_in)) {
  if (dq.size() != dp.size()) throw Error("TangentVector: base and fiber dimensions differ");
}

Vec TangentVector::stacked() const {
  Vec v(2 * dim());
  v.head(dim()) = dq;
  v.tail(dim()) = dp;
  return v;
}

TangentVector TangentVector::from_stacked(const Vec& v) {
  if (v.size() % 2 != 0) throw Error("TangentVector: stacked vector has odd length");
  Eigen::Index d = v.size() / 2;
  return TangentVector(v.head(d), v.tail(d));
}

double omega(const TangentVector& v, const TangentVector& w) {
  if (v.dim() != w.dim()) throw Error("omega: dimension mismatch");
  return v.dq.dot(w.dp) - w.dq.dot(v.dp);
}

double liouville(const PhasePoint& x, const TangentVector& v) {
  if (x.dim() != v.dim()) throw Error("liouville: dimension mismatch");
  return x.p.dot(v.dq);
}

Mat omega_matrix(int dim) {
  Mat J = Mat::Zero(2 * dim, 2 * dim);
  J.topRightCorner(dim, dim) = Mat::Identity(dim, dim);
  J.bottomLeftCorner(dim, dim) = -Mat::Identity(dim, dim);
  return J;
}

}  // namespace tonelli
