#include "tonelli/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

namespace tonelli {

namespace {

struct KernelDirection {
  Vec coeffs;   // param_dim
  Vec ambient;  // 2 * ambient_dim, unit
};

KernelDirection kernel_direction(const ParamSubmanifold& m, const Vec& theta, double rank_tol) {
  Vec tw = theta;
  for (Eigen::Index i = 0; i < tw.size(); ++i) tw[i] = wrap_coord(tw[i]);
  Mat J = m.jacobian_at(tw);
  SubspaceFrame frame(J);
  Mat form = restricted_form(frame);
  KernelInfo ker = form_kernel(form, rank_tol);
  if (ker.dim != 1)
    throw Error("characteristic direction undefined: kernel dimension " +
                std::to_string(ker.dim) + " at a point of '" + m.name + "'");
  KernelDirection dir;
  dir.coeffs = ker.basis.col(0);
  Vec a = J * dir.coeffs;
  double n = a.norm();
  if (n == 0.0) throw Error("characteristic direction degenerate");
  dir.coeffs /= n;
  dir.ambient = a / n;
  return dir;
}

long flat_index(const std::vector<int>& idx, const std::vector<int>& shape) {
  long f = 0;
  for (size_t a = 0; a < shape.size(); ++a) f = f * shape[a] + idx[a];
  return f;
}

}  // namespace

CharacteristicField characteristic_field(const ParamSubmanifold& m,
                                         const CharacteristicOptions& opts, ExecPolicy policy) {
  CharacteristicField field;
  field.grid_shape = m.grid_resolution;
  field.thetas = m.grid_points();
  long n = static_cast<long>(field.thetas.size());
  field.coeffs.resize(n);
  field.ambient.resize(n);

  for_each_index(policy, n, [&](long i) {
    KernelDirection dir = kernel_direction(m, field.thetas[i], opts.rank_tol);
    field.coeffs[i] = std::move(dir.coeffs);
    field.ambient[i] = std::move(dir.ambient);
  });

  // breadth-first sign alignment over the grid graph (wrap neighbors)
  std::vector<int> sign(n, 0);
  std::vector<int> shape = m.grid_resolution;
  int rank = static_cast<int>(shape.size());
  std::queue<long> frontier;
  sign[0] = 1;
  frontier.push(0);
  std::vector<int> idx(rank);
  while (!frontier.empty()) {
    long cur = frontier.front();
    frontier.pop();
    long rest = cur;
    for (int a = rank - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % shape[a]);
      rest /= shape[a];
    }
    for (int a = 0; a < rank; ++a) {
      for (int step : {-1, 1}) {
        std::vector<int> nb = idx;
        nb[a] = (nb[a] + step + shape[a]) % shape[a];
        long j = flat_index(nb, shape);
        if (j == cur) continue;
        double dot = field.ambient[cur].dot(field.ambient[j]) * sign[cur] * (sign[j] == 0 ? 1 : sign[j]);
        if (sign[j] == 0) {
          // dot already carries sign[cur], so the aligning choice is its sign
          sign[j] = dot >= 0 ? 1 : -1;
          // re-evaluate the aligned angle for the continuity diagnostic
          double aligned = field.ambient[cur].dot(field.ambient[j]) * sign[cur] * sign[j];
          double ang = std::acos(std::clamp(aligned, -1.0, 1.0));
          field.max_neighbor_angle = std::max(field.max_neighbor_angle, ang);
          frontier.push(j);
        } else {
          if (dot < 0) {
            field.orientable = false;
          }
        }
      }
    }
  }
  for (long i = 0; i < n; ++i) {
    if (sign[i] < 0) {
      field.coeffs[i] = -field.coeffs[i];
      field.ambient[i] = -field.ambient[i];
    }
  }
  if (!field.orientable)
    field.warnings.push_back("characteristic_field: orientation conflict on a grid cycle");
  if (field.max_neighbor_angle > opts.continuity_angle)
    field.warnings.push_back("characteristic_field: neighboring directions differ by " +
                             std::to_string(field.max_neighbor_angle) +
                             " rad; grid may be too coarse");
  return field;
}

Vec characteristic_velocity(const ParamSubmanifold& m, const CharacteristicField& field,
                            const Vec& theta, const Vec* hint, double rank_tol) {
  KernelDirection dir = kernel_direction(m, theta, rank_tol);
  double orient;
  if (hint && hint->size() == dir.coeffs.size() && hint->norm() > 0) {
    Vec tw = theta;
    for (Eigen::Index i = 0; i < tw.size(); ++i) tw[i] = wrap_coord(tw[i]);
    Vec ambient_hint = m.jacobian_at(tw) * (*hint);
    orient = dir.ambient.dot(ambient_hint);
  } else {
    // align with the oriented grid field at the nearest node
    long best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < field.thetas.size(); ++i) {
      double d = torus_dist(field.thetas[i], theta);
      if (d < best_d) {
        best_d = d;
        best = static_cast<long>(i);
      }
    }
    orient = dir.ambient.dot(field.ambient[best]);
  }
  if (orient == 0.0)
    throw Error("characteristic_velocity: orientation hint orthogonal to the direction");
  return orient > 0 ? dir.coeffs : Vec(-dir.coeffs);
}

ParamField make_characteristic_flow_field(const ParamSubmanifold& m,
                                          const CharacteristicField& field, double rank_tol) {
  auto last = std::make_shared<Vec>();
  return [&m, &field, last, rank_tol](const Vec& theta) {
    const Vec* hint = last->size() > 0 ? last.get() : nullptr;
    Vec v = characteristic_velocity(m, field, theta, hint, rank_tol);
    *last = v;
    return v;
  };
}

ParamCurve characteristic_flow(const ParamField& field, const Vec& theta0, double t,
                               const CurveOptions& opts) {
  if (std::abs(t) > opts.max_horizon) throw Error("characteristic_flow: horizon exceeds cap");
  long n = t == 0.0 ? 0 : static_cast<long>(std::ceil(std::abs(t) / opts.step - 1e-12));
  double h = n > 0 ? t / static_cast<double>(n) : 0.0;
  long stride = opts.record_dt > 0 ? std::max(1L, std::lround(opts.record_dt / opts.step)) : 1;
  ParamCurve curve;
  curve.times.push_back(0.0);
  curve.thetas.push_back(theta0);
  Vec theta = theta0;
  for (long i = 1; i <= n; ++i) {
    Vec k1 = field(theta);
    Vec k2 = field(theta + 0.5 * h * k1);
    Vec k3 = field(theta + 0.5 * h * k2);
    Vec k4 = field(theta + h * k3);
    theta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (i % stride == 0 || i == n) {
      curve.times.push_back(h * static_cast<double>(i));
      curve.thetas.push_back(theta);
    }
  }
  return curve;
}

double leaf_fill_ratio(const ParamCurve& curve, int axis_a, int axis_b, int resolution) {
  std::vector<char> hit(static_cast<size_t>(resolution) * resolution, 0);
  for (const Vec& th : curve.thetas) {
    int a = std::clamp(static_cast<int>(std::floor(wrap_coord(th[axis_a]) * resolution)), 0,
                       resolution - 1);
    int b = std::clamp(static_cast<int>(std::floor(wrap_coord(th[axis_b]) * resolution)), 0,
                       resolution - 1);
    hit[static_cast<size_t>(a) * resolution + b] = 1;
  }
  long count = std::count(hit.begin(), hit.end(), char(1));
  return static_cast<double>(count) / (static_cast<double>(resolution) * resolution);
}

PeriodReport period_scan(const ParamField& field, const Vec& theta0, const PeriodOptions& opts) {
  PeriodReport rep;
  rep.theta0 = theta0;
  double h = opts.curve.step;
  long n = static_cast<long>(std::ceil(opts.horizon / h - 1e-12));
  Vec theta = theta0;
  bool left = false;
  double best_min = std::numeric_limits<double>::infinity();

  auto rk4 = [&](Vec th, double hh) {
    Vec k1 = field(th);
    Vec k2 = field(th + 0.5 * hh * k1);
    Vec k3 = field(th + 0.5 * hh * k2);
    Vec k4 = field(th + hh * k3);
    return Vec(th + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  auto dist_to_start = [&](const Vec& th) { return torus_dist(wrap_torus(th), wrap_torus(theta0)); };

  double d_prev2 = 0.0, d_prev = 0.0;
  Vec th_prev2 = theta, th_prev = theta;
  double t = 0.0;
  for (long i = 1; i <= n; ++i) {
    theta = rk4(theta, h);
    t = h * static_cast<double>(i);
    double d = dist_to_start(theta);
    if (d > opts.leave_radius) left = true;
    if (left) best_min = std::min(best_min, d);
    if (left && i >= 2 && d_prev <= d_prev2 && d_prev <= d && d_prev < opts.leave_radius / 2) {
      // candidate local minimum at t - h: ternary refinement on [t-2h, t]
      double lo = t - 2 * h, hi = t;
      const double t_base = lo;
      Vec base = th_prev2;
      auto dist_at = [&](double tt) {
        // integrate from the saved left endpoint in one substep
        return dist_to_start(rk4(base, tt - t_base));
      };
      for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (dist_at(m1) <= dist_at(m2))
          hi = m2;
        else
          lo = m1;
      }
      double t_star = 0.5 * (lo + hi);
      double d_star = dist_at(t_star);
      best_min = std::min(best_min, d_star);
      if (d_star < opts.close_tol) {
        rep.closed = true;
        rep.period = t_star;
        rep.closure_error = d_star;
        return rep;
      }
    }
    d_prev2 = d_prev;
    d_prev = d;
    th_prev2 = th_prev;
    th_prev = theta;
  }
  rep.closed = false;
  rep.closure_error = best_min;
  return rep;
}

Mat PhaseMap::jacobian_at(const PhasePoint& x, double fd_step) const {
  if (jacobian) return jacobian(x);
  int d = x.dim();
  Mat J(2 * d, 2 * d);
  for (int i = 0; i < 2 * d; ++i) {
    PhasePoint xp = x, xm = x;
    Vec& vp = i < d ? xp.q : xp.p;
    Vec& vm = i < d ? xm.q : xm.p;
    vp[i % d] += fd_step;
    vm[i % d] -= fd_step;
    PhasePoint yp = apply(xp);
    PhasePoint ym = apply(xm);
    J.col(i).head(d) = torus_deltas(yp.q, ym.q) / (2 * fd_step);
    J.col(i).tail(d) = (yp.p - ym.p) / (2 * fd_step);
  }
  return J;
}

CocycleResult cocycle_factor(const PhaseMap& f, const ParamSubmanifold& m,
                             const CharacteristicField& field, const Vec& theta,
                             const PhasePointIndex& index) {
  PhasePoint x = m.embed(theta);
  Vec c = characteristic_velocity(m, field, theta, nullptr);
  Vec a = m.jacobian_at(theta) * c;  // unit ambient direction
  PhasePoint y = f.apply(x);
  auto [dist, theta_img] = manifold_distance(m, index, y);
  if (dist > 1e-6)
    throw Error("cocycle_factor: map image leaves the submanifold (distance " +
                std::to_string(dist) + ")");
  Vec c_img = characteristic_velocity(m, field, theta_img, nullptr);
  Vec a_img = m.jacobian_at(theta_img) * c_img;
  Mat Df = f.jacobian_at(x);
  Vec v = Df * a;
  CocycleResult res;
  res.factor = v.dot(a_img);
  res.residual = (v - res.factor * a_img).norm();
  res.theta_image = theta_img;
  return res;
}

}  // namespace tonelli
