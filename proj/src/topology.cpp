#include "tonelli/topology.hpp"

#include <algorithm>
#include <cmath>

namespace tonelli {

GraphTestResult graph_test(const ParamSubmanifold& m, const GraphTestOptions& opts,
                           ExecPolicy policy) {
  if (m.param_dim != m.ambient_dim)
    throw Error("graph_test: parameter and base dimensions must agree");
  GraphTestResult res;

  std::vector<Vec> nodes = m.grid_points();
  long n = static_cast<long>(nodes.size());
  std::vector<PhasePoint> images(n);
  std::vector<double> jac_scale(n, 0.0);
  std::vector<char> rank_def(n, 0);
  for_each_index(policy, n, [&](long i) {
    images[i] = m.embed(nodes[i]);
    Mat J = m.jacobian_at(nodes[i]);
    for (Eigen::Index c = 0; c < J.cols(); ++c)
      jac_scale[i] = std::max(jac_scale[i], J.col(c).norm());
    Mat base = J.topRows(m.ambient_dim);
    Eigen::JacobiSVD<Mat> svd(base);
    const Vec& s = svd.singularValues();
    if (s(0) == 0.0 || s(s.size() - 1) <= opts.rank_tol * s(0)) rank_def[i] = 1;
  });

  double lip = 0.0;
  for (long i = 0; i < n; ++i) lip = std::max(lip, jac_scale[i]);
  for (long i = 0; i < n; ++i)
    if (rank_def[i]) {
      res.base_rank_deficient = true;
      res.warnings.push_back("graph_test: base projection rank-deficient at a grid node (fold)");
      break;
    }

  double spacing = 0.0;
  for (int r : m.grid_resolution) spacing = std::max(spacing, 1.0 / r);
  double base_thr = opts.collision_frac * spacing;
  double fiber_thr = opts.separation_frac * lip * spacing;

  // bucket by base point only; fibers are compared within neighborhoods
  int cells = std::max(4, static_cast<int>(std::floor(1.0 / std::max(base_thr, 1e-6))));
  cells = std::min(cells, 64);
  int d = m.ambient_dim;
  long nbuckets = 1;
  for (int i = 0; i < d; ++i) nbuckets *= cells;
  std::vector<std::vector<int>> buckets(nbuckets);
  for (long i = 0; i < n; ++i) {
    long b = 0;
    for (int k = 0; k < d; ++k) {
      int c = std::clamp(static_cast<int>(std::floor(wrap_coord(images[i].q[k]) * cells)), 0,
                         cells - 1);
      b = b * cells + c;
    }
    buckets[b].push_back(static_cast<int>(i));
  }

  double best_sep = 0.0;
  std::vector<int> off(d, 0);
  for (long b = 0; b < nbuckets; ++b) {
    if (buckets[b].empty()) continue;
    std::vector<int> cell(d);
    long rest = b;
    for (int i = d - 1; i >= 0; --i) {
      cell[i] = static_cast<int>(rest % cells);
      rest /= cells;
    }
    std::vector<long> neigh;
    std::fill(off.begin(), off.end(), -1);
    while (true) {
      long nb = 0;
      for (int i = 0; i < d; ++i) {
        int c = ((cell[i] + off[i]) % cells + cells) % cells;
        nb = nb * cells + c;
      }
      if (nb >= b && std::find(neigh.begin(), neigh.end(), nb) == neigh.end()) neigh.push_back(nb);
      int a = d - 1;
      while (a >= 0 && off[a] == 1) off[a--] = -1;
      if (a < 0) break;
      ++off[a];
    }
    for (long nb : neigh)
      for (int i : buckets[b])
        for (int j : buckets[nb]) {
          if (nb == b && j <= i) continue;
          double bd = torus_dist(images[i].q, images[j].q);
          if (bd >= base_thr) continue;
          double fd = (images[i].p - images[j].p).norm();
          if (fd > fiber_thr && fd > best_sep) {
            best_sep = fd;
            res.is_graph = false;
            GraphWitness w;
            w.theta_a = nodes[i];
            w.theta_b = nodes[j];
            w.base_dist = bd;
            w.fiber_dist = fd;
            res.witness = w;
          }
        }
  }
  return res;
}

WindingResult homotopy_degree(const ParamSubmanifold& m, const WindingOptions& opts) {
  WindingResult res;
  res.winding = Eigen::MatrixXi::Zero(m.param_dim, m.ambient_dim);
  Vec origin(m.param_dim);
  for (int a = 0; a < m.param_dim; ++a) {
    int r = static_cast<int>(m.grid_resolution.size()) == m.param_dim ? m.grid_resolution[a] : 1;
    origin[a] = m.grid_offset / std::max(1, r);
  }

  for (int a = 0; a < m.param_dim; ++a) {
    Vec acc = Vec::Zero(m.ambient_dim);
    bool circle_ok = true;
    Vec prev_q = m.embed(origin).q;
    for (int k = 1; k <= opts.resolution; ++k) {
      Vec theta = origin;
      theta[a] += static_cast<double>(k) / opts.resolution;
      Vec q = m.embed(theta).q;
      Vec step = torus_deltas(q, prev_q);
      if (step.cwiseAbs().maxCoeff() >= opts.step_guard) {
        res.failures.push_back("homotopy_degree: ambiguous lift on parameter circle " +
                               std::to_string(a) + " (increase resolution)");
        res.ok = false;
        circle_ok = false;
        break;
      }
      acc += step;
      prev_q = q;
    }
    if (!circle_ok) continue;
    for (int b = 0; b < m.ambient_dim; ++b) {
      double w = acc[b];
      long rounded = std::lround(w);
      if (std::abs(w - static_cast<double>(rounded)) > 1e-6) {
        res.failures.push_back("homotopy_degree: non-integer winding on circle " +
                               std::to_string(a));
        res.ok = false;
      }
      res.winding(a, b) = static_cast<int>(rounded);
    }
  }
  return res;
}

double stokes_check(const std::function<PhasePoint(double, double)>& surface, int res_a, int res_b,
                    double extent_a, double extent_b,
                    const std::function<Mat(double, double)>* jacobian) {
  if (res_a < 2 || res_b < 2) throw Error("stokes_check: resolution too small");
  bool closed_a = extent_a == 1.0;
  bool closed_b = extent_b == 1.0;
  int na = closed_a ? res_a : res_a + 1;
  int nb = closed_b ? res_b : res_b + 1;
  double ha = extent_a / res_a;
  double hb = extent_b / res_b;
  const double fd = 1e-5;

  auto tangents = [&](double s, double t) -> Mat {
    if (jacobian && *jacobian) return (*jacobian)(s, t);
    PhasePoint xa_p = surface(s + fd, t), xa_m = surface(s - fd, t);
    PhasePoint xb_p = surface(s, t + fd), xb_m = surface(s, t - fd);
    int d = xa_p.dim();
    Mat T(2 * d, 2);
    T.col(0).head(d) = torus_deltas(xa_p.q, xa_m.q) / (2 * fd);
    T.col(0).tail(d) = (xa_p.p - xa_m.p) / (2 * fd);
    T.col(1).head(d) = torus_deltas(xb_p.q, xb_m.q) / (2 * fd);
    T.col(1).tail(d) = (xb_p.p - xb_m.p) / (2 * fd);
    return T;
  };

  double total = 0.0;
  for (int i = 0; i < na; ++i) {
    double wa = (!closed_a && (i == 0 || i == na - 1)) ? 0.5 : 1.0;
    for (int j = 0; j < nb; ++j) {
      double wb = (!closed_b && (j == 0 || j == nb - 1)) ? 0.5 : 1.0;
      double s = i * ha;
      double t = j * hb;
      Mat T = tangents(s, t);
      int d = static_cast<int>(T.rows()) / 2;
      TangentVector u(T.col(0).head(d), T.col(0).tail(d));
      TangentVector v(T.col(1).head(d), T.col(1).tail(d));
      total += wa * wb * omega(u, v);
    }
  }
  return total * ha * hb;
}

}  // namespace tonelli
