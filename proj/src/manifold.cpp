#include "tonelli/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "tonelli/integrate.hpp"

namespace tonelli {

Mat ParamSubmanifold::jacobian_at(const Vec& theta) const {
  if (jacobian) return jacobian(theta);
  return fd_jacobian(*this, theta);
}

Mat fd_jacobian(const ParamSubmanifold& m, const Vec& theta, double h) {
  int d = m.ambient_dim;
  Mat J(2 * d, m.param_dim);
  for (int i = 0; i < m.param_dim; ++i) {
    Vec tp = theta, tm = theta;
    tp[i] += h;
    tm[i] -= h;
    PhasePoint xp = m.embed(tp);
    PhasePoint xm = m.embed(tm);
    J.col(i).head(d) = torus_deltas(xp.q, xm.q) / (2 * h);
    J.col(i).tail(d) = (xp.p - xm.p) / (2 * h);
  }
  return J;
}

Vec ParamSubmanifold::grid_theta(const std::vector<int>& idx) const {
  Vec theta(param_dim);
  for (int a = 0; a < param_dim; ++a)
    theta[a] = (static_cast<double>(idx[a]) + grid_offset) / grid_resolution[a];
  return theta;
}

std::vector<Vec> ParamSubmanifold::grid_points() const {
  if (static_cast<int>(grid_resolution.size()) != param_dim)
    throw Error("ParamSubmanifold '" + name + "': grid resolution rank mismatch");
  long total = 1;
  for (int r : grid_resolution) {
    if (r < 1) throw Error("ParamSubmanifold: nonpositive grid resolution");
    total *= r;
  }
  std::vector<Vec> nodes;
  nodes.reserve(total);
  std::vector<int> idx(param_dim, 0);
  for (long n = 0; n < total; ++n) {
    nodes.push_back(grid_theta(idx));
    for (int a = param_dim - 1; a >= 0; --a) {
      if (++idx[a] < grid_resolution[a]) break;
      idx[a] = 0;
    }
  }
  return nodes;
}

PhasePointIndex::PhasePointIndex(std::vector<PhasePoint> points, std::vector<Vec> params,
                                 int cells_per_axis)
    : points_(std::move(points)), params_(std::move(params)), cells_(std::max(1, cells_per_axis)) {
  if (points_.empty()) throw Error("PhasePointIndex: no points");
  dim_ = points_.front().dim();
  long nbuckets = 1;
  for (int i = 0; i < dim_; ++i) nbuckets *= cells_;
  buckets_.resize(nbuckets);
  for (size_t i = 0; i < points_.size(); ++i)
    buckets_[bucket_of(points_[i].q)].push_back(static_cast<int>(i));
}

int PhasePointIndex::bucket_of(const Vec& q) const {
  int b = 0;
  for (int i = 0; i < dim_; ++i) {
    int c = static_cast<int>(std::floor(wrap_coord(q[i]) * cells_));
    c = std::clamp(c, 0, cells_ - 1);
    b = b * cells_ + c;
  }
  return b;
}

int PhasePointIndex::nearest(const PhasePoint& x) const {
  std::vector<int> cell(dim_);
  for (int i = 0; i < dim_; ++i) {
    int c = static_cast<int>(std::floor(wrap_coord(x.q[i]) * cells_));
    cell[i] = std::clamp(c, 0, cells_ - 1);
  }
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  int max_r = cells_ / 2 + 1;
  std::vector<int> off(dim_, 0);
  for (int r = 0; r <= max_r; ++r) {
    // phase distance dominates base distance, so any point in a deeper shell
    // is at least r / cells_ away and the current best cannot be beaten
    if (best >= 0 && best_dist <= static_cast<double>(r) / cells_) break;
    std::fill(off.begin(), off.end(), -r);
    while (true) {
      int cheb = 0;
      for (int i = 0; i < dim_; ++i) cheb = std::max(cheb, std::abs(off[i]));
      if (cheb == r) {
        int b = 0;
        for (int i = 0; i < dim_; ++i) {
          int c = ((cell[i] + off[i]) % cells_ + cells_) % cells_;
          b = b * cells_ + c;
        }
        for (int j : buckets_[b]) {
          double dist = phase_dist(points_[j], x);
          if (dist < best_dist) {
            best_dist = dist;
            best = j;
          }
        }
      }
      int a = dim_ - 1;
      while (a >= 0 && off[a] == r) off[a--] = -r;
      if (a < 0) break;
      ++off[a];
    }
    if (2 * r >= cells_) {
      // shells have wrapped all the way around; everything was scanned
      if (best >= 0) break;
    }
  }
  return best;
}

std::vector<std::pair<int, int>> PhasePointIndex::collisions(double tol) const {
  std::vector<std::pair<int, int>> found;
  std::vector<int> off(dim_, 0);
  long nb = static_cast<long>(buckets_.size());
  for (long b = 0; b < nb; ++b) {
    // decode bucket index into per-axis cells
    std::vector<int> cell(dim_);
    long rest = b;
    for (int i = dim_ - 1; i >= 0; --i) {
      cell[i] = static_cast<int>(rest % cells_);
      rest /= cells_;
    }
    std::set<int> neighbors;
    std::fill(off.begin(), off.end(), -1);
    while (true) {
      int nb_idx = 0;
      for (int i = 0; i < dim_; ++i) {
        int c = ((cell[i] + off[i]) % cells_ + cells_) % cells_;
        nb_idx = nb_idx * cells_ + c;
      }
      if (nb_idx >= static_cast<int>(b)) neighbors.insert(nb_idx);
      int a = dim_ - 1;
      while (a >= 0 && off[a] == 1) off[a--] = -1;
      if (a < 0) break;
      ++off[a];
    }
    for (int nb_idx : neighbors)
      for (int i : buckets_[b])
        for (int j : buckets_[nb_idx]) {
          if (nb_idx == static_cast<int>(b) && j <= i) continue;
          if (phase_dist(points_[i], points_[j]) <= tol) found.emplace_back(i, j);
        }
  }
  return found;
}

PhasePointIndex build_grid_index(const ParamSubmanifold& m) {
  std::vector<Vec> nodes = m.grid_points();
  std::vector<PhasePoint> images(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) images[i] = m.embed(nodes[i]);
  double per_axis = std::pow(static_cast<double>(nodes.size()), 1.0 / m.ambient_dim);
  int cells = std::max(4, static_cast<int>(std::lround(per_axis / 2.0)));
  return PhasePointIndex(std::move(images), std::move(nodes), cells);
}

GridAnalysis analyze_grid(const ParamSubmanifold& m, const AnalyzeOptions& opts,
                          ExecPolicy policy) {
  std::vector<Vec> nodes = m.grid_points();
  long n = static_cast<long>(nodes.size());
  GridAnalysis out;
  out.points.resize(n);
  std::vector<std::vector<std::string>> warn(n);

  for_each_index(policy, n, [&](long i) {
    GridPointAnalysis& pt = out.points[i];
    pt.theta = nodes[i];
    SubspaceFrame frame(m.jacobian_at(nodes[i]));
    if (frame.rank_ratio() <= opts.immersion_tol)
      throw Error("analyze_grid: immersion failure (rank-deficient frame) at a grid node of '" +
                  m.name + "'");
    Mat form = restricted_form(frame);
    // A form at rounding level relative to the frame scale is the zero form;
    // the form-relative SVD split would manufacture rank out of noise there.
    double fscale = frame.cols.colwise().norm().maxCoeff();
    KernelInfo ker;
    if (form.cwiseAbs().maxCoeff() <= opts.rank_tol * fscale * fscale) {
      ker.dim = static_cast<int>(form.rows());
      ker.basis = Mat::Identity(form.rows(), form.cols());
    } else {
      ker = form_kernel(form, opts.rank_tol);
    }
    pt.kernel_dim = ker.dim;
    pt.kernel_coeffs = ker.basis;
    pt.defect = lagrangian_defect(frame, true);
    pt.defect_raw = lagrangian_defect(frame, false);
    pt.vertical_angle = vertical_angle(frame);
    warn[i] = std::move(ker.warnings);
  });

  out.min_defect = out.points.front().defect;
  for (const auto& pt : out.points) {
    out.kernel_histogram[pt.kernel_dim]++;
    out.max_defect = std::max(out.max_defect, pt.defect);
    out.min_defect = std::min(out.min_defect, pt.defect);
  }
  out.rank_constant = out.kernel_histogram.size() == 1;
  if (!out.rank_constant)
    out.warnings.push_back("analyze_grid: kernel dimension not constant across the grid");
  for (auto& w : warn)
    for (auto& s : w) out.warnings.push_back(std::move(s));

  if (opts.check_injectivity) {
    // distinct nodes mapping to the same image defeat every nearest-sample
    // seed downstream, so this is an error, not a warning
    PhasePointIndex index = build_grid_index(m);
    auto coll = index.collisions(m.embed_tol);
    if (!coll.empty())
      throw Error("analyze_grid: embedding not injective on the grid of '" + m.name + "' (" +
                  std::to_string(coll.size()) + " coincident image pairs)");
  }
  return out;
}

std::pair<double, Vec> manifold_distance(const ParamSubmanifold& m, const PhasePointIndex& index,
                                         const PhasePoint& x, int refine_iters, double refine_tol,
                                         bool* converged) {
  int seed = index.nearest(x);
  Vec theta = index.param(seed);
  auto residual = [&](const Vec& th) {
    PhasePoint y = m.embed(th);
    Vec r(2 * m.ambient_dim);
    r.head(m.ambient_dim) = torus_deltas(y.q, x.q);
    r.tail(m.ambient_dim) = y.p - x.p;
    return r;
  };
  Vec r = residual(theta);
  double dist = r.norm();
  bool ok = false;
  for (int it = 0; it < refine_iters; ++it) {
    Mat J = m.jacobian_at(theta);
    Vec step = (J.transpose() * J).ldlt().solve(-J.transpose() * r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool improved = false;
    for (int cut = 0; cut < 20; ++cut) {
      Vec trial = theta + lambda * step;
      Vec rt = residual(trial);
      if (rt.norm() < dist) {
        theta = trial;
        r = rt;
        dist = rt.norm();
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved || step.norm() * lambda <= refine_tol) {
      ok = improved || step.norm() <= refine_tol || dist <= refine_tol;
      break;
    }
  }
  if (converged) *converged = ok || dist <= refine_tol;
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = wrap_coord(theta[i]);
  return {dist, theta};
}

InvarianceResult invariance_check(const HamiltonianSpec& H, const ParamSubmanifold& m,
                                  const std::vector<double>& times, const InvarianceOptions& opts,
                                  ExecPolicy policy) {
  if (times.empty()) throw Error("invariance_check: empty time list");
  std::vector<Vec> nodes = m.grid_points();
  long stride = std::max<long>(1, static_cast<long>(nodes.size()) / opts.max_seeds);
  std::vector<Vec> seeds;
  for (size_t i = 0; i < nodes.size(); i += stride) seeds.push_back(nodes[i]);

  PhasePointIndex index = build_grid_index(m);
  std::vector<double> sorted_times = times;
  std::sort(sorted_times.begin(), sorted_times.end());
  if (sorted_times.front() <= 0.0)
    throw Error("invariance_check: times must be positive");

  long n = static_cast<long>(seeds.size());
  std::vector<double> dev(n, 0.0);
  std::vector<double> dev_t(n, 0.0);
  std::vector<int> fails(n, 0);

  bool exact = opts.flow.use_exact && H.exact_flow;
  for_each_index(policy, n, [&](long i) {
    PhasePoint x0 = m.embed(seeds[i]);
    if (exact) {
      for (double t : sorted_times) {
        PhasePoint xt = H.exact_flow(x0, t);
        bool conv = false;
        auto [dist, th] = manifold_distance(m, index, xt, opts.refine_iters, opts.refine_tol, &conv);
        (void)th;
        if (!conv) fails[i]++;
        if (dist > dev[i]) {
          dev[i] = dist;
          dev_t[i] = t;
        }
      }
    } else {
      Stepper s(H, x0);
      for (double t : sorted_times) {
        s.advance(t - s.time(), opts.flow.step);
        bool conv = false;
        auto [dist, th] =
            manifold_distance(m, index, s.state(), opts.refine_iters, opts.refine_tol, &conv);
        (void)th;
        if (!conv) fails[i]++;
        if (dist > dev[i]) {
          dev[i] = dist;
          dev_t[i] = t;
        }
      }
    }
  });

  InvarianceResult res;
  res.worst_theta = seeds.empty() ? Vec() : seeds.front();
  for (long i = 0; i < n; ++i) {
    res.refine_failures += fails[i];
    if (dev[i] >= res.max_deviation) {
      res.max_deviation = dev[i];
      res.worst_theta = seeds[i];
      res.worst_time = dev_t[i];
    }
  }
  if (res.refine_failures > 0)
    res.warnings.push_back("invariance_check: " + std::to_string(res.refine_failures) +
                           " refinement failures (deviation uses best point found)");
  return res;
}

double lipschitz_sample(const HamiltonianSpec& H, const ParamSubmanifold& m, double t,
                        int n_pairs, double pair_spread, unsigned seed, ExecPolicy policy) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> du(-pair_spread, pair_spread);
  std::vector<std::pair<Vec, Vec>> pairs;
  pairs.reserve(n_pairs);
  for (int k = 0; k < n_pairs; ++k) {
    Vec a(m.param_dim), b(m.param_dim);
    for (int i = 0; i < m.param_dim; ++i) a[i] = u(rng);
    for (int i = 0; i < m.param_dim; ++i) b[i] = a[i] + du(rng);
    pairs.emplace_back(std::move(a), std::move(b));
  }
  FlowOptions fopts;
  fopts.use_exact = static_cast<bool>(H.exact_flow);
  auto endpoint = [&](const Vec& theta) {
    PhasePoint x = m.embed(theta);
    if (H.exact_flow) return H.exact_flow(x, t);
    Trajectory tr = flow(H, x, t, fopts);
    return tr.states.back();
  };
  std::vector<double> ratio(n_pairs, 0.0);
  for_each_index(policy, n_pairs, [&](long k) {
    const auto& [a, b] = pairs[k];
    double before = phase_dist(m.embed(a), m.embed(b));
    if (before < 1e-12) return;
    ratio[k] = phase_dist(endpoint(a), endpoint(b)) / before;
  });
  return *std::max_element(ratio.begin(), ratio.end());
}

}  // namespace tonelli
