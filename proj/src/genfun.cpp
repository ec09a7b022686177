#include "tonelli/genfun.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

namespace tonelli {

double MollifierSpec::alpha(double t) const {
  double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  double c = plateau_value();
  if (a <= plateau) return c;
  double x = (a - plateau) / (1.0 - plateau);
  double s = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
  return c * (1.0 - s);
}

double MollifierSpec::alpha_prime(double t) const {
  double a = std::abs(t);
  if (a >= 1.0 || a <= plateau) return 0.0;
  double c = plateau_value();
  double x = (a - plateau) / (1.0 - plateau);
  double ds = 30.0 * x * x * (1.0 - x) * (1.0 - x) / (1.0 - plateau);
  return (t > 0 ? -1.0 : 1.0) * c * ds;
}

Mat BaseMap::dlift_at(const Vec& q, double fd_step) const {
  if (dlift) return dlift(q);
  Mat J(dim, dim);
  for (int j = 0; j < dim; ++j) {
    Vec qp = q, qm = q;
    qp[j] += fd_step;
    qm[j] -= fd_step;
    J.col(j) = (lift(qp) - lift(qm)) / (2 * fd_step);
  }
  return J;
}

BaseMapCloseness basemap_closeness(const BaseMap& f, int samples_per_axis) {
  BaseMapCloseness c;
  long total = 1;
  for (int i = 0; i < f.dim; ++i) total *= samples_per_axis;
  std::vector<int> idx(f.dim, 0);
  for (long n = 0; n < total; ++n) {
    Vec q(f.dim);
    for (int i = 0; i < f.dim; ++i) q[i] = static_cast<double>(idx[i]) / samples_per_axis;
    c.c0 = std::max(c.c0, (f.lift(q) - q).cwiseAbs().maxCoeff());
    Mat D = f.dlift_at(q);
    c.c1 = std::max(c.c1, (D - Mat::Identity(f.dim, f.dim)).cwiseAbs().maxCoeff());
    for (int a = f.dim - 1; a >= 0; --a) {
      if (++idx[a] < samples_per_axis) break;
      idx[a] = 0;
    }
  }
  return c;
}

double equivariance_defect(const BaseMap& f, int samples_per_axis) {
  double defect = 0.0;
  long total = 1;
  for (int i = 0; i < f.dim; ++i) total *= samples_per_axis;
  std::vector<int> idx(f.dim, 0);
  for (long n = 0; n < total; ++n) {
    Vec q(f.dim);
    for (int i = 0; i < f.dim; ++i) q[i] = static_cast<double>(idx[i]) / samples_per_axis;
    Vec base = f.lift(q);
    for (int k = 0; k < f.dim; ++k) {
      Vec shifted = q;
      shifted[k] += 1.0;
      Vec expect = base;
      expect[k] += 1.0;
      defect = std::max(defect, (f.lift(shifted) - expect).cwiseAbs().maxCoeff());
    }
    for (int a = f.dim - 1; a >= 0; --a) {
      if (++idx[a] < samples_per_axis) break;
      idx[a] = 0;
    }
  }
  return defect;
}

BaseMap make_identity_map(int dim) {
  BaseMap f;
  f.name = "identity";
  f.dim = dim;
  f.lift = [](const Vec& q) { return q; };
  f.dlift = [dim](const Vec&) { return Mat::Identity(dim, dim); };
  return f;
}

BaseMap make_translation_map(const Vec& c) {
  BaseMap f;
  f.name = "translation";
  f.dim = static_cast<int>(c.size());
  f.lift = [c](const Vec& q) { return Vec(q + c); };
  f.dlift = [d = f.dim](const Vec&) { return Mat::Identity(d, d); };
  return f;
}

BaseMap make_sine_map(int dim, double eps) {
  BaseMap f;
  f.name = "sine";
  f.dim = dim;
  const double twopi = 2.0 * M_PI;
  f.lift = [dim, eps, twopi](const Vec& q) {
    Vec y = q;
    for (int i = 0; i < dim; ++i) y[i] += eps / twopi * std::sin(twopi * q[(i + 1) % dim]);
    return y;
  };
  f.dlift = [dim, eps, twopi](const Vec& q) {
    Mat J = Mat::Identity(dim, dim);
    for (int i = 0; i < dim; ++i) J(i, (i + 1) % dim) += eps * std::cos(twopi * q[(i + 1) % dim]);
    return J;
  };
  return f;
}

namespace {

/// Periodic cubic spline on uniform nodes j/n; stores second derivatives.
struct PeriodicSpline {
  std::vector<double> y;
  std::vector<double> m;  // second derivatives at nodes
  int n = 0;

  explicit PeriodicSpline(const std::vector<double>& values) : y(values), n(static_cast<int>(values.size())) {
    if (n < 3) throw Error("periodic spline needs at least 3 nodes");
    double h = 1.0 / n;
    Mat A = Mat::Zero(n, n);
    Vec rhs(n);
    for (int j = 0; j < n; ++j) {
      A(j, (j - 1 + n) % n) += 1.0;
      A(j, j) += 4.0;
      A(j, (j + 1) % n) += 1.0;
      rhs[j] = 6.0 * (y[(j - 1 + n) % n] - 2.0 * y[j] + y[(j + 1) % n]) / (h * h);
    }
    Vec sol = A.partialPivLu().solve(rhs);
    m.assign(sol.data(), sol.data() + n);
  }

  double eval(double x) const {
    double xw = wrap_coord(x);
    double h = 1.0 / n;
    int j = std::min(n - 1, static_cast<int>(std::floor(xw * n)));
    double a = xw - j * h;
    double b = h - a;
    int j1 = (j + 1) % n;
    return (m[j] * b * b * b + m[j1] * a * a * a) / (6.0 * h) +
           (y[j] / h - m[j] * h / 6.0) * b + (y[j1] / h - m[j1] * h / 6.0) * a;
  }

  double deriv(double x) const {
    double xw = wrap_coord(x);
    double h = 1.0 / n;
    int j = std::min(n - 1, static_cast<int>(std::floor(xw * n)));
    double a = xw - j * h;
    double b = h - a;
    int j1 = (j + 1) % n;
    return (-m[j] * b * b + m[j1] * a * a) / (2.0 * h) - (y[j] / h - m[j] * h / 6.0) +
           (y[j1] / h - m[j1] * h / 6.0);
  }
};

}  // namespace

BaseMap make_tabulated_map(const std::vector<double>& displacement) {
  auto spline = std::make_shared<PeriodicSpline>(displacement);
  BaseMap f;
  f.name = "tabulated";
  f.dim = 1;
  f.lift = [spline](const Vec& q) {
    Vec y(1);
    y[0] = q[0] + spline->eval(q[0]);
    return y;
  };
  f.dlift = [spline](const Vec& q) {
    Mat J(1, 1);
    J(0, 0) = 1.0 + spline->deriv(q[0]);
    return J;
  };
  return f;
}

GeneratingFunction make_generating_function(BaseMap base, MollifierSpec mollifier,
                                            int order_per_panel) {
  GeneratingFunction gf;
  gf.base = std::move(base);
  gf.mollifier = mollifier;
  gf.order_per_panel = order_per_panel;
  PanelRule rule = panel_rule(mollifier.breakpoints(), order_per_panel);
  int per_axis = static_cast<int>(rule.nodes.size());
  double total = std::pow(static_cast<double>(per_axis), gf.base.dim);
  if (total > 2e6) throw Error("make_generating_function: tensor rule too large for dimension");
  long count = static_cast<long>(total);
  gf.nodes.reserve(count);
  gf.weights.reserve(count);
  std::vector<int> idx(gf.base.dim, 0);
  for (long n = 0; n < count; ++n) {
    Vec v(gf.base.dim);
    double w = 1.0;
    for (int i = 0; i < gf.base.dim; ++i) {
      v[i] = rule.nodes[idx[i]];
      w *= rule.weights[idx[i]] * mollifier.alpha(v[i]);
    }
    if (w != 0.0) {
      gf.nodes.push_back(std::move(v));
      gf.weights.push_back(w);
    }
    for (int a = gf.base.dim - 1; a >= 0; --a) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
  }
  return gf;
}

double eval_A(const GeneratingFunction& gf, const Vec& q, const Vec& p) {
  double r = p.norm();
  double acc = 0.0;
  for (size_t j = 0; j < gf.nodes.size(); ++j) {
    Vec y = q - r * gf.nodes[j];
    acc += gf.weights[j] * gf.base.lift(y).dot(p);
  }
  return acc;
}

GradA grad_A(const GeneratingFunction& gf, const Vec& q, const Vec& p) {
  int d = gf.base.dim;
  GradA g;
  double r = p.norm();
  if (r == 0.0) {
    // limits: the odd moments of the rule cancel exactly
    g.dq = Vec::Zero(d);
    g.dp = gf.base.lift(q);
    return g;
  }
  Vec unit = p / r;
  g.dq = Vec::Zero(d);
  g.dp = Vec::Zero(d);
  for (size_t j = 0; j < gf.nodes.size(); ++j) {
    const Vec& v = gf.nodes[j];
    Vec y = q - r * v;
    Mat D = gf.base.dlift_at(y);
    Vec Dtp = D.transpose() * p;
    g.dq += gf.weights[j] * Dtp;
    g.dp += gf.weights[j] * (gf.base.lift(y) - unit * v.dot(Dtp));
  }
  return g;
}

ZeroSectionJets hessian_A_at_zero_section(const GeneratingFunction& gf, const Vec& q) {
  int d = gf.base.dim;
  ZeroSectionJets jets;
  jets.grad_q = Vec::Zero(d);
  jets.grad_p = gf.base.lift(q);
  jets.mixed = gf.base.dlift_at(q).transpose();
  jets.pp = Mat::Zero(d, d);
  return jets;
}

ExtensionMap make_extension(BaseMap base, const ExtensionOptions& opts, MollifierSpec mollifier,
                            int order_per_panel) {
  ExtensionMap em;
  em.gf = make_generating_function(std::move(base), mollifier, order_per_panel);
  em.opts = opts;
  return em;
}

double cutoff_chi(const ExtensionOptions& opts, double r) {
  if (r <= opts.cutoff_on) return 1.0;
  if (r >= opts.cutoff_off) return 0.0;
  double x = (r - opts.cutoff_on) / (opts.cutoff_off - opts.cutoff_on);
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double cutoff_chi_prime(const ExtensionOptions& opts, double r) {
  if (r <= opts.cutoff_on || r >= opts.cutoff_off) return 0.0;
  double x = (r - opts.cutoff_on) / (opts.cutoff_off - opts.cutoff_on);
  return -30.0 * x * x * (1.0 - x) * (1.0 - x) / (opts.cutoff_off - opts.cutoff_on);
}

GradA grad_calA(const ExtensionMap& em, const Vec& q, const Vec& P) {
  double r = P.norm();
  double chi = cutoff_chi(em.opts, r);
  GradA g;
  int d = em.gf.base.dim;
  if (chi == 0.0) {
    g.dq = Vec::Zero(d);
    g.dp = Vec::Zero(d);
    return g;
  }
  GradA gA = grad_A(em.gf, q, P);
  g.dq = chi * (gA.dq - P);
  g.dp = chi * (gA.dp - q);
  if (r > 0.0) {
    double dchi = cutoff_chi_prime(em.opts, r);
    if (dchi != 0.0) {
      double val = eval_A(em.gf, q, P) - q.dot(P);
      g.dp += (dchi * val / r) * P;
    }
  }
  return g;
}

SolveResult solve_F(const ExtensionMap& em, const Vec& q, const Vec& p) {
  const ExtensionOptions& o = em.opts;
  int d = em.gf.base.dim;
  SolveResult res;
  Vec P = p;
  double prev_delta = -1.0;
  bool converged = false;

  for (int it = 0; it < o.newton_after && it < o.max_iter; ++it) {
    Vec P_new = p - grad_calA(em, q, P).dq;
    double delta = (P_new - P).norm();
    if (prev_delta > 0.0 && delta > 0.0)
      res.contraction = std::max(res.contraction, delta / prev_delta);
    prev_delta = delta;
    P = std::move(P_new);
    ++res.iterations;
    if (delta <= o.solver_tol) {
      converged = true;
      break;
    }
  }

  if (!converged) {
    // Newton on G(P) = P - p + d cal_A/dq(q, P)
    res.used_newton = true;
    auto G = [&](const Vec& PP) { return Vec(PP - p + grad_calA(em, q, PP).dq); };
    Vec g = G(P);
    for (int it = res.iterations; it < o.max_iter; ++it) {
      ++res.iterations;
      if (g.norm() <= o.solver_tol) {
        converged = true;
        break;
      }
      Mat J(d, d);
      for (int j = 0; j < d; ++j) {
        Vec Pp = P, Pm = P;
        Pp[j] += o.fd_step;
        Pm[j] -= o.fd_step;
        J.col(j) = (G(Pp) - G(Pm)) / (2 * o.fd_step);
      }
      Vec step = J.partialPivLu().solve(-g);
      double lambda = 1.0;
      bool improved = false;
      for (int cut = 0; cut < 30; ++cut) {
        Vec Pt = P + lambda * step;
        Vec gt = G(Pt);
        if (gt.norm() < g.norm()) {
          P = std::move(Pt);
          g = std::move(gt);
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!improved) break;
      if (g.norm() <= o.solver_tol) {
        converged = true;
        break;
      }
    }
  }

  res.residual = (P - (p - grad_calA(em, q, P).dq)).norm();
  if (!converged && res.residual > 10 * o.solver_tol)
    throw Error(
        "solve_F: implicit momentum equation did not contract (factor the base map into "
        "nearer-identity pieces and compose their extensions)");
  res.P = P;
  res.Q = q + grad_calA(em, q, P).dp;
  return res;
}

double symplecticity_residual(const ExtensionMap& em, int n_samples, double p_radius,
                              unsigned seed, double fd_step, ExecPolicy policy) {
  int d = em.gf.base.dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  std::uniform_real_distribution<double> up(-p_radius, p_radius);
  std::vector<std::pair<Vec, Vec>> samples;
  samples.reserve(n_samples);
  while (static_cast<int>(samples.size()) < n_samples) {
    Vec q(d), p(d);
    for (int i = 0; i < d; ++i) q[i] = uq(rng);
    for (int i = 0; i < d; ++i) p[i] = up(rng);
    if (p.norm() <= p_radius) samples.emplace_back(std::move(q), std::move(p));
  }

  Mat Om = omega_matrix(d);
  std::vector<double> defects(n_samples, 0.0);
  for_each_index(policy, n_samples, [&](long k) {
    const auto& [q, p] = samples[k];
    Mat J(2 * d, 2 * d);
    for (int j = 0; j < 2 * d; ++j) {
      Vec qp = q, qm = q, pp = p, pm = p;
      if (j < d) {
        qp[j] += fd_step;
        qm[j] -= fd_step;
      } else {
        pp[j - d] += fd_step;
        pm[j - d] -= fd_step;
      }
      SolveResult rp = solve_F(em, qp, pp);
      SolveResult rm = solve_F(em, qm, pm);
      J.col(j).head(d) = (rp.Q - rm.Q) / (2 * fd_step);
      J.col(j).tail(d) = (rp.P - rm.P) / (2 * fd_step);
    }
    defects[k] = (J.transpose() * Om * J - Om).cwiseAbs().maxCoeff();
  });
  double worst = 0.0;
  for (double v : defects) worst = std::max(worst, v);
  return worst;
}

Isotopy make_sine_isotopy(int dim, double eps) {
  Isotopy iso;
  iso.name = "sine";
  iso.dim = dim;
  const double twopi = 2.0 * M_PI;
  iso.lift = [dim, eps, twopi](double t, const Vec& q) {
    Vec y = q;
    for (int i = 0; i < dim; ++i) y[i] += t * eps / twopi * std::sin(twopi * q[(i + 1) % dim]);
    return y;
  };
  iso.dlift = [dim, eps, twopi](double t, const Vec& q) {
    Mat J = Mat::Identity(dim, dim);
    for (int i = 0; i < dim; ++i)
      J(i, (i + 1) % dim) += t * eps * std::cos(twopi * q[(i + 1) % dim]);
    return J;
  };
  return iso;
}

std::vector<BaseMap> factor_near_identity(const Isotopy& iso, int n, double closeness_bound,
                                          int samples_per_axis) {
  if (n < 1) throw Error("factor_near_identity: need at least one factor");
  // Factors outlive this call, so they hold their own copy of the isotopy.
  auto inverse_at = [iso](double t, const Vec& y) {
    Vec x = y;
    for (int it = 0; it < 60; ++it) {
      Vec r = iso.lift(t, x) - y;
      if (r.cwiseAbs().maxCoeff() <= 1e-14) break;
      x -= iso.dlift(t, x).partialPivLu().solve(r);
    }
    return x;
  };

  std::vector<BaseMap> factors;
  for (int k = 1; k <= n; ++k) {
    double t0 = static_cast<double>(k - 1) / n;
    double t1 = static_cast<double>(k) / n;
    BaseMap g;
    g.name = iso.name + "_factor_" + std::to_string(k);
    g.dim = iso.dim;
    g.lift = [iso, inverse_at, t0, t1](const Vec& q) { return iso.lift(t1, inverse_at(t0, q)); };
    g.dlift = [iso, inverse_at, t0, t1](const Vec& q) {
      Vec x = inverse_at(t0, q);
      return Mat(iso.dlift(t1, x) * iso.dlift(t0, x).inverse());
    };
    BaseMapCloseness c = basemap_closeness(g, samples_per_axis);
    if (c.c1 > closeness_bound)
      throw Error("factor_near_identity: factor " + std::to_string(k) + " has closeness " +
                  std::to_string(c.c1) + " above the bound; increase the factor count");
    factors.push_back(std::move(g));
  }
  return factors;
}

}  // namespace tonelli
