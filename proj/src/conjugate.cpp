#include "tonelli/conjugate.hpp"

#include <cmath>

#include "tonelli/integrate.hpp"

namespace tonelli {

namespace {

double normalized_vertical_det(const Mat& W) {
  Mat N = W;
  for (Eigen::Index j = 0; j < N.cols(); ++j) {
    double s = N.col(j).norm();
    if (s == 0.0) return 0.0;
    N.col(j) /= s;
  }
  int d = static_cast<int>(W.rows()) / 2;
  return N.topRows(d).determinant();
}

struct ExactScanner {
  const HamiltonianSpec& H;
  const PhasePoint& x0;
  Mat V0;

  double det_at(double t) const {
    Mat J = H.exact_tangent_flow(x0, t);
    return normalized_vertical_det(J * V0);
  }
};

}  // namespace

ConjugateReport conjugate_scan(const HamiltonianSpec& H, const PhasePoint& x0, double T,
                               double dt, const ConjugateOptions& opts) {
  if (T <= 0.0) throw Error("conjugate_scan: horizon must be positive");
  if (dt <= 0.0 || dt > T) throw Error("conjugate_scan: sampling interval must lie in (0, T]");
  int d = H.dim;
  ConjugateReport rep;
  rep.horizon = T;

  bool exact = opts.use_exact && H.exact_flow && H.exact_tangent_flow;
  long n = static_cast<long>(std::ceil(T / dt - 1e-9));

  Mat V0 = Mat::Zero(2 * d, d);
  V0.bottomRows(d) = Mat::Identity(d, d);

  // sampled dets plus the state needed to restart the integration at each
  // sample (numeric path only)
  std::vector<PhasePoint> saved_x;
  std::vector<Mat> saved_W;
  ExactScanner ex{H, x0, V0};

  rep.sample_times.reserve(n);
  rep.dets.reserve(n);

  if (exact) {
    for (long k = 1; k <= n; ++k) {
      double t = std::min(T, k * dt);
      rep.sample_times.push_back(t);
      rep.dets.push_back(ex.det_at(t));
    }
  } else {
    Stepper s(H, x0);
    s.set_tangent(V0);
    saved_x.reserve(n + 1);
    saved_W.reserve(n + 1);
    saved_x.push_back(s.state());
    saved_W.push_back(s.tangent());
    for (long k = 1; k <= n; ++k) {
      double t = std::min(T, k * dt);
      s.advance(t - s.time(), opts.step);
      rep.sample_times.push_back(t);
      rep.dets.push_back(normalized_vertical_det(s.tangent()));
      saved_x.push_back(s.state());
      saved_W.push_back(s.tangent());
      // orientation-preserving renormalization keeps long hyperbolic runs in
      // floating range without touching determinant signs
      s.renormalize_tangent();
      saved_W.back() = s.tangent();
    }
  }

  auto refine_exact = [&](double ta, double tb, double da) {
    while (tb - ta > dt * opts.refine_frac) {
      double tm = 0.5 * (ta + tb);
      double dm = ex.det_at(tm);
      if (dm == 0.0) return tm;
      if ((dm > 0) == (da > 0)) {
        ta = tm;
        da = dm;
      } else {
        tb = tm;
      }
    }
    return 0.5 * (ta + tb);
  };

  auto refine_numeric = [&](long k) {
    // bracket between samples k and k+1 (0-based into rep arrays); restart
    // from the state saved at the left endpoint
    double ta = rep.sample_times[k];
    double tb = rep.sample_times[k + 1];
    double da = rep.dets[k];
    PhasePoint xa = saved_x[k + 1];  // saved_x[0] is t=0
    Mat Wa = saved_W[k + 1];
    while (tb - ta > dt * opts.refine_frac) {
      double tm = 0.5 * (ta + tb);
      Stepper s(H, xa);
      s.set_tangent(Wa);
      s.advance(tm - ta, opts.step);
      double dm = normalized_vertical_det(s.tangent());
      if (dm == 0.0) return tm;
      if ((dm > 0) == (da > 0)) {
        ta = tm;
        da = dm;
        xa = s.state();
        Wa = s.tangent();
      } else {
        tb = tm;
      }
    }
    return 0.5 * (ta + tb);
  };

  // the vertical frame leaves the vertical immediately (det ~ t^d times the
  // fiber Hessian determinant near 0), so the sign just after 0 serves as
  // the reference for a crossing inside the first sample interval
  if (!rep.dets.empty()) {
    if (rep.dets[0] == 0.0) {
      rep.zeros.push_back(rep.sample_times[0]);
    } else if (exact) {
      double t_eps = std::min(dt, T) * 1e-6;
      double d_eps = ex.det_at(t_eps);
      if (d_eps != 0.0 && (d_eps > 0) != (rep.dets[0] > 0))
        rep.zeros.push_back(refine_exact(t_eps, rep.sample_times[0], d_eps));
    } else {
      Stepper s(H, saved_x[0]);
      s.set_tangent(saved_W[0]);
      s.step(std::min(opts.step, rep.sample_times[0]));
      double d_eps = normalized_vertical_det(s.tangent());
      if (d_eps != 0.0 && (d_eps > 0) != (rep.dets[0] > 0)) {
        double ta = s.time(), tb = rep.sample_times[0], da = d_eps;
        PhasePoint xa = s.state();
        Mat Wa = s.tangent();
        while (tb - ta > dt * opts.refine_frac && da != 0.0) {
          double tm = 0.5 * (ta + tb);
          Stepper sm(H, xa);
          sm.set_tangent(Wa);
          sm.advance(tm - ta, opts.step);
          double dm = normalized_vertical_det(sm.tangent());
          if (dm == 0.0 || (dm > 0) == (da > 0)) {
            ta = tm;
            da = dm;
            xa = sm.state();
            Wa = sm.tangent();
          } else {
            tb = tm;
          }
        }
        rep.zeros.push_back(0.5 * (ta + tb));
      }
    }
  }
  for (long k = 0; k + 1 < static_cast<long>(rep.dets.size()); ++k) {
    double da = rep.dets[k], db = rep.dets[k + 1];
    if (db == 0.0) {
      rep.zeros.push_back(rep.sample_times[k + 1]);
      continue;
    }
    if (da == 0.0) continue;  // already recorded
    if ((da > 0) != (db > 0)) {
      rep.zeros.push_back(exact ? refine_exact(rep.sample_times[k], rep.sample_times[k + 1], da)
                                : refine_numeric(k));
    } else if (k > 0) {
      double dm = std::abs(da);
      if (dm < opts.grazing_tol && dm <= std::abs(rep.dets[k - 1]) && dm <= std::abs(db)) {
        rep.grazing.push_back(rep.sample_times[k]);
        rep.warnings.push_back("grazing determinant minimum at t=" +
                               std::to_string(rep.sample_times[k]) + " (no sign change)");
      }
    }
  }
  return rep;
}

std::vector<ConjugateReport> conjugate_scan_batch(const HamiltonianSpec& H,
                                                  const std::vector<PhasePoint>& x0s, double T,
                                                  double dt, const ConjugateOptions& opts,
                                                  ExecPolicy policy) {
  std::vector<ConjugateReport> reports(x0s.size());
  for_each_index(policy, static_cast<long>(x0s.size()),
                 [&](long i) { reports[i] = conjugate_scan(H, x0s[i], T, dt, opts); });
  return reports;
}

}  // namespace tonelli
