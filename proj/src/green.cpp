#include "tonelli/green.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "tonelli/conjugate.hpp"
#include "tonelli/integrate.hpp"

namespace tonelli {

std::vector<double> green_default_horizons() {
  std::vector<double> hs;
  for (int k = 0; k <= 14; ++k) hs.push_back(static_cast<double>(1 << k));
  return hs;
}

namespace {

double op_norm(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

Mat transported_vertical(const HamiltonianSpec& H, const PhasePoint& x0, GreenSide side, double T,
                         const GreenOptions& opts) {
  int d = H.dim;
  Mat V0 = Mat::Zero(2 * d, d);
  V0.bottomRows(d) = Mat::Identity(d, d);
  double back = side == GreenSide::Minus ? -T : T;
  bool exact = opts.use_exact && H.exact_flow && H.exact_tangent_flow;
  if (exact) {
    PhasePoint anchor = H.exact_flow(x0, back);
    return H.exact_tangent_flow(anchor, -back) * V0;
  }
  Stepper to_anchor(H, x0);
  to_anchor.advance(back, opts.step);
  Stepper s(H, to_anchor.state());
  s.set_tangent(V0);
  double remaining = -back;
  double dir = remaining > 0 ? 1.0 : -1.0;
  while (std::abs(remaining) > 1e-12) {
    double chunk = dir * std::min(std::abs(remaining), opts.renorm_every);
    s.advance(chunk, opts.step);
    remaining -= chunk;
    // the graph matrix Wp Wq^{-1} is invariant under right multiplication of
    // the frame, so orthonormalizing between chunks is free
    s.renormalize_tangent();
  }
  return s.tangent();
}

Mat graph_matrix(const Mat& W, std::vector<std::string>& warnings) {
  int d = static_cast<int>(W.rows()) / 2;
  Mat Wq = W.topRows(d);
  Mat Wp = W.bottomRows(d);
  Eigen::JacobiSVD<Mat> svd(Wq);
  const Vec& s = svd.singularValues();
  double col_scale = 0.0;
  for (int j = 0; j < d; ++j) col_scale = std::max(col_scale, W.col(j).norm());
  if (s(d - 1) <= 1e-10 * col_scale)
    throw Error(
        "green_bundle: transported vertical meets the vertical (conjugate-point interference)");
  if (s(d - 1) <= 1e-6 * col_scale)
    warnings.push_back("green_bundle: near-vertical frame, graph matrix ill-conditioned");
  return Wp * Wq.inverse();
}

}  // namespace

GreenBundleEstimate green_bundle(const HamiltonianSpec& H, const PhasePoint& x0, GreenSide side,
                                 const std::vector<double>& horizons, const GreenOptions& opts) {
  if (horizons.size() < 2) throw Error("green_bundle: need at least two horizons");
  for (size_t i = 0; i < horizons.size(); ++i)
    if (horizons[i] <= 0 || (i > 0 && horizons[i] <= horizons[i - 1]))
      throw Error("green_bundle: horizons must be positive and increasing");

  GreenBundleEstimate est;
  est.side = side;

  if (opts.check_conjugate) {
    double scan_T = std::min(horizons.back(), opts.conjugate_horizon_cap);
    ConjugateOptions copts;
    copts.step = opts.step;
    copts.use_exact = opts.use_exact;
    // side Minus draws on past verticals, so the obstruction is a point of
    // the backward semi-orbit conjugate to x0: scan the time-reversed flow
    HamiltonianSpec Hscan = H;
    if (side == GreenSide::Minus) {
      Hscan.value = [H](const Vec& q, const Vec& p) { return -H.value(q, p); };
      Hscan.grad_q = [H](const Vec& q, const Vec& p) { return Vec(-H.grad_q(q, p)); };
      Hscan.grad_p = [H](const Vec& q, const Vec& p) { return Vec(-H.grad_p(q, p)); };
      Hscan.hess_pp = [H](const Vec& q, const Vec& p) { return Mat(-H.hess_pp(q, p)); };
      Hscan.hess_qq = [H](const Vec& q, const Vec& p) { return Mat(-H.hess_qq(q, p)); };
      Hscan.hess_qp = [H](const Vec& q, const Vec& p) { return Mat(-H.mixed_hessian(q, p)); };
      if (H.exact_flow)
        Hscan.exact_flow = [H](const PhasePoint& x, double t) { return H.exact_flow(x, -t); };
      if (H.exact_tangent_flow)
        Hscan.exact_tangent_flow = [H](const PhasePoint& x, double t) {
          return H.exact_tangent_flow(x, -t);
        };
      Hscan.separable = false;  // reversed fiber part is concave; use the generic scheme
    }
    ConjugateReport scan = conjugate_scan(Hscan, x0, scan_T, opts.conjugate_dt, copts);
    if (!scan.zeros.empty())
      throw Error("green_bundle: conjugate point on the semi-orbit at |t|=" +
                  std::to_string(scan.zeros.front()));
    for (const auto& w : scan.warnings) est.warnings.push_back(w);
  }

  Mat prev;
  for (double T : horizons) {
    Mat W = transported_vertical(H, x0, side, T, opts);
    Mat S = graph_matrix(W, est.warnings);
    double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
    est.symmetry_defect = std::max(est.symmetry_defect, asym);
    if (asym > opts.symmetry_tol)
      est.warnings.push_back("green_bundle: symmetry defect " + std::to_string(asym) +
                             " at horizon " + std::to_string(T));
    S = 0.5 * (S + S.transpose()).eval();
    if (prev.size() > 0) est.residual = op_norm(S - prev);
    est.history.push_back(S);
    est.horizons.push_back(T);
    prev = S;
  }
  est.S = est.history.back();
  est.horizon = horizons.back();
  est.converged = est.residual < opts.convergence_tol;
  return est;
}

BoundednessProbe boundedness_probe(const HamiltonianSpec& H, const PhasePoint& x0,
                                   const TangentVector& v, const std::vector<double>& horizons,
                                   const GreenOptions& opts) {
  if (horizons.empty()) throw Error("boundedness_probe: empty horizon list");
  BoundednessProbe probe;
  probe.horizons = horizons;
  bool exact = opts.use_exact && H.exact_tangent_flow;
  for (int dir = 0; dir < 2; ++dir) {
    double sgn = dir == 0 ? 1.0 : -1.0;
    std::vector<double>& norms = dir == 0 ? probe.forward_norms : probe.backward_norms;
    if (exact) {
      for (double T : horizons) norms.push_back((H.exact_tangent_flow(x0, sgn * T) * v.stacked()).norm());
    } else {
      Stepper s(H, x0);
      Mat W = v.stacked();
      s.set_tangent(W);
      double t_done = 0.0;
      for (double T : horizons) {
        while (t_done < T) {
          double chunk = std::min(opts.renorm_every, T - t_done);
          s.advance(sgn * chunk, opts.step);
          t_done += chunk;
          s.renormalize_tangent();
        }
        norms.push_back(std::exp(s.tangent_log_scale()) * s.tangent().col(0).norm());
      }
    }
  }
  probe.forward_min = *std::min_element(probe.forward_norms.begin(), probe.forward_norms.end());
  probe.backward_min = *std::min_element(probe.backward_norms.begin(), probe.backward_norms.end());
  return probe;
}

}  // namespace tonelli
