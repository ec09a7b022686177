#include "tonelli/integrate.hpp"

#include <cmath>

namespace tonelli {

namespace {

// numeric state kept lifted; callbacks are 1-periodic, so evaluating on the
// wrapped representative preserves argument precision on long runs
Vec wrapped(const Vec& q) { return wrap_torus(q); }

PhasePoint lifted_point(const Vec& q, const Vec& p) {
  PhasePoint x;
  x.q = q;
  x.p = p;
  return x;
}

}  // namespace

Stepper::Stepper(const HamiltonianSpec& H, PhasePoint x0) : H_(H), x_(std::move(x0)) {
  if (x_.dim() != H_.dim) throw Error("Stepper: dimension mismatch");
}

void Stepper::set_tangent(Mat W0) {
  if (W0.rows() != 2 * H_.dim) throw Error("Stepper: tangent frame has wrong row count");
  W_ = std::move(W0);
}

void Stepper::verlet_step(double h) {
  int d = H_.dim;
  Vec qw = wrapped(x_.q);
  Vec gq = H_.grad_q(qw, x_.p);
  Vec p_half = x_.p - 0.5 * h * gq;
  Vec q_new = x_.q + h * H_.grad_p(qw, p_half);
  Vec qw_new = wrapped(q_new);
  Vec p_new = p_half - 0.5 * h * H_.grad_q(qw_new, p_half);

  if (W_.size() > 0) {
    // exact derivative of the discrete map, not a discretization of the
    // variational equation
    auto Wq = W_.topRows(d);
    auto Wp = W_.bottomRows(d);
    Mat Hqq0 = H_.hess_qq(qw, x_.p);
    Mat Wp_half = Wp - 0.5 * h * Hqq0 * Wq;
    Mat Wq_new = Wq + h * H_.hess_pp(qw, p_half) * Wp_half;
    Mat Hqq1 = H_.hess_qq(qw_new, p_half);
    Mat Wp_new = Wp_half - 0.5 * h * Hqq1 * Wq_new;
    W_.topRows(d) = Wq_new;
    W_.bottomRows(d) = Wp_new;
  }
  x_.q = std::move(q_new);
  x_.p = std::move(p_new);
  t_ += h;
}

void Stepper::rk4_step(double h) {
  int d = H_.dim;
  auto field = [&](const Vec& q, const Vec& p) {
    Vec f(2 * d);
    Vec qw = wrapped(q);
    f.head(d) = H_.grad_p(qw, p);
    f.tail(d) = -H_.grad_q(qw, p);
    return f;
  };
  auto jac = [&](const Vec& q, const Vec& p) {
    return vector_field_jacobian(H_, lifted_point(wrapped(q), p));
  };

  Vec y(2 * d);
  y.head(d) = x_.q;
  y.tail(d) = x_.p;
  bool tang = W_.size() > 0;

  Vec k1 = field(y.head(d), y.tail(d));
  Mat K1, K2, K3, K4;
  if (tang) K1 = jac(y.head(d), y.tail(d)) * W_;
  Vec y2 = y + 0.5 * h * k1;
  Vec k2 = field(y2.head(d), y2.tail(d));
  if (tang) K2 = jac(y2.head(d), y2.tail(d)) * (W_ + 0.5 * h * K1);
  Vec y3 = y + 0.5 * h * k2;
  Vec k3 = field(y3.head(d), y3.tail(d));
  if (tang) K3 = jac(y3.head(d), y3.tail(d)) * (W_ + 0.5 * h * K2);
  Vec y4 = y + h * k3;
  Vec k4 = field(y4.head(d), y4.tail(d));
  if (tang) K4 = jac(y4.head(d), y4.tail(d)) * (W_ + h * K3);

  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (tang) W_ += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
  x_.q = y.head(d);
  x_.p = y.tail(d);
  t_ += h;
}

void Stepper::step(double h) {
  if (H_.separable)
    verlet_step(h);
  else
    rk4_step(h);
}

void Stepper::advance(double dt, double h) {
  if (dt == 0.0) return;
  if (h <= 0.0) throw Error("Stepper: step size must be positive");
  long n = static_cast<long>(std::ceil(std::abs(dt) / h - 1e-12));
  if (n < 1) n = 1;
  double hs = dt / static_cast<double>(n);
  for (long i = 0; i < n; ++i) step(hs);
}

void Stepper::renormalize_tangent() {
  if (W_.size() == 0) return;
  Eigen::HouseholderQR<Mat> qr(W_);
  Mat Q = qr.householderQ() * Mat::Identity(W_.rows(), W_.cols());
  Mat R = qr.matrixQR().topRows(W_.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    if (R(j, j) < 0) {
      Q.col(j) = -Q.col(j);
      R.row(j) = -R.row(j);
    }
    if (R(j, j) <= 0) throw Error("Stepper: tangent frame lost rank during renormalization");
    log_scale_ += std::log(R(j, j));
  }
  // the dropped factor R has positive determinant, so oriented quantities of
  // the frame keep their sign
  W_ = std::move(Q);
}

namespace {

void record_state(Trajectory& traj, const HamiltonianSpec& H, double t, const Vec& q, const Vec& p) {
  traj.times.push_back(t);
  traj.states.emplace_back(q, p);
  traj.energies.push_back(H.value(wrap_torus(q), p));
}

}  // namespace

Trajectory flow(const HamiltonianSpec& H, const PhasePoint& x0, double t, const FlowOptions& opts) {
  if (std::abs(t) > opts.max_horizon) throw Error("flow: horizon exceeds max_horizon");
  Trajectory traj;
  if (opts.use_exact && H.exact_flow) {
    double rdt = opts.record_dt > 0 ? opts.record_dt : std::max(opts.step, std::abs(t) / 1000.0);
    long n = t == 0.0 ? 0 : static_cast<long>(std::ceil(std::abs(t) / rdt - 1e-12));
    record_state(traj, H, 0.0, x0.q, x0.p);
    for (long k = 1; k <= n; ++k) {
      double tk = t * static_cast<double>(k) / static_cast<double>(n);
      PhasePoint xk = H.exact_flow(x0, tk);
      record_state(traj, H, tk, xk.q, xk.p);
    }
  } else {
    Stepper s(H, x0);
    long stride = opts.record_dt > 0 ? std::max(1L, std::lround(opts.record_dt / opts.step)) : 1;
    long n = t == 0.0 ? 0 : static_cast<long>(std::ceil(std::abs(t) / opts.step - 1e-12));
    double hs = n > 0 ? t / static_cast<double>(n) : 0.0;
    record_state(traj, H, 0.0, s.state().q, s.state().p);
    for (long i = 1; i <= n; ++i) {
      s.step(hs);
      if (i % stride == 0 || i == n) record_state(traj, H, s.time(), s.state().q, s.state().p);
    }
  }
  double e0 = traj.energies.front();
  for (double e : traj.energies) traj.energy_drift = std::max(traj.energy_drift, std::abs(e - e0));
  if (traj.energy_drift > opts.energy_drift_tol)
    throw Error("flow: energy drift " + std::to_string(traj.energy_drift) + " exceeds tolerance");
  return traj;
}

TangentTrajectory tangent_flow(const HamiltonianSpec& H, const PhasePoint& x0, double t,
                               const FlowOptions& opts) {
  TangentTrajectory out;
  int d = H.dim;
  Mat Om = omega_matrix(d);
  auto note_defect = [&](const Mat& J) {
    double defect = (J.transpose() * Om * J - Om).cwiseAbs().maxCoeff();
    out.symplecticity_defect = std::max(out.symplecticity_defect, defect);
  };
  if (opts.use_exact && H.exact_flow && H.exact_tangent_flow) {
    out.base = flow(H, x0, t, opts);
    for (double tk : out.base.times) {
      out.jacobians.push_back(H.exact_tangent_flow(x0, tk));
      note_defect(out.jacobians.back());
    }
    return out;
  }
  if (std::abs(t) > opts.max_horizon) throw Error("tangent_flow: horizon exceeds max_horizon");
  Stepper s(H, x0);
  s.set_tangent(Mat::Identity(2 * d, 2 * d));
  long stride = opts.record_dt > 0 ? std::max(1L, std::lround(opts.record_dt / opts.step)) : 1;
  long n = t == 0.0 ? 0 : static_cast<long>(std::ceil(std::abs(t) / opts.step - 1e-12));
  double hs = n > 0 ? t / static_cast<double>(n) : 0.0;
  record_state(out.base, H, 0.0, s.state().q, s.state().p);
  out.jacobians.push_back(s.tangent());
  for (long i = 1; i <= n; ++i) {
    s.step(hs);
    if (i % stride == 0 || i == n) {
      record_state(out.base, H, s.time(), s.state().q, s.state().p);
      out.jacobians.push_back(s.tangent());
      note_defect(out.jacobians.back());
    }
  }
  double e0 = out.base.energies.front();
  for (double e : out.base.energies)
    out.base.energy_drift = std::max(out.base.energy_drift, std::abs(e - e0));
  if (out.base.energy_drift > opts.energy_drift_tol)
    throw Error("tangent_flow: energy drift exceeds tolerance");
  return out;
}

double action(const HamiltonianSpec&, const Trajectory& traj) {
  if (traj.states.size() < 2) throw Error("action: trajectory too short");
  double total = 0.0;
  for (size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const auto& a = traj.states[k];
    const auto& b = traj.states[k + 1];
    Vec dq = torus_deltas(b.q, a.q);
    if (dq.cwiseAbs().maxCoeff() >= 0.25)
      throw Error("action: records too sparse to resolve base increments");
    double dt = traj.times[k + 1] - traj.times[k];
    double pdq = 0.5 * (a.p + b.p).dot(dq);
    double hdt = 0.5 * (traj.energies[k] + traj.energies[k + 1]) * dt;
    total += pdq - hdt;
  }
  return total;
}

}  // namespace tonelli
