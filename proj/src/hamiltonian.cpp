#include "tonelli/hamiltonian.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

namespace tonelli {

Mat HamiltonianSpec::mixed_hessian(const Vec& q, const Vec& p) const {
  if (hess_qp) return hess_qp(q, p);
  if (separable) return Mat::Zero(dim, dim);
  throw Error("HamiltonianSpec '" + name + "': mixed Hessian required for non-separable flow");
}

TangentVector vector_field(const HamiltonianSpec& H, const PhasePoint& x) {
  if (x.dim() != H.dim) throw Error("vector_field: dimension mismatch");
  return TangentVector(H.grad_p(x.q, x.p), -H.grad_q(x.q, x.p));
}

Mat vector_field_jacobian(const HamiltonianSpec& H, const PhasePoint& x) {
  int d = H.dim;
  Mat J(2 * d, 2 * d);
  Mat Hqp = H.mixed_hessian(x.q, x.p);
  J.topLeftCorner(d, d) = Hqp.transpose();
  J.topRightCorner(d, d) = H.hess_pp(x.q, x.p);
  J.bottomLeftCorner(d, d) = -H.hess_qq(x.q, x.p);
  J.bottomRightCorner(d, d) = -Hqp;
  return J;
}

HamiltonianCheck validate(const HamiltonianSpec& H, const std::vector<PhasePoint>& samples) {
  HamiltonianCheck check;
  const double h = 1e-5;
  for (const auto& x : samples) {
    Eigen::LLT<Mat> llt(H.hess_pp(x.q, x.p));
    if (llt.info() != Eigen::Success) {
      check.ok = false;
      check.failures.push_back("fiber Hessian not positive definite at a sample");
      continue;
    }
    Vec gq = H.grad_q(x.q, x.p);
    Vec gp = H.grad_p(x.q, x.p);
    double scale = std::max({1.0, gq.cwiseAbs().maxCoeff(), gp.cwiseAbs().maxCoeff()});
    for (int i = 0; i < H.dim; ++i) {
      Vec qp = x.q, qm = x.q;
      qp[i] += h;
      qm[i] -= h;
      double dq = (H.value(qp, x.p) - H.value(qm, x.p)) / (2 * h);
      Vec pp = x.p, pm = x.p;
      pp[i] += h;
      pm[i] -= h;
      double dp = (H.value(x.q, pp) - H.value(x.q, pm)) / (2 * h);
      if (std::abs(dq - gq[i]) > 1e-5 * scale || std::abs(dp - gp[i]) > 1e-5 * scale) {
        check.ok = false;
        check.failures.push_back("analytic gradient disagrees with finite differences");
        break;
      }
    }
  }
  return check;
}

std::vector<PhasePoint> sample_cloud(int dim, int n, double p_halfwidth, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(0.0, 1.0);
  std::uniform_real_distribution<double> up(-p_halfwidth, p_halfwidth);
  std::vector<PhasePoint> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k) {
    Vec q(dim), p(dim);
    for (int i = 0; i < dim; ++i) q[i] = uq(rng);
    for (int i = 0; i < dim; ++i) p[i] = up(rng);
    pts.emplace_back(std::move(q), std::move(p));
  }
  return pts;
}

}  // namespace tonelli
