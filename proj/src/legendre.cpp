#include "tonelli/legendre.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace tonelli {

LegendreResult legendre(const HamiltonianSpec& H, const Vec& q, const Vec& v,
                        const LegendreOptions& opts) {
  if (q.size() != H.dim || v.size() != H.dim) throw Error("legendre: dimension mismatch");
  Vec qw = wrap_torus(q);
  Vec p = Vec::Zero(H.dim);
  double res = (H.grad_p(qw, p) - v).norm();
  LegendreResult out;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (res <= opts.tol) {
      out.value = p.dot(v) - H.value(qw, p);
      out.p_star = p;
      out.iterations = it;
      return out;
    }
    Eigen::LLT<Mat> llt(H.hess_pp(qw, p));
    if (llt.info() != Eigen::Success)
      throw Error("legendre: fiber Hessian not positive definite during iteration");
    Vec dir = llt.solve(v - H.grad_p(qw, p));
    // backtrack until the residual actually drops; convexity guarantees the
    // Newton direction is eventually a descent direction for it
    double lambda = 1.0;
    for (int cut = 0; cut < 40; ++cut) {
      Vec trial = p + lambda * dir;
      double tres = (H.grad_p(qw, trial) - v).norm();
      if (tres < res) {
        p = std::move(trial);
        res = tres;
        break;
      }
      lambda *= 0.5;
      if (cut == 39)
        throw Error("legendre: damped step failed to reduce residual");
    }
  }
  if (res <= opts.tol) {
    out.value = p.dot(v) - H.value(qw, p);
    out.p_star = p;
    out.iterations = opts.max_iter;
    return out;
  }
  throw Error("legendre: no convergence within iteration budget (is the Hamiltonian fiberwise superlinear?)");
}

}  // namespace tonelli
