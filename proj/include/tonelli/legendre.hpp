#pragma once

#include "tonelli/hamiltonian.hpp"

namespace tonelli {

struct LegendreOptions {
  double tol = 1e-10;
  int max_iter = 50;
};

struct LegendreResult {
  double value = 0.0;  // L(q, v)
  Vec p_star;          // maximizing momentum, grad_p H(q, p*) = v
  int iterations = 0;
};

/// Fiberwise Legendre transform L(q, v) = sup_p (p.v - H(q, p)). Fiber
/// convexity makes the supremum a critical point; it is located by damped
/// Newton iteration on grad_p H = v starting from p = 0.
LegendreResult legendre(const HamiltonianSpec& H, const Vec& q, const Vec& v,
                        const LegendreOptions& opts = {});

}  // namespace tonelli
