#include "tonelli/quadrature.hpp"

#include <cmath>

namespace tonelli {

GaussRule gauss_legendre(int order) {
  if (order < 1) throw Error("gauss_legendre: order must be positive");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev-based initial guess
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  // enforce exact symmetry of the node set
  for (int i = 0; i < order / 2; ++i) {
    double s = 0.5 * (rule.nodes[order - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -s;
    rule.nodes[order - 1 - i] = s;
    double w = 0.5 * (rule.weights[i] + rule.weights[order - 1 - i]);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

PanelRule panel_rule(const std::vector<double>& breakpoints, int order_per_panel) {
  if (breakpoints.size() < 2) throw Error("panel_rule: need at least one panel");
  GaussRule g = gauss_legendre(order_per_panel);
  PanelRule rule;
  for (size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    double a = breakpoints[k], b = breakpoints[k + 1];
    if (b <= a) throw Error("panel_rule: breakpoints must increase");
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order_per_panel; ++i) {
      rule.nodes.push_back(mid + half * g.nodes[i]);
      rule.weights.push_back(half * g.weights[i]);
    }
  }
  return rule;
}

}  // namespace tonelli
