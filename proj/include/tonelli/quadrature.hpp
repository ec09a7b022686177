#pragma once

#include <vector>

#include "tonelli/types.hpp"

namespace tonelli {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order);

/// Composite rule assembled from Gauss panels between consecutive
/// breakpoints. Exact for integrands that are polynomial of degree below
/// 2 * order_per_panel on every panel; the node set is symmetric about 0
/// whenever the breakpoints are.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

PanelRule panel_rule(const std::vector<double>& breakpoints, int order_per_panel);

}  // namespace tonelli
