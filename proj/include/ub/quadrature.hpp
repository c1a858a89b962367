#pragma once

#include <vector>

namespace ub {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule of the given order on [-1, 1].
QuadratureRule gauss_legendre(int order);

// Composite Gauss-Legendre on [lo, hi]: `panels` equal panels of `order` nodes.
QuadratureRule composite_gauss_legendre(double lo, double hi, int panels, int order);

}  // namespace ub
