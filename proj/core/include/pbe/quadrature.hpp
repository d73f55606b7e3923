#pragma once

#include <array>
#include <vector>

namespace pbe {

/// Rule on the reference triangle; weights sum to 1 (multiply by area).
struct QuadratureRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int order = 0;

  std::size_t size() const { return weights.size(); }
};

/// Exact for polynomials of degree <= order; order in {1, 2, 4, 5, 7}.
const QuadratureRule &triangle_rule(int order);

} // namespace pbe
