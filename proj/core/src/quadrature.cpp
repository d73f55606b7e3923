#include "pbe/quadrature.hpp"

#include <cmath>
#include <string>

#include "pbe/error.hpp"

namespace pbe {

namespace {

QuadratureRule centroid_rule() {
  return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}, 1};
}

QuadratureRule three_point_rule() {
  const double a = 2.0 / 3.0, b = 1.0 / 6.0;
  return {{{a, b, b}, {b, a, b}, {b, b, a}}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 2};
}

// Dunavant degree-4 rule.
QuadratureRule six_point_rule() {
  const double a1 = 0.445948490915965, w1 = 0.223381589678011;
  const double a2 = 0.091576213509771, w2 = 0.109951743655322;
  const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
  return {{{b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
           {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}},
          {w1, w1, w1, w2, w2, w2},
          4};
}

// Radon degree-5 rule.
QuadratureRule seven_point_rule() {
  const double r = std::sqrt(15.0);
  const double a1 = (6.0 - r) / 21.0, w1 = (155.0 - r) / 1200.0;
  const double a2 = (6.0 + r) / 21.0, w2 = (155.0 + r) / 1200.0;
  const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
  return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
           {b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
           {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}},
          {9.0 / 40.0, w1, w1, w1, w2, w2, w2},
          5};
}

// Collapsed 5 x 5 Gauss-Legendre product rule, exact through degree 8.
QuadratureRule collapsed_product_rule() {
  const double s1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double s2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double v1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  const double v2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  const double t[5] = {-s2, -s1, 0.0, s1, s2};
  const double w[5] = {v2, v1, 128.0 / 225.0, v1, v2};
  QuadratureRule r;
  r.order = 7;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double u = 0.5 * (1.0 + t[i]);
      const double v = 0.5 * (1.0 + t[j]) * (1.0 - u);
      r.bary.push_back({1.0 - u - v, u, v});
      r.weights.push_back(0.5 * w[i] * w[j] * (1.0 - u));
    }
  return r;
}

} // namespace

const QuadratureRule &triangle_rule(int order) {
  static const QuadratureRule r1 = centroid_rule();
  static const QuadratureRule r2 = three_point_rule();
  static const QuadratureRule r4 = six_point_rule();
  static const QuadratureRule r5 = seven_point_rule();
  static const QuadratureRule r7 = collapsed_product_rule();
  switch (order) {
  case 1:
    return r1;
  case 2:
    return r2;
  case 4:
    return r4;
  case 5:
    return r5;
  case 7:
    return r7;
  }
  throw Error("no triangle quadrature rule of order " + std::to_string(order));
}

} // namespace pbe
