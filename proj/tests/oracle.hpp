#pragma once

// Independent reference computations shared by the test suites.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <functional>
#include <vector>

#include "pbe/geometry.hpp"
#include "pbe/vec.hpp"

namespace oracle {

/// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

/// Integral over the triangle (a, b, c) by the collapsed (Duffy) square map
/// with an n x n Gauss product rule.
inline double triangle_integral(const pbe::Vec3 &a, const pbe::Vec3 &b, const pbe::Vec3 &c,
                                const std::function<double(const pbe::Vec3 &)> &f, int n = 16) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double area2 = std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = x[i], v = x[j] * (1.0 - x[i]);
      const pbe::Vec3 p = a + u * (b - a) + v * (c - a);
      s += w[i] * w[j] * (1.0 - x[i]) * f(p);
    }
  return s * area2;
}

/// Squared distance from every cell to the nearest seed by exhaustive scan.
inline std::vector<double> brute_edt_squared(const std::vector<std::uint8_t> &seeds, int nx,
                                             int ny, double h) {
  std::vector<double> d(seeds.size(), INFINITY);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p)
          if (seeds[q * nx + p]) {
            const double dx = (i - p) * h, dy = (j - q) * h;
            d[j * nx + i] = std::min(d[j * nx + i], dx * dx + dy * dy);
          }
  return d;
}

inline pbe::VoxelGrid square_grid(double half, int n) {
  const double h = 2.0 * half / n;
  return pbe::VoxelGrid({-half + 0.5 * h, -half + 0.5 * h, 0}, h, n, n);
}

inline bool subset(const pbe::Mask &a, const pbe::Mask &b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i])
      return false;
  return true;
}

// Cell is outside the closing iff some probe disk of radius r avoiding the
// union contains it; probe centers range over a grid twice as fine.
inline pbe::Mask probe_oracle(const pbe::BallUnion &u, double r, const pbe::VoxelGrid &g) {
  std::vector<pbe::Vec3> probes;
  const double hp = 0.5 * g.spacing;
  for (int j = 0; j < 2 * g.ny; ++j)
    for (int i = 0; i < 2 * g.nx; ++i) {
      const pbe::Vec3 q{g.origin.x - 0.25 * g.spacing + i * hp, g.origin.y - 0.25 * g.spacing + j * hp, 0};
      if (pbe::dist_to_union(u, q) >= r)
        probes.push_back(q);
    }
  pbe::Mask inside(g.size(), 1);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const pbe::Vec3 x = g.center(c);
    for (const auto &q : probes)
      if (pbe::distance(x, q) < r) {
        inside[c] = 0;
        break;
      }
  }
  return inside;
}

// Largest Chebyshev distance (in cells) from a mismatched cell to the
// nearest oracle boundary.
inline int boundary_discrepancy(const pbe::Mask &got, const pbe::Mask &want, const pbe::VoxelGrid &g) {
  int worst = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t c = g.index(i, j);
      if (got[c] == want[c])
        continue;
      int d = 0;
      bool found = false;
      while (!found && d < g.nx) {
        ++d;
        for (int q = std::max(0, j - d); q <= std::min(g.ny - 1, j + d) && !found; ++q)
          for (int p = std::max(0, i - d); p <= std::min(g.nx - 1, i + d) && !found; ++p)
            found = want[g.index(p, q)] != want[c];
      }
      worst = std::max(worst, d);
    }
  return worst;
}

} // namespace oracle
