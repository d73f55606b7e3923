#include "pbe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pbe/error.hpp"

namespace pbe {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BallUnion BallUnion::from_charges(const ChargeSystem &charges) {
  BallUnion u;
  u.dimension = charges.dimension;
  for (const auto &c : charges.charges)
    u.balls.push_back({c.position, c.radius});
  u.validate();
  return u;
}

BallUnion BallUnion::dilated(double r) const {
  BallUnion out = *this;
  for (auto &b : out.balls)
    b.radius += r;
  return out;
}

void BallUnion::validate() const {
  if (dimension != 2 && dimension != 3)
    throw GeometryError("ball union dimension must be 2 or 3");
  if (balls.empty())
    throw GeometryError("ball union is empty");
  for (const auto &b : balls)
    if (!(b.radius > 0.0))
      throw GeometryError("ball radii must be positive");
}

double dist_to_union(const BallUnion &u, const Vec3 &x) {
  double best = kInf;
  for (const auto &b : u.balls) {
    Vec3 d = x - b.center;
    if (u.dimension == 2)
      d.z = 0.0;
    best = std::min(best, norm(d) - b.radius);
  }
  return std::max(0.0, best);
}

double min_gap_width(const BallUnion &u) {
  double best = kInf;
  for (std::size_t i = 0; i < u.balls.size(); ++i)
    for (std::size_t j = i + 1; j < u.balls.size(); ++j) {
      const double gap = distance(u.balls[i].center, u.balls[j].center) -
                         u.balls[i].radius - u.balls[j].radius;
      if (gap > 0.0)
        best = std::min(best, gap);
    }
  return best;
}

VoxelGrid::VoxelGrid(Vec3 origin_, double spacing_, int nx_, int ny_, int nz_)
    : origin(origin_), spacing(spacing_), nx(nx_), ny(ny_), nz(nz_) {
  if (!(spacing > 0.0))
    throw GeometryError("grid spacing must be positive");
  if (nx < 2 || ny < 2 || nz < 1)
    throw GeometryError("grid extents must be at least 2 per axis");
  values.assign(size(), 0.0);
}

VoxelGrid VoxelGrid::covering(const BallUnion &u, double margin, double h) {
  u.validate();
  Vec3 lo{kInf, kInf, kInf}, hi{-kInf, -kInf, -kInf};
  for (const auto &b : u.balls) {
    const double r = b.radius + margin;
    lo = {std::min(lo.x, b.center.x - r), std::min(lo.y, b.center.y - r),
          std::min(lo.z, b.center.z - r)};
    hi = {std::max(hi.x, b.center.x + r), std::max(hi.y, b.center.y + r),
          std::max(hi.z, b.center.z + r)};
  }
  auto count = [h](double a, double b) {
    return std::max(2, static_cast<int>(std::ceil((b - a) / h)) + 1);
  };
  if (u.dimension == 2)
    return VoxelGrid({lo.x, lo.y, 0.0}, h, count(lo.x, hi.x),
                     count(lo.y, hi.y), 1);
  return VoxelGrid(lo, h, count(lo.x, hi.x), count(lo.y, hi.y),
                   count(lo.z, hi.z));
}

Vec3 VoxelGrid::center(std::size_t idx) const {
  const int i = static_cast<int>(idx % nx);
  const int j = static_cast<int>((idx / nx) % ny);
  const int k = static_cast<int>(idx / (static_cast<std::size_t>(nx) * ny));
  return center(i, j, k);
}

std::size_t VoxelGrid::nearest(const Vec3 &x) const {
  auto axis = [this](double v, double o, int n) {
    const long c = std::lround((v - o) / spacing);
    return static_cast<int>(std::clamp<long>(c, 0, n - 1));
  };
  return index(axis(x.x, origin.x, nx), axis(x.y, origin.y, ny),
               nz == 1 ? 0 : axis(x.z, origin.z, nz));
}

Mask union_mask(const BallUnion &u, const VoxelGrid &grid) {
  Mask m(grid.size(), 0);
  for (std::size_t c = 0; c < grid.size(); ++c)
    m[c] = dist_to_union(u, grid.center(c)) == 0.0;
  return m;
}

namespace {

// 1-D squared distance transform of a sampled function (Felzenszwalb and
// Huttenlocher lower envelope of parabolas), in place with stride.
void edt_1d(double *f, int n, std::size_t stride, std::vector<double> &buf,
            std::vector<int> &v, std::vector<double> &z) {
  buf.resize(n);
  v.resize(n);
  z.resize(n + 1);
  for (int i = 0; i < n; ++i)
    buf[i] = f[i * stride];
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (buf[q] == kInf)
      continue;
    double s = -kInf;
    while (k >= 0) {
      const int p = v[k];
      s = ((buf[q] + double(q) * q) - (buf[p] + double(p) * p)) /
          (2.0 * (q - p));
      if (s > z[k])
        break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0)
    return;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q)
      ++j;
    const double d = q - v[j];
    f[q * stride] = d * d + buf[v[j]];
  }
}

// Squared lattice distance in cell units (exact integers).
std::vector<double> edt_cells(const Mask &seeds, const VoxelGrid &g) {
  std::vector<double> f(g.size());
  for (std::size_t c = 0; c < f.size(); ++c)
    f[c] = seeds[c] ? 0.0 : kInf;
  std::vector<double> buf, z;
  std::vector<int> v;
  const std::size_t sx = 1, sy = g.nx, sz = std::size_t(g.nx) * g.ny;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      edt_1d(&f[g.index(0, j, k)], g.nx, sx, buf, v, z);
  for (int k = 0; k < g.nz; ++k)
    for (int i = 0; i < g.nx; ++i)
      edt_1d(&f[g.index(i, 0, k)], g.ny, sy, buf, v, z);
  if (g.nz > 1)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        edt_1d(&f[g.index(i, j, 0)], g.nz, sz, buf, v, z);
  return f;
}

// Marks every cell x with |x - q|^2 < d2[q] for some q with d2[q] >= r2
// (all quantities in squared cell units).
Mask medial_cover(const std::vector<double> &d2, double r2,
                  const VoxelGrid &g) {
  Mask covered(g.size(), 0);
  constexpr int B = 8;
  struct Block {
    int i0, i1, j0, j1, k0, k1;
    double max_d2;
    std::vector<std::size_t> cells;
  };
  std::vector<Block> blocks;
  for (int k0 = 0; k0 < g.nz; k0 += B)
    for (int j0 = 0; j0 < g.ny; j0 += B)
      for (int i0 = 0; i0 < g.nx; i0 += B) {
        Block b{i0, std::min(i0 + B, g.nx) - 1, j0, std::min(j0 + B, g.ny) - 1,
                k0, std::min(k0 + B, g.nz) - 1, 0.0, {}};
        for (int k = b.k0; k <= b.k1; ++k)
          for (int j = b.j0; j <= b.j1; ++j)
            for (int i = b.i0; i <= b.i1; ++i) {
              const std::size_t c = g.index(i, j, k);
              if (d2[c] >= r2) {
                b.cells.push_back(c);
                b.max_d2 = std::max(b.max_d2, d2[c]);
              }
            }
        if (!b.cells.empty())
          blocks.push_back(std::move(b));
      }

  auto gap = [](int x, int lo, int hi) -> double {
    return x < lo ? lo - x : (x > hi ? x - hi : 0);
  };
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t x = g.index(i, j, k);
        if (d2[x] >= r2) {
          covered[x] = d2[x] > 0.0;
          continue;
        }
        if (d2[x] == 0.0)
          continue;
        bool hit = false;
        for (const auto &b : blocks) {
          const double gx = gap(i, b.i0, b.i1), gy = gap(j, b.j0, b.j1),
                       gz = gap(k, b.k0, b.k1);
          if (gx * gx + gy * gy + gz * gz >= b.max_d2)
            continue;
          for (std::size_t q : b.cells) {
            const int qi = static_cast<int>(q % g.nx);
            const int qj = static_cast<int>((q / g.nx) % g.ny);
            const int qk = static_cast<int>(q / (std::size_t(g.nx) * g.ny));
            const double di = i - qi, dj = j - qj, dk = k - qk;
            if (di * di + dj * dj + dk * dk < d2[q]) {
              hit = true;
              break;
            }
          }
          if (hit)
            break;
        }
        covered[x] = hit;
      }
  return covered;
}

void check_radius(double r, const VoxelGrid &grid) {
  if (!(r > 0.0))
    throw GeometryError("probe radius must be positive");
  if (grid.spacing > r / 4.0)
    throw GeometryError("grid spacing " + std::to_string(grid.spacing) +
                        " exceeds r/4 for probe radius " + std::to_string(r));
}

void check_coverage(const BallUnion &u, double r, const VoxelGrid &g) {
  const Vec3 lo = g.center(0, 0, 0);
  const Vec3 hi = g.center(g.nx - 1, g.ny - 1, g.nz - 1);
  for (const auto &b : u.balls) {
    const double R = b.radius + r;
    bool ok = b.center.x - R >= lo.x && b.center.x + R <= hi.x &&
              b.center.y - R >= lo.y && b.center.y + R <= hi.y;
    if (g.nz > 1)
      ok = ok && b.center.z - R >= lo.z && b.center.z + R <= hi.z;
    if (!ok)
      throw GeometryError("grid does not cover the probe dilation of the ball union");
  }
}

Mask complement(const Mask &m) {
  Mask out(m.size());
  for (std::size_t c = 0; c < m.size(); ++c)
    out[c] = !m[c];
  return out;
}

} // namespace

std::vector<double> edt_squared(const Mask &seeds, const VoxelGrid &grid) {
  if (seeds.size() != grid.size())
    throw GeometryError("mask size does not match grid");
  auto f = edt_cells(seeds, grid);
  const double h2 = grid.spacing * grid.spacing;
  for (auto &v : f)
    v *= h2;
  return f;
}

Mask rolling_ball_close(const BallUnion &u, double r_p, const VoxelGrid &grid) {
  u.validate();
  check_radius(r_p, grid);
  check_coverage(u, r_p, grid);
  std::vector<double> d2(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double d = dist_to_union(u, grid.center(c)) / grid.spacing;
    d2[c] = d * d;
  }
  const double r = r_p / grid.spacing;
  return complement(medial_cover(d2, r * r, grid));
}

Mask close_mask(const Mask &mask, double r, const VoxelGrid &grid) {
  check_radius(r, grid);
  const double rc = r / grid.spacing;
  return complement(medial_cover(edt_cells(mask, grid), rc * rc, grid));
}

Mask open_mask(const Mask &mask, double r, const VoxelGrid &grid) {
  check_radius(r, grid);
  const double rc = r / grid.spacing;
  return medial_cover(edt_cells(complement(mask), grid), rc * rc, grid);
}

Mask rolling_ball_open(const BallUnion &u, double r_p, const VoxelGrid &grid) {
  u.validate();
  return open_mask(union_mask(u, grid), r_p, grid);
}

RegionMap RegionMap::from_grid(VoxelGrid grid, std::vector<RegionTag> tags) {
  if (tags.size() != grid.size())
    throw GeometryError("region tags do not match grid size");
  RegionMap m;
  m.provenance_ = RegionProvenance::GridBased;
  m.grid_ = std::move(grid);
  m.tags_ = std::move(tags);
  return m;
}

RegionMap RegionMap::analytic_disk(double r_m, double r_iel, Vec3 center) {
  RegionMap m;
  m.provenance_ = RegionProvenance::AnalyticDisk;
  m.r_m_ = r_m;
  m.r_iel_ = r_iel;
  m.center_ = center;
  return m;
}

RegionTag RegionMap::classify(const Vec3 &x) const {
  if (provenance_ == RegionProvenance::AnalyticDisk) {
    const double r = distance(x, center_);
    if (r < r_m_)
      return RegionTag::Molecule;
    if (r < r_iel_)
      return RegionTag::IEL;
    return RegionTag::Ions;
  }
  const Vec3 lo = grid_.center(0, 0, 0);
  const Vec3 hi = grid_.center(grid_.nx - 1, grid_.ny - 1, grid_.nz - 1);
  const double h = 0.5 * grid_.spacing;
  if (x.x < lo.x - h || x.x > hi.x + h || x.y < lo.y - h || x.y > hi.y + h ||
      (grid_.nz > 1 && (x.z < lo.z - h || x.z > hi.z + h)))
    return RegionTag::Ions;
  return tags_[grid_.nearest(x)];
}

RegionMap build_region_map(const BallUnion &u, double r_p, double r_I,
                           const VoxelGrid &grid) {
  if (!(r_I > r_p))
    throw GeometryError("ion exclusion radius r_I must exceed probe radius r_p");
  const Mask molecule = rolling_ball_close(u, r_p, grid);
  std::vector<RegionTag> tags(grid.size(), RegionTag::Ions);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (molecule[c])
      tags[c] = RegionTag::Molecule;
    else if (dist_to_union(u, grid.center(c)) < r_I)
      tags[c] = RegionTag::IEL;
  }
  return RegionMap::from_grid(grid, std::move(tags));
}

RegionMap analytic_disk_regions(double r_m, double r_iel, double half_width) {
  if (!(r_m > 0.0 && r_m < r_iel && r_iel < half_width))
    throw GeometryError("disk regions require 0 < r_m < r_iel < half_width");
  return RegionMap::analytic_disk(r_m, r_iel);
}

void write_vtk_structured_points(std::ostream &out, const VoxelGrid &grid,
                                 const std::vector<int> &cell_values,
                                 const std::string &name) {
  if (cell_values.size() != grid.size())
    throw GeometryError("VTK values do not match grid size");
  out << "# vtk DataFile Version 3.0\n"
      << name << "\n"
      << "ASCII\nDATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << grid.nx << ' ' << grid.ny << ' ' << grid.nz << "\n";
  out.precision(17);
  out << "ORIGIN " << grid.origin.x << ' ' << grid.origin.y << ' '
      << grid.origin.z << "\n"
      << "SPACING " << grid.spacing << ' ' << grid.spacing << ' '
      << grid.spacing << "\n"
      << "POINT_DATA " << grid.size() << "\n"
      << "SCALARS " << name << " int 1\nLOOKUP_TABLE default\n";
  for (std::size_t c = 0; c < cell_values.size(); ++c)
    out << cell_values[c] << ((c + 1) % grid.nx == 0 ? '\n' : ' ');
}

} // namespace pbe
