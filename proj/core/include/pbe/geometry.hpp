#pragma once

// Molecular-region construction: PQR ingestion, distance to unions of
// balls, rolling-ball closing/opening on voxel grids, region maps.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pbe/model.hpp"
#include "pbe/vec.hpp"

namespace pbe {

/// Reads ATOM/HETATM records; the last five numeric fields of a record
/// are x y z charge radius (Angstrom). Coordinates and radii are multiplied
/// by `length_per_angstrom`. dimension 2 keeps x and y and drops z.
ChargeSystem ingest_pqr(std::istream &in, double length_per_angstrom = 1.0,
                        int dimension = 3);
ChargeSystem ingest_pqr_file(const std::string &path,
                             double length_per_angstrom = 1.0,
                             int dimension = 3);

struct Ball {
  Vec3 center;
  double radius = 1.0;
};

struct BallUnion {
  int dimension = 2;
  std::vector<Ball> balls;

  /// van der Waals set of a charge system (radii must be positive).
  static BallUnion from_charges(const ChargeSystem &charges);
  BallUnion dilated(double r) const;
  void validate() const;
};

/// max(0, min_i |x - c_i| - R_i).
double dist_to_union(const BallUnion &u, const Vec3 &x);

/// Smallest positive surface-to-surface gap between two balls; +inf if none.
double min_gap_width(const BallUnion &u);

/// Cell-centered uniform grid; nz == 1 for 2-D grids.
struct VoxelGrid {
  Vec3 origin; // center of cell (0,0,0)
  double spacing = 1.0;
  int nx = 2, ny = 2, nz = 1;
  std::vector<double> values;

  VoxelGrid() = default;
  VoxelGrid(Vec3 origin, double spacing, int nx, int ny, int nz = 1);
  /// Grid of spacing h covering the bounding box of u enlarged by margin.
  static VoxelGrid covering(const BallUnion &u, double margin, double h);

  int dimension() const { return nz == 1 ? 2 : 3; }
  std::size_t size() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  Vec3 center(int i, int j, int k = 0) const {
    return {origin.x + i * spacing, origin.y + j * spacing,
            nz == 1 ? origin.z : origin.z + k * spacing};
  }
  Vec3 center(std::size_t idx) const;
  /// Index of the cell whose center is nearest to x (clamped to the grid).
  std::size_t nearest(const Vec3 &x) const;
};

using Mask = std::vector<std::uint8_t>;

/// Cells whose centers lie in u.
Mask union_mask(const BallUnion &u, const VoxelGrid &grid);

/// Squared Euclidean distance (in length units) from every cell center to
/// the nearest cell with seeds[c] != 0; +inf if there are no seeds.
std::vector<double> edt_squared(const Mask &seeds, const VoxelGrid &grid);

/// The rolling-ball closing [V]^r of the ball union. A cell is outside iff
/// its center lies in an open ball B(q, d(q)) with q a cell center and
/// d(q) = dist_to_union(q) >= r.
Mask rolling_ball_close(const BallUnion &u, double r_p, const VoxelGrid &grid);

/// Closing of a cell set, with d the exact lattice distance to the set.
Mask close_mask(const Mask &mask, double r, const VoxelGrid &grid);
/// Opening [mask]_r: union of balls B(q, depth(q)), depth(q) >= r, where
/// depth is the lattice distance to the complement.
Mask open_mask(const Mask &mask, double r, const VoxelGrid &grid);
Mask rolling_ball_open(const BallUnion &u, double r_p, const VoxelGrid &grid);

enum class RegionProvenance { GridBased, AnalyticDisk };

class RegionMap {
public:
  static RegionMap from_grid(VoxelGrid grid, std::vector<RegionTag> tags);
  static RegionMap analytic_disk(double r_m, double r_iel, Vec3 center = {});

  RegionTag classify(const Vec3 &x) const;
  RegionProvenance provenance() const { return provenance_; }
  const VoxelGrid &grid() const { return grid_; }
  const std::vector<RegionTag> &tags() const { return tags_; }
  double r_m() const { return r_m_; }
  double r_iel() const { return r_iel_; }

private:
  RegionProvenance provenance_ = RegionProvenance::AnalyticDisk;
  VoxelGrid grid_;
  std::vector<RegionTag> tags_;
  double r_m_ = 0.0, r_iel_ = 0.0;
  Vec3 center_{};
};

/// Molecule = closing by r_p; IEL = {dist < r_I} minus Molecule; Ions = rest.
RegionMap build_region_map(const BallUnion &u, double r_p, double r_I,
                           const VoxelGrid &grid);

/// Requires 0 < r_m < r_iel < half_width (distance from the center to the
/// boundary of a square or disk domain).
RegionMap analytic_disk_regions(double r_m, double r_iel, double half_width);

/// VTK legacy ASCII STRUCTURED_POINTS with one integer cell value per cell.
void write_vtk_structured_points(std::ostream &out, const VoxelGrid &grid,
                                 const std::vector<int> &cell_values,
                                 const std::string &name);

} // namespace pbe
