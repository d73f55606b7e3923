#pragma once

// 2-D triangular meshes with per-element region tags, fitted to the
// concentric circles of the disk test geometry.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "pbe/model.hpp"
#include "pbe/vec.hpp"

namespace pbe {

using Triangle = std::array<int, 3>;

struct Mesh {
  std::vector<Vec3> nodes; // z = 0
  std::vector<Triangle> triangles;
  std::vector<RegionTag> elem_region;
  std::vector<int> boundary_nodes;  // sorted
  std::vector<int> interface_nodes; // sorted
  std::vector<double> circles;      // radii about the origin used for snapping

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double signed_area(std::size_t e) const;
  double diameter() const;
  /// Longest edge over all elements.
  double max_edge() const;
  double min_angle() const; // radians

  /// Orientation, nondegeneracy, conformity, marked boundary and
  /// tag-consistent interfaces. Throws MeshError.
  void validate() const;

  friend bool operator==(const Mesh &, const Mesh &) = default;
};

/// Concentric-ring mesh of the square [-L, L]^2 with nodes exactly on the
/// circles |x| = r_m and |x| = r_iel; n nodes on the inner circle. No node
/// lies at the origin, which is interior to an element.
Mesh generate_disk_mesh(double r_m, double r_iel, double L, int n);

/// Structured mesh of a rectangle, each cell split along its diagonal.
Mesh generate_rect_mesh(double x0, double y0, double x1, double y1, int nx,
                        int ny, RegionTag tag = RegionTag::Ions);

/// Red refinement; midpoints of edges between differently tagged elements
/// are pushed radially onto their circle.
Mesh refine_uniform(const Mesh &mesh);

struct Submesh {
  Mesh mesh;
  std::vector<int> to_parent; // submesh node -> parent node
  std::vector<int> to_child;  // parent node -> submesh node or -1
};

/// Elements with the given tag; boundary marks the submesh's own boundary.
Submesh extract_submesh(const Mesh &mesh, RegionTag tag);

void save_mesh(std::ostream &out, const Mesh &mesh);
std::string save_mesh(const Mesh &mesh);
Mesh load_mesh(std::istream &in);
Mesh load_mesh_file(const std::string &path);
void save_mesh_file(const std::string &path, const Mesh &mesh);

/// P1 coefficient vector on a mesh.
struct DiscreteField {
  const Mesh *mesh = nullptr;
  std::vector<double> values;

  DiscreteField() = default;
  explicit DiscreteField(const Mesh &m, double fill = 0.0)
      : mesh(&m), values(m.num_nodes(), fill) {}
  DiscreteField(const Mesh &m, std::vector<double> v);
};

} // namespace pbe
