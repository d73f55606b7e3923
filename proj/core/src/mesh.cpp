#include "pbe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>
#include <unordered_map>

#include "pbe/error.hpp"

namespace pbe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec3 &a, const Vec3 &b, const Vec3 &c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

std::uint64_t edge_key(int a, int b) {
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct EdgeInfo {
  int count = 0;
  RegionTag tags[2]{};
};

std::unordered_map<std::uint64_t, EdgeInfo> edge_table(const Mesh &m) {
  std::unordered_map<std::uint64_t, EdgeInfo> edges;
  edges.reserve(3 * m.triangles.size());
  for (std::size_t e = 0; e < m.triangles.size(); ++e)
    for (int k = 0; k < 3; ++k) {
      auto &info = edges[edge_key(m.triangles[e][k], m.triangles[e][(k + 1) % 3])];
      if (info.count < 2)
        info.tags[info.count] = m.elem_region[e];
      ++info.count;
    }
  return edges;
}

class MeshBuilder {
public:
  int add_node(Vec3 p) {
    mesh.nodes.push_back(p);
    return static_cast<int>(mesh.nodes.size()) - 1;
  }
  void add_triangle(int a, int b, int c, RegionTag tag) {
    if (cross(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]) < 0.0)
      std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
    mesh.elem_region.push_back(tag);
  }
  Mesh mesh;
};

struct Ring {
  int first = 0;
  int count = 0;
  double offset = 0.0;
  int node(int i) const { return first + ((i % count) + count) % count; }
  double angle(int i) const { return offset + kTwoPi * i / count; }
};

Ring add_circle_ring(MeshBuilder &b, double radius, int count, double offset) {
  Ring r{static_cast<int>(b.mesh.nodes.size()), count, offset};
  for (int i = 0; i < count; ++i) {
    const double t = r.angle(i);
    b.add_node({radius * std::cos(t), radius * std::sin(t), 0.0});
  }
  return r;
}

// Triangulates the annular strip between two rings by merging their
// angular orderings.
void zip_rings(MeshBuilder &b, const Ring &A, const Ring &B, RegionTag tag) {
  const double a0 = A.angle(0);
  int js = 0;
  double best = 1e300;
  for (int j = 0; j < B.count; ++j) {
    const double d = std::remainder(B.angle(j) - a0, kTwoPi);
    if (std::abs(d) < best) {
      best = std::abs(d);
      js = j;
    }
  }
  const double b0 = a0 + std::remainder(B.angle(js) - a0, kTwoPi);
  auto angA = [&](int i) { return a0 + kTwoPi * i / A.count; };
  auto angB = [&](int j) { return b0 + kTwoPi * j / B.count; };
  int i = 0, j = 0;
  while (i < A.count || j < B.count) {
    const bool advance_a =
        j == B.count || (i < A.count && angA(i + 1) <= angB(j + 1));
    if (advance_a) {
      b.add_triangle(A.node(i), A.node(i + 1), B.node(js + j), tag);
      ++i;
    } else {
      b.add_triangle(A.node(i), B.node(js + j), B.node(js + j + 1), tag);
      ++j;
    }
  }
}

} // namespace

DiscreteField::DiscreteField(const Mesh &m, std::vector<double> v)
    : mesh(&m), values(std::move(v)) {
  if (values.size() != m.num_nodes())
    throw MeshError("field length does not match node count");
}

double Mesh::signed_area(std::size_t e) const {
  const auto &t = triangles[e];
  return 0.5 * cross(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
}

double Mesh::diameter() const {
  if (nodes.empty())
    return 0.0;
  double x0 = nodes[0].x, x1 = x0, y0 = nodes[0].y, y1 = y0;
  for (const auto &p : nodes) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return std::hypot(x1 - x0, y1 - y0);
}

double Mesh::max_edge() const {
  double h = 0.0;
  for (const auto &t : triangles)
    for (int k = 0; k < 3; ++k)
      h = std::max(h, distance(nodes[t[k]], nodes[t[(k + 1) % 3]]));
  return h;
}

double Mesh::min_angle() const {
  double best = std::numbers::pi;
  for (const auto &t : triangles)
    for (int k = 0; k < 3; ++k) {
      const Vec3 u = nodes[t[(k + 1) % 3]] - nodes[t[k]];
      const Vec3 v = nodes[t[(k + 2) % 3]] - nodes[t[k]];
      const double c = dot(u, v) / (norm(u) * norm(v));
      best = std::min(best, std::acos(std::clamp(c, -1.0, 1.0)));
    }
  return best;
}

void Mesh::validate() const {
  if (elem_region.size() != triangles.size())
    throw MeshError("region tag count does not match triangle count");
  const int nn = static_cast<int>(nodes.size());
  const double min_area = 1e-14 * diameter() * diameter();
  for (std::size_t e = 0; e < triangles.size(); ++e) {
    for (int v : triangles[e])
      if (v < 0 || v >= nn)
        throw MeshError("triangle " + std::to_string(e) + " has node index out of range");
    if (!(signed_area(e) > min_area))
      throw MeshError("triangle " + std::to_string(e) +
                      " is degenerate or negatively oriented");
  }
  auto sorted_valid = [nn](const std::vector<int> &v, const char *what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 0 || v[i] >= nn)
        throw MeshError(std::string(what) + " node index out of range");
      if (i > 0 && v[i] <= v[i - 1])
        throw MeshError(std::string(what) + " node list not sorted/unique");
    }
  };
  sorted_valid(boundary_nodes, "boundary");
  sorted_valid(interface_nodes, "interface");
  auto has = [](const std::vector<int> &v, int x) {
    return std::binary_search(v.begin(), v.end(), x);
  };
  for (const auto &[key, info] : edge_table(*this)) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (info.count > 2)
      throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") shared by more than two triangles");
    if (info.count == 1 && !(has(boundary_nodes, a) && has(boundary_nodes, b)))
      throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") has one triangle but is not on the marked boundary");
    if (info.count == 2 && info.tags[0] != info.tags[1] &&
        !(has(interface_nodes, a) && has(interface_nodes, b)))
      throw MeshError("interface edge (" + std::to_string(a) + ", " +
                      std::to_string(b) + ") has unmarked nodes");
  }
}

Mesh generate_disk_mesh(double r_m, double r_iel, double L, int n) {
  if (!(r_m > 0.0 && r_m < r_iel && r_iel < L))
    throw MeshError("disk mesh requires 0 < r_m < r_iel < L");
  if (n < 8)
    throw MeshError("disk mesh requires n >= 8");
  const double h = kTwoPi * r_m / n;
  MeshBuilder b;
  std::vector<int> interface;

  // Molecule: rings growing from a hexagon to n nodes on |x| = r_m.
  const int K = std::max(2, static_cast<int>(std::lround(r_m / h)));
  std::vector<Ring> rings;
  for (int k = 1; k <= K; ++k) {
    const int count =
        k == K ? n
               : static_cast<int>(std::lround(6.0 + (n - 6.0) * (k - 1) / (K - 1.0)));
    const double radius = k == K ? r_m : r_m * k / K;
    rings.push_back(add_circle_ring(b, radius, std::max(6, count),
                                    (k % 2) * std::numbers::pi / std::max(6, count)));
  }
  {
    const Ring &c = rings[0];
    b.add_triangle(c.node(0), c.node(2), c.node(4), RegionTag::Molecule);
    for (int i = 0; i < 6; i += 2)
      b.add_triangle(c.node(i), c.node(i + 1), c.node(i + 2), RegionTag::Molecule);
  }
  for (int k = 1; k < K; ++k)
    zip_rings(b, rings[k - 1], rings[k], RegionTag::Molecule);
  for (int i = 0; i < rings.back().count; ++i)
    interface.push_back(rings.back().node(i));

  // Ion exclusion layer, ending with a ring aligned to the square corners.
  const int m = std::max(8, 4 * static_cast<int>(std::ceil(kTwoPi * r_iel / (4.0 * h))));
  const int K2 = std::max(1, static_cast<int>(std::lround((r_iel - r_m) / h)));
  Ring prev = rings.back();
  for (int j = 1; j <= K2; ++j) {
    const bool last = j == K2;
    const int count = last ? m : static_cast<int>(std::lround(n + double(m - n) * j / K2));
    const double radius = last ? r_iel : r_m + (r_iel - r_m) * j / K2;
    const double offset = last ? std::numbers::pi / 4.0 : (j % 2) * std::numbers::pi / count;
    Ring ring = add_circle_ring(b, radius, count, offset);
    zip_rings(b, prev, ring, RegionTag::IEL);
    prev = ring;
  }
  for (int i = 0; i < prev.count; ++i)
    interface.push_back(prev.node(i));

  // Ions: rays from the r_iel ring to the square, geometric layer spacing.
  const Ring iel = prev;
  const double q = 1.0 + kTwoPi / m;
  const int J = std::max(1, static_cast<int>(std::ceil(std::log(L / r_iel) / std::log(q))));
  std::vector<int> below(m), above(m);
  for (int i = 0; i < m; ++i)
    below[i] = iel.node(i);
  std::vector<int> boundary;
  for (int j = 1; j <= J; ++j) {
    const double s = (std::pow(q, j) - 1.0) / (std::pow(q, J) - 1.0);
    for (int i = 0; i < m; ++i) {
      const double t = iel.angle(i);
      const double c = std::cos(t), sn = std::sin(t);
      Vec3 edge;
      if (i % (m / 4) == 0) {
        edge = {c > 0 ? L : -L, sn > 0 ? L : -L, 0.0};
      } else if (std::abs(c) >= std::abs(sn)) {
        edge = {c > 0 ? L : -L, L * sn / std::abs(c), 0.0};
      } else {
        edge = {L * c / std::abs(sn), sn > 0 ? L : -L, 0.0};
      }
      const Vec3 inner{r_iel * c, r_iel * sn, 0.0};
      above[i] = b.add_node(j == J ? edge : inner + s * (edge - inner));
      if (j == J)
        boundary.push_back(above[i]);
    }
    for (int i = 0; i < m; ++i) {
      const int i1 = (i + 1) % m;
      const int p0 = below[i], p1 = below[i1], p2 = above[i1], p3 = above[i];
      const auto &N = b.mesh.nodes;
      if (distance(N[p0], N[p2]) <= distance(N[p1], N[p3])) {
        b.add_triangle(p0, p1, p2, RegionTag::Ions);
        b.add_triangle(p0, p2, p3, RegionTag::Ions);
      } else {
        b.add_triangle(p0, p1, p3, RegionTag::Ions);
        b.add_triangle(p1, p2, p3, RegionTag::Ions);
      }
    }
    below = above;
  }

  Mesh mesh = std::move(b.mesh);
  std::sort(interface.begin(), interface.end());
  std::sort(boundary.begin(), boundary.end());
  mesh.interface_nodes = std::move(interface);
  mesh.boundary_nodes = std::move(boundary);
  mesh.circles = {r_m, r_iel};
  mesh.validate();
  return mesh;
}

Mesh generate_rect_mesh(double x0, double y0, double x1, double y1, int nx,
                        int ny, RegionTag tag) {
  if (!(x1 > x0 && y1 > y0) || nx < 1 || ny < 1)
    throw MeshError("invalid rectangle mesh parameters");
  MeshBuilder b;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      b.add_node({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny, 0.0});
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      b.add_triangle(id(i, j), id(i + 1, j), id(i + 1, j + 1), tag);
      b.add_triangle(id(i, j), id(i + 1, j + 1), id(i, j + 1), tag);
    }
  Mesh mesh = std::move(b.mesh);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (i == 0 || j == 0 || i == nx || j == ny)
        mesh.boundary_nodes.push_back(id(i, j));
  mesh.validate();
  return mesh;
}

Mesh refine_uniform(const Mesh &mesh) {
  const auto edges = edge_table(mesh);
  Mesh out;
  out.nodes = mesh.nodes;
  out.circles = mesh.circles;
  std::vector<int> boundary = mesh.boundary_nodes;
  std::vector<int> interface = mesh.interface_nodes;
  std::unordered_map<std::uint64_t, int> mid;
  mid.reserve(edges.size());

  auto midpoint = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = mid.find(key); it != mid.end())
      return it->second;
    const EdgeInfo &info = edges.at(key);
    Vec3 p = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
    const int idx = static_cast<int>(out.nodes.size());
    if (info.count == 2 && info.tags[0] != info.tags[1]) {
      const double ra = norm(mesh.nodes[a]), rb = norm(mesh.nodes[b]);
      double R = -1.0;
      for (double c : mesh.circles)
        if (std::abs(ra - c) <= 1e-9 * c && std::abs(rb - c) <= 1e-9 * c)
          R = c;
      if (R > 0.0)
        p *= R / norm(p);
      interface.push_back(idx);
    } else if (info.count == 1) {
      boundary.push_back(idx);
    }
    out.nodes.push_back(p);
    mid.emplace(key, idx);
    return idx;
  };

  const double min_area = 1e-14 * mesh.diameter() * mesh.diameter();
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
    const auto [a, b, c] = mesh.triangles[e];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    const Triangle kids[4] = {{a, ab, ca}, {ab, b, bc}, {ca, bc, c}, {ab, bc, ca}};
    for (const auto &t : kids) {
      if (!(0.5 * cross(out.nodes[t[0]], out.nodes[t[1]], out.nodes[t[2]]) > min_area))
        throw MeshError("refinement inverts a child of triangle " + std::to_string(e));
      out.triangles.push_back(t);
      out.elem_region.push_back(mesh.elem_region[e]);
    }
  }
  std::sort(boundary.begin(), boundary.end());
  std::sort(interface.begin(), interface.end());
  out.boundary_nodes = std::move(boundary);
  out.interface_nodes = std::move(interface);
  out.validate();
  return out;
}

Submesh extract_submesh(const Mesh &mesh, RegionTag tag) {
  Submesh s;
  s.to_child.assign(mesh.num_nodes(), -1);
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
    if (mesh.elem_region[e] != tag)
      continue;
    Triangle t;
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles[e][k];
      if (s.to_child[v] < 0) {
        s.to_child[v] = static_cast<int>(s.to_parent.size());
        s.to_parent.push_back(v);
        s.mesh.nodes.push_back(mesh.nodes[v]);
      }
      t[k] = s.to_child[v];
    }
    s.mesh.triangles.push_back(t);
    s.mesh.elem_region.push_back(tag);
  }
  if (s.mesh.triangles.empty())
    throw MeshError(std::string("no elements tagged ") + to_string(tag));
  for (const auto &[key, info] : edge_table(s.mesh))
    if (info.count == 1) {
      s.mesh.boundary_nodes.push_back(static_cast<int>(key >> 32));
      s.mesh.boundary_nodes.push_back(static_cast<int>(key & 0xffffffffu));
    }
  auto &bn = s.mesh.boundary_nodes;
  std::sort(bn.begin(), bn.end());
  bn.erase(std::unique(bn.begin(), bn.end()), bn.end());
  for (int v : mesh.interface_nodes)
    if (s.to_child[v] >= 0)
      s.mesh.interface_nodes.push_back(s.to_child[v]);
  std::sort(s.mesh.interface_nodes.begin(), s.mesh.interface_nodes.end());
  s.mesh.circles = mesh.circles;
  s.mesh.validate();
  return s;
}

} // namespace pbe
