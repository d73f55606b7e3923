#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "pbe/error.hpp"
#include "pbe/mesh.hpp"

namespace pbe {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_indices(std::ostream &out, const char *name,
                   const std::vector<int> &v) {
  out << name << ' ' << v.size() << '\n';
  for (int i : v)
    out << i << '\n';
}

class LineReader {
public:
  explicit LineReader(std::istream &in) : in_(in) {}

  // Next non-empty line with comments stripped; false at end of input.
  bool next(std::string &line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      if (auto p = line.find('#'); p != std::string::npos)
        line.erase(p);
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        return true;
    }
    return false;
  }
  int line() const { return lineno_; }

private:
  std::istream &in_;
  int lineno_ = 0;
};

} // namespace

void save_mesh(std::ostream &out, const Mesh &mesh) {
  out << "# pbe triangle mesh\n";
  out << "nodes " << mesh.nodes.size() << '\n';
  for (const auto &p : mesh.nodes)
    out << fmt(p.x) << ' ' << fmt(p.y) << '\n';
  out << "triangles " << mesh.triangles.size() << '\n';
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
    const auto &t = mesh.triangles[e];
    out << t[0] << ' ' << t[1] << ' ' << t[2] << ' '
        << static_cast<int>(mesh.elem_region[e]) << '\n';
  }
  write_indices(out, "boundary", mesh.boundary_nodes);
  write_indices(out, "interface", mesh.interface_nodes);
  out << "circles " << mesh.circles.size() << '\n';
  for (double r : mesh.circles)
    out << fmt(r) << '\n';
}

std::string save_mesh(const Mesh &mesh) {
  std::ostringstream os;
  save_mesh(os, mesh);
  return os.str();
}

Mesh load_mesh(std::istream &in) {
  LineReader reader(in);
  Mesh mesh;
  std::map<std::string, bool> seen{{"nodes", false},
                                   {"triangles", false},
                                   {"boundary", false},
                                   {"interface", false},
                                   {"circles", false}};
  std::string line;
  while (reader.next(line)) {
    std::istringstream hs(line);
    std::string name;
    long long count = -1;
    std::string extra;
    if (!(hs >> name >> count) || (hs >> extra) || count < 0)
      throw ParseError("expected '<section> <count>' header", reader.line());
    auto it = seen.find(name);
    if (it == seen.end())
      throw ParseError("unknown section '" + name + "'", reader.line());
    if (it->second)
      throw ParseError("duplicate section '" + name + "'", reader.line());
    it->second = true;
    for (long long i = 0; i < count; ++i) {
      if (!reader.next(line))
        throw ParseError("section '" + name + "' truncated: expected " +
                             std::to_string(count) + " entries, got " +
                             std::to_string(i),
                         reader.line());
      std::istringstream ls(line);
      bool ok = false;
      if (name == "nodes") {
        Vec3 p{};
        ok = static_cast<bool>(ls >> p.x >> p.y);
        mesh.nodes.push_back(p);
      } else if (name == "triangles") {
        Triangle t;
        int tag = -1;
        ok = static_cast<bool>(ls >> t[0] >> t[1] >> t[2] >> tag) && tag >= 0 && tag <= 2;
        mesh.triangles.push_back(t);
        mesh.elem_region.push_back(static_cast<RegionTag>(ok ? tag : 0));
      } else if (name == "circles") {
        double r = 0.0;
        ok = static_cast<bool>(ls >> r);
        mesh.circles.push_back(r);
      } else {
        int v = -1;
        ok = static_cast<bool>(ls >> v);
        (name == "boundary" ? mesh.boundary_nodes : mesh.interface_nodes).push_back(v);
      }
      if (ok && (ls >> extra))
        ok = false;
      if (!ok)
        throw ParseError("malformed entry in section '" + name + "'", reader.line());
    }
  }
  for (const auto &[name, present] : seen)
    if (!present)
      throw ParseError("missing section '" + name + "'", reader.line());
  try {
    mesh.validate();
  } catch (const MeshError &e) {
    throw ParseError(std::string("invalid mesh: ") + e.what(), reader.line());
  }
  return mesh;
}

Mesh load_mesh_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open mesh file " + path, 0);
  return load_mesh(in);
}

void save_mesh_file(const std::string &path, const Mesh &mesh) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write mesh file " + path);
  save_mesh(out, mesh);
  if (!out)
    throw Error("error writing mesh file " + path);
}

} // namespace pbe
