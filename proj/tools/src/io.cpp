#include "pbesolve/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pbe/error.hpp"

namespace pbesolve {

namespace {

std::string g17(double v) {
  if (std::isnan(v))
    return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw pbe::Error("cannot write '" + path + "'");
  return out;
}

void check_written(std::ofstream &out, const std::string &path) {
  out.flush();
  if (!out)
    throw pbe::Error("write to '" + path + "' failed");
}

} // namespace

void write_vtk(std::ostream &out, const pbe::Mesh &mesh, const std::vector<NamedField> &fields,
               bool with_regions) {
  for (const auto &[name, values] : fields)
    if (!values || values->size() != mesh.num_nodes())
      throw pbe::Error("field '" + name + "' does not match the mesh");
  out << "# vtk DataFile Version 3.0\npbesolve\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto &p : mesh.nodes)
    out << g17(p.x) << ' ' << g17(p.y) << " 0\n";
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto &t : mesh.triangles)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e)
    out << "5\n";
  if (with_regions) {
    out << "CELL_DATA " << mesh.num_triangles() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
    for (auto tag : mesh.elem_region)
      out << static_cast<int>(tag) << '\n';
  }
  if (!fields.empty()) {
    out << "POINT_DATA " << mesh.num_nodes() << '\n';
    for (const auto &[name, values] : fields) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : *values)
        out << g17(v) << '\n';
    }
  }
}

void write_vtk_file(const std::string &path, const pbe::Mesh &mesh,
                    const std::vector<NamedField> &fields, bool with_regions) {
  auto out = open_out(path);
  write_vtk(out, mesh, fields, with_regions);
  check_written(out, path);
}

void write_csv(std::ostream &out, const Table &table) {
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto &row : table.rows) {
    if (row.size() != table.header.size())
      throw pbe::Error("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << g17(row[i]);
    out << '\n';
  }
}

void write_csv_file(const std::string &path, const Table &table) {
  auto out = open_out(path);
  write_csv(out, table);
  check_written(out, path);
}

Table read_csv(std::istream &in) {
  Table t;
  std::string line;
  int lineno = 0;
  auto split = [](const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string cell; std::getline(ss, cell, ',');)
      out.push_back(cell);
    if (!s.empty() && s.back() == ',')
      out.emplace_back();
    return out;
  };
  if (!std::getline(in, line))
    throw pbe::ParseError("empty CSV input", 0);
  ++lineno;
  t.header = split(line);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    std::vector<double> row;
    for (const auto &cell : split(line)) {
      if (cell == "nan") {
        row.push_back(std::nan(""));
        continue;
      }
      char *end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0')
        throw pbe::ParseError("non-numeric CSV cell '" + cell + "'", lineno);
      row.push_back(v);
    }
    if (row.size() != t.header.size())
      throw pbe::ParseError("CSV row width does not match the header", lineno);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string report_jsonl(const pbe::SolveReport &report, const pbe::PBEProblem &problem) {
  using nlohmann::ordered_json;
  auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json s;
  s["record"] = "summary";
  s["status"] = report.converged ? "converged" : "failed";
  s["method"] = report.method;
  s["splitting"] = pbe::to_string(report.splitting);
  s["newton_iterations"] = report.newton_iterations;
  s["initial_energy"] = num(report.initial_energy);
  s["final_energy"] = num(report.final_energy);
  s["final_residual"] = num(report.final_residual);
  s["rhs_norm"] = num(report.rhs_norm);
  s["tolerance"] = num(report.tolerance);
  s["max_abs_b"] = num(report.max_abs_b);
  s["cg_iterations"] = report.cg_iterations;
  s["cg_residual"] = num(report.cg_residual);
  s["uH_cg_iterations"] = report.uH_cg_iterations;
  const auto &o = report.options;
  s["options"] = {{"tol", o.tol},         {"maxit", o.maxit},     {"armijo_c", o.armijo_c},
                  {"backtrack", o.backtrack}, {"min_step", o.min_step}, {"cg_tol", o.cg_tol},
                  {"cg_maxit", o.cg_maxit},
                  {"precond", o.precond == pbe::Preconditioner::Jacobi ? "jacobi" : "none"}};
  s["unit_mode"] = problem.unit_mode == pbe::UnitMode::Physical ? "physical" : "synthetic";
  s["scale"] = problem.scale();
  s["coulomb_scale"] = problem.coulomb_scale();
  s["constants"] = {{"avogadro", problem.constants.avogadro},
                    {"elementary_charge", problem.constants.elementary_charge},
                    {"boltzmann", problem.constants.boltzmann}};
  s["temperature"] = problem.temperature;
  std::string out = s.dump() + "\n";
  for (const auto &it : report.history) {
    ordered_json r;
    r["record"] = "iteration";
    r["iteration"] = it.iteration;
    r["residual"] = num(it.residual);
    r["energy"] = num(it.energy);
    r["energy_change"] = num(it.energy_change);
    r["step"] = num(it.step);
    r["backtracks"] = it.backtracks;
    r["cg_iterations"] = it.cg_iterations;
    r["cg_residual"] = num(it.cg_residual);
    out += r.dump() + "\n";
  }
  return out;
}

void write_text_file(const std::string &path, const std::string &text) {
  auto out = open_out(path);
  out << text;
  check_written(out, path);
}

} // namespace pbesolve
