#include "pbesolve/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pbe/error.hpp"
#include "pbe/geometry.hpp"

namespace pbesolve {

using pbe::ConfigError;

const char *to_string(Command c) {
  switch (c) {
  case Command::Surface:
    return "surface";
  case Command::Mesh:
    return "mesh";
  case Command::Solve:
    return "solve";
  case Command::Verify:
    return "verify";
  case Command::Convergence:
    return "convergence";
  case Command::Energy:
    return "energy";
  }
  return "unknown";
}

Command command_from_string(const std::string &name) {
  for (Command c : {Command::Surface, Command::Mesh, Command::Solve, Command::Verify,
                    Command::Convergence, Command::Energy})
    if (name == to_string(c))
      return c;
  throw ConfigError("unknown command '" + name + "'");
}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;)
    out.push_back(t);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string &s, const std::string &key, int line) {
  double v = 0.0;
  const char *end = s.data() + s.size();
  auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("key '" + key + "': expected a number, got '" + s + "'", line);
  return v;
}

long long to_integer(const std::string &s, const std::string &key, int line) {
  long long v = 0;
  const char *end = s.data() + s.size();
  auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'", line);
  return v;
}

template <class E>
E to_enum(const std::string &s, const std::string &key, int line,
          const std::vector<std::pair<std::string, E>> &names) {
  for (const auto &[n, e] : names)
    if (n == s)
      return e;
  std::string allowed;
  for (const auto &[n, e] : names)
    allowed += (allowed.empty() ? "" : ", ") + n;
  throw ConfigError("key '" + key + "': '" + s + "' is not one of " + allowed, line);
}

template <class E>
std::string enum_name(E e, const std::vector<std::pair<std::string, E>> &names) {
  for (const auto &[n, v] : names)
    if (v == e)
      return n;
  return "?";
}

const std::vector<std::pair<std::string, pbe::UnitMode>> kUnitModes{
    {"synthetic", pbe::UnitMode::Synthetic}, {"physical", pbe::UnitMode::Physical}};
const std::vector<std::pair<std::string, ConcentrationUnit>> kConcUnits{
    {"number_density", ConcentrationUnit::NumberDensity}, {"molar", ConcentrationUnit::Molar}};
const std::vector<std::pair<std::string, Method>> kMethods{{"gpbe", Method::GPBE},
                                                           {"lgpbe", Method::LGPBE}};
const std::vector<std::pair<std::string, pbe::Splitting>> kSplittings{
    {"two_term", pbe::Splitting::TwoTerm}, {"three_term", pbe::Splitting::ThreeTerm}};
const std::vector<std::pair<std::string, pbe::BoundaryMode>> kBoundary{
    {"zero", pbe::BoundaryMode::Zero},
    {"restricted_G", pbe::BoundaryMode::RestrictedG},
    {"screened_coulomb", pbe::BoundaryMode::ScreenedCoulomb}};
const std::vector<std::pair<std::string, pbe::Preconditioner>> kPrecond{
    {"jacobi", pbe::Preconditioner::Jacobi}, {"none", pbe::Preconditioner::None}};
const std::vector<std::pair<std::string, InitialGuess>> kInit{{"zero", InitialGuess::Zero},
                                                              {"random", InitialGuess::Random}};
const std::vector<std::pair<std::string, pbe::CaseId>> kCases{
    {"linear_jump", pbe::CaseId::LinearJump},
    {"semilinear_neutral", pbe::CaseId::SemilinearNeutral},
    {"semilinear_nonneutral", pbe::CaseId::SemilinearNonneutral},
    {"exact_linear", pbe::CaseId::ExactLinear}};

struct Key {
  std::string section;
  std::string name;
  bool required = false;
  bool repeated = false;
  std::function<void(RunConfig &, const std::string &, int)> set;
  std::function<std::vector<std::string>(const RunConfig &)> get;
};

Key real(std::string sec, std::string name, double RunConfig::*m, bool required = false) {
  Key k{sec, name, required, false, nullptr, nullptr};
  k.set = [m, name](RunConfig &c, const std::string &v, int line) {
    c.*m = to_double(v, name, line);
  };
  k.get = [m](const RunConfig &c) { return std::vector<std::string>{fmt(c.*m)}; };
  return k;
}

template <class I> Key integer(std::string sec, std::string name, I RunConfig::*m) {
  Key k{sec, name, false, false, nullptr, nullptr};
  k.set = [m, name](RunConfig &c, const std::string &v, int line) {
    const long long x = to_integer(v, name, line);
    if (x < 0 && std::is_unsigned_v<I>)
      throw ConfigError("key '" + name + "': must be nonnegative", line);
    c.*m = static_cast<I>(x);
  };
  k.get = [m](const RunConfig &c) { return std::vector<std::string>{std::to_string(c.*m)}; };
  return k;
}

template <class E>
Key enumeration(std::string sec, std::string name, E RunConfig::*m,
                const std::vector<std::pair<std::string, E>> &names) {
  Key k{sec, name, false, false, nullptr, nullptr};
  k.set = [m, name, &names](RunConfig &c, const std::string &v, int line) {
    c.*m = to_enum(v, name, line, names);
  };
  k.get = [m, &names](const RunConfig &c) {
    return std::vector<std::string>{enum_name(c.*m, names)};
  };
  return k;
}

Key text(std::string sec, std::string name, std::string RunConfig::*m) {
  Key k{sec, name, false, false, nullptr, nullptr};
  k.set = [m](RunConfig &c, const std::string &v, int) { c.*m = v; };
  k.get = [m](const RunConfig &c) { return std::vector<std::string>{c.*m}; };
  return k;
}

const std::vector<Key> &keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back(text("run", "output", &RunConfig::output));
    t.push_back(integer("run", "seed", &RunConfig::seed));

    t.push_back(real("geometry", "r_m", &RunConfig::r_m, true));
    t.push_back(real("geometry", "r_iel", &RunConfig::r_iel, true));
    t.push_back(real("geometry", "half_width", &RunConfig::half_width, true));
    t.push_back(integer("geometry", "n", &RunConfig::n));
    t.push_back(integer("geometry", "refinements", &RunConfig::refinements));
    t.push_back(text("geometry", "mesh_file", &RunConfig::mesh_file));
    t.push_back(real("geometry", "probe_radius", &RunConfig::probe_radius));
    t.push_back(real("geometry", "ion_radius", &RunConfig::ion_radius));
    t.push_back(real("geometry", "grid_spacing", &RunConfig::grid_spacing));

    t.push_back(integer("charges", "dimension", &RunConfig::dimension));
    t.push_back(text("charges", "pqr", &RunConfig::pqr));
    t.push_back(real("charges", "length_per_angstrom", &RunConfig::length_per_angstrom));
    {
      Key k{"charges", "charge", false, true, nullptr, nullptr};
      k.set = [](RunConfig &c, const std::string &v, int line) {
        const auto f = split_ws(v);
        if (f.size() != 5)
          throw ConfigError("key 'charge': expected 'x y z valence radius'", line);
        c.charges.push_back({to_double(f[0], "charge", line), to_double(f[1], "charge", line),
                             to_double(f[2], "charge", line), to_double(f[3], "charge", line),
                             to_double(f[4], "charge", line)});
      };
      k.get = [](const RunConfig &c) {
        std::vector<std::string> out;
        for (const auto &q : c.charges)
          out.push_back(fmt(q.x) + " " + fmt(q.y) + " " + fmt(q.z) + " " + fmt(q.valence) +
                        " " + fmt(q.radius));
        return out;
      };
      t.push_back(k);
    }

    t.push_back(enumeration("problem", "unit_mode", &RunConfig::unit_mode, kUnitModes));
    t.push_back(real("problem", "eps_m", &RunConfig::eps_m));
    t.push_back(real("problem", "eps_s", &RunConfig::eps_s));
    t.push_back(real("problem", "eps_s_gradient_x", &RunConfig::eps_s_gradient_x));
    t.push_back(real("problem", "eps_s_gradient_y", &RunConfig::eps_s_gradient_y));
    t.push_back(real("problem", "temperature", &RunConfig::temperature));
    t.push_back(real("problem", "length_unit", &RunConfig::length_unit));
    t.push_back(enumeration("problem", "concentration_unit", &RunConfig::concentration_unit,
                            kConcUnits));
    {
      Key k{"problem", "ion", false, true, nullptr, nullptr};
      k.set = [](RunConfig &c, const std::string &v, int line) {
        const auto f = split_ws(v);
        if (f.size() != 2)
          throw ConfigError("key 'ion': expected 'concentration valence'", line);
        c.species.push_back(
            {to_double(f[0], "ion", line), static_cast<int>(to_integer(f[1], "ion", line))});
      };
      k.get = [](const RunConfig &c) {
        std::vector<std::string> out;
        for (const auto &s : c.species)
          out.push_back(fmt(s.concentration) + " " + std::to_string(s.valence));
        return out;
      };
      t.push_back(k);
    }

    t.push_back(enumeration("solver", "method", &RunConfig::method, kMethods));
    t.push_back(enumeration("solver", "splitting", &RunConfig::splitting, kSplittings));
    t.push_back(enumeration("solver", "bc", &RunConfig::bc, kBoundary));
    t.push_back(real("solver", "kappa", &RunConfig::kappa));
    t.push_back(real("solver", "tol", &RunConfig::tol));
    t.push_back(integer("solver", "maxit", &RunConfig::maxit));
    t.push_back(real("solver", "armijo_c", &RunConfig::armijo_c));
    t.push_back(real("solver", "backtrack", &RunConfig::backtrack));
    t.push_back(real("solver", "min_step", &RunConfig::min_step));
    t.push_back(real("solver", "cg_tol", &RunConfig::cg_tol));
    t.push_back(integer("solver", "cg_maxit", &RunConfig::cg_maxit));
    t.push_back(enumeration("solver", "precond", &RunConfig::precond, kPrecond));
    t.push_back(enumeration("solver", "init", &RunConfig::init, kInit));
    t.push_back(real("solver", "init_amplitude", &RunConfig::init_amplitude));

    t.push_back(enumeration("convergence", "case", &RunConfig::study_case, kCases));
    t.push_back(integer("convergence", "n", &RunConfig::study_n));
    t.push_back(integer("convergence", "levels", &RunConfig::study_levels));

    t.push_back(integer("verify", "equivalence_levels", &RunConfig::equivalence_levels));
    t.push_back(integer("verify", "theta_levels", &RunConfig::theta_levels));
    return t;
  }();
  return table;
}

} // namespace

RunConfig parse_config(const std::string &text, const std::string &base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  std::set<std::string> sections;
  for (const auto &k : keys())
    sections.insert(k.section);
  std::set<std::pair<std::string, std::string>> seen;
  std::map<std::string, int> header_line;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty())
      continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("malformed section header '" + s + "'", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!sections.count(section))
        throw ConfigError("unknown section [" + section + "]", line);
      header_line.emplace(section, line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + s + "'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty())
      throw ConfigError("key '" + key + "' outside of any section", line);
    const Key *k = nullptr;
    for (const auto &cand : keys())
      if (cand.section == section && cand.name == key)
        k = &cand;
    if (!k)
      throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    if (value.empty())
      throw ConfigError("key '" + key + "' has no value", line);
    if (!k->repeated && !seen.insert({section, key}).second)
      throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line);
    seen.insert({section, key});
    k->set(c, value, line);
  }
  for (const auto &k : keys())
    if (k.required && !seen.count({k.section, k.name}))
      throw ConfigError("missing required key '" + k.name + "' in [" + k.section + "]",
                        header_line.count(k.section) ? header_line[k.section] : line);
  return c;
}

RunConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string echo_config(const RunConfig &c) {
  std::string out;
  std::string section;
  for (const auto &k : keys()) {
    if (k.section != section) {
      out += (section.empty() ? "" : "\n") + ("[" + k.section + "]\n");
      section = k.section;
    }
    const auto values = k.get(c);
    for (const auto &v : values)
      if (!v.empty())
        out += k.name + " = " + v + "\n";
  }
  return out;
}

std::string RunConfig::resolve(const std::string &path) const {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute())
    return path;
  return (std::filesystem::path(base_dir) / path).string();
}

void validate(const RunConfig &c) {
  auto require = [](bool ok, const std::string &msg) {
    if (!ok)
      throw ConfigError(msg);
  };
  require(c.r_m > 0.0 && c.r_m < c.r_iel && c.r_iel < c.half_width,
          "geometry needs 0 < r_m < r_iel < half_width");
  require(c.n >= 8, "geometry.n must be at least 8");
  require(c.refinements >= 0 && c.refinements <= 6, "geometry.refinements must be in [0, 6]");
  require(c.probe_radius > 0.0 && c.ion_radius > c.probe_radius,
          "geometry needs ion_radius > probe_radius > 0");
  require(c.grid_spacing > 0.0, "geometry.grid_spacing must be positive");
  require(c.dimension == 2 || c.dimension == 3, "charges.dimension must be 2 or 3");
  require(c.length_per_angstrom > 0.0, "charges.length_per_angstrom must be positive");
  for (const auto &q : c.charges)
    require(q.radius >= 0.0, "charge radius must be nonnegative");
  require(c.eps_m > 0.0 && c.eps_s > 0.0, "permittivities must be positive");
  require(c.temperature > 0.0 && c.length_unit > 0.0,
          "temperature and length_unit must be positive");
  for (const auto &s : c.species)
    require(s.concentration >= 0.0 && s.valence != 0,
            "ion species need concentration >= 0 and nonzero valence");
  require(c.tol > 0.0 && c.tol < 1.0, "solver.tol must be in (0, 1)");
  require(c.cg_tol > 0.0 && c.cg_tol < 1.0, "solver.cg_tol must be in (0, 1)");
  require(c.maxit >= 1 && c.cg_maxit >= 1, "iteration limits must be positive");
  require(c.armijo_c > 0.0 && c.armijo_c < 1.0, "solver.armijo_c must be in (0, 1)");
  require(c.backtrack > 0.0 && c.backtrack < 1.0, "solver.backtrack must be in (0, 1)");
  require(c.min_step > 0.0 && c.min_step < 1.0, "solver.min_step must be in (0, 1)");
  require(c.kappa >= 0.0, "solver.kappa must be nonnegative");
  require(c.init_amplitude >= 0.0, "solver.init_amplitude must be nonnegative");
  require(!(c.bc == pbe::BoundaryMode::ScreenedCoulomb && c.dimension == 2),
          "bc = screened_coulomb is only available for dimension 3");
  require(c.study_n >= 8 && c.study_levels >= 2 && c.study_levels <= 7,
          "convergence needs n >= 8 and levels in [2, 7]");
  require(c.equivalence_levels >= 2 && c.equivalence_levels <= 6,
          "verify.equivalence_levels must be in [2, 6]");
  require(c.theta_levels >= 2, "verify.theta_levels must be at least 2");
  require(!c.output.empty(), "run.output must not be empty");
  for (const std::string *p : {&c.pqr, &c.mesh_file})
    if (!p->empty())
      require(std::filesystem::exists(c.resolve(*p)), "input file '" + *p + "' does not exist");
}

pbe::PBEProblem RunConfig::problem() const {
  pbe::PBEProblem p;
  p.eps_m = eps_m;
  p.eps_s.value = eps_s;
  p.eps_s.gradient = {eps_s_gradient_x, eps_s_gradient_y, 0.0};
  p.temperature = temperature;
  p.unit_mode = unit_mode;
  p.length_unit = length_unit;
  for (const auto &s : species) {
    double m = s.concentration;
    if (concentration_unit == ConcentrationUnit::Molar)
      m = pbe::molar_to_number_density(p.constants, m);
    p.species.push_back({m, s.valence});
  }
  try {
    p.validate();
  } catch (const pbe::DomainError &e) {
    throw pbe::ConfigError(std::string("[problem] ") + e.what());
  }
  return p;
}

pbe::ChargeSystem RunConfig::charge_system() const {
  pbe::ChargeSystem sys;
  if (!pqr.empty()) {
    sys = pbe::ingest_pqr_file(resolve(pqr), length_per_angstrom, dimension);
  } else {
    sys.dimension = dimension;
    for (const auto &q : charges)
      sys.charges.push_back({{q.x, q.y, dimension == 3 ? q.z : 0.0}, q.valence, q.radius});
  }
  sys.validate();
  return sys;
}

pbe::SolverOptions RunConfig::solver_options() const {
  pbe::SolverOptions o;
  o.tol = tol;
  o.maxit = maxit;
  o.armijo_c = armijo_c;
  o.backtrack = backtrack;
  o.min_step = min_step;
  o.cg_tol = cg_tol;
  o.cg_maxit = cg_maxit;
  o.precond = precond;
  return o;
}

pbe::BoundarySpec RunConfig::boundary() const {
  pbe::BoundarySpec b;
  b.mode = bc;
  b.kappa = kappa;
  b.eps_s = eps_s;
  b.eps_m = eps_m;
  return b;
}

} // namespace pbesolve
