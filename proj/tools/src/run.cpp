#include "pbesolve/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pbe/error.hpp"
#include "pbe/geometry.hpp"
#include "pbe/mesh.hpp"
#include "pbe/solver.hpp"
#include "pbe/verify.hpp"
#include "pbesolve/io.hpp"

namespace pbesolve {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const pbe::SolverError *>(&e) || dynamic_cast<const pbe::DomainError *>(&e) ||
      dynamic_cast<const pbe::SingularityError *>(&e))
    return kSolverFailure;
  if (dynamic_cast<const pbe::Error *>(&e))
    return kInputError;
  return kSolverFailure;
}

namespace {

struct Setup {
  pbe::PBEProblem problem;
  pbe::ChargeSystem charges;
  pbe::Mesh mesh;
  pbe::CoulombField field;
};

pbe::Mesh build_mesh(const RunConfig &c) {
  pbe::Mesh mesh = c.mesh_file.empty()
                       ? pbe::generate_disk_mesh(c.r_m, c.r_iel, c.half_width, c.n)
                       : pbe::load_mesh_file(c.resolve(c.mesh_file));
  for (int i = 0; i < c.refinements; ++i)
    mesh = pbe::refine_uniform(mesh);
  return mesh;
}

Setup make_setup(const RunConfig &c) {
  Setup s;
  s.problem = c.problem();
  s.charges = c.charge_system();
  if (s.charges.dimension != 2)
    throw pbe::ConfigError("finite-element solves need charges.dimension = 2");
  s.mesh = build_mesh(c);
  for (const auto &q : s.charges.charges) {
    const int e = pbe::locate(s.mesh, q.position);
    if (e < 0 || s.mesh.elem_region[e] != pbe::RegionTag::Molecule)
      throw pbe::ConfigError("charge at (" + std::to_string(q.position.x) + ", " +
                             std::to_string(q.position.y) + ") is not inside the molecule");
  }
  s.field = pbe::CoulombField::from_problem(s.problem, s.charges, s.mesh.diameter());
  return s;
}

// Uniform in (-1, 1) from the raw 64-bit engine output, independent of the
// standard library's distribution implementation.
std::vector<double> random_init(const Setup &s, const RunConfig &c, pbe::Splitting split,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> u(s.mesh.num_nodes());
  for (double &v : u)
    v = c.init_amplitude * (2.0 * static_cast<double>(rng() >> 11) * 0x1p-53 - 1.0);
  for (const auto &[i, g] : pbe::regular_dirichlet_data(s.mesh, s.field, split, c.boundary()))
    u[i] = g;
  return u;
}

pbe::SplitSolution solve(const Setup &s, const RunConfig &c, pbe::Splitting split, Method method,
                         const std::vector<double> *init = nullptr) {
  if (method == Method::LGPBE)
    return pbe::solve_lgpbe(s.problem, s.mesh, s.field, split, c.boundary(), c.solver_options());
  return pbe::solve_gpbe_regular(s.problem, s.mesh, s.field, split, c.boundary(),
                                 c.solver_options(), init);
}

pbe::SplitSolution configured_solve(const Setup &s, const RunConfig &c) {
  if (c.init == InitialGuess::Random && c.method == Method::GPBE) {
    const auto init = random_init(s, c, c.splitting, c.seed);
    return solve(s, c, c.splitting, c.method, &init);
  }
  return solve(s, c, c.splitting, c.method);
}

ordered_json units_record(const pbe::PBEProblem &p) {
  return {{"unit_mode", p.unit_mode == pbe::UnitMode::Physical ? "physical" : "synthetic"},
          {"scale", p.scale()},
          {"coulomb_scale", p.coulomb_scale()},
          {"temperature", p.temperature},
          {"constants",
           {{"avogadro", p.constants.avogadro},
            {"elementary_charge", p.constants.elementary_charge},
            {"boltzmann", p.constants.boltzmann}}}};
}

double linf_diff(const std::vector<double> &a, const std::vector<double> &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double linf(const std::vector<double> &a) {
  double m = 0.0;
  for (double v : a)
    m = std::max(m, std::abs(v));
  return m;
}

int run_surface(const RunConfig &c, const fs::path &out, std::ostream &log) {
  const pbe::ChargeSystem charges = c.charge_system();
  const pbe::BallUnion balls = pbe::BallUnion::from_charges(charges);
  const double h = c.grid_spacing;
  const pbe::VoxelGrid grid = pbe::VoxelGrid::covering(balls, c.ion_radius + 4.0 * h, h);
  if (grid.size() > 50'000'000)
    throw pbe::ConfigError("surface grid too large; increase geometry.grid_spacing");
  const pbe::RegionMap map = pbe::build_region_map(balls, c.probe_radius, c.ion_radius, grid);
  std::vector<int> tags(map.tags().size());
  std::size_t count[3] = {0, 0, 0};
  for (std::size_t i = 0; i < tags.size(); ++i) {
    tags[i] = static_cast<int>(map.tags()[i]);
    ++count[tags[i]];
  }
  {
    std::ostringstream vtk;
    pbe::write_vtk_structured_points(vtk, grid, tags, "region");
    write_text_file((out / "regions.vtk").string(), vtk.str());
  }
  const double cell = std::pow(h, grid.dimension());
  ordered_json j;
  j["dimension"] = grid.dimension();
  j["grid"] = {grid.nx, grid.ny, grid.nz};
  j["spacing"] = h;
  j["probe_radius"] = c.probe_radius;
  j["ion_radius"] = c.ion_radius;
  j["cells"] = {{"Molecule", count[0]}, {"IEL", count[1]}, {"Ions", count[2]}};
  j["measure"] = {{"Molecule", count[0] * cell}, {"IEL", count[1] * cell}, {"Ions", count[2] * cell}};
  const double gap = pbe::min_gap_width(balls);
  j["min_gap_width"] = std::isfinite(gap) ? ordered_json(gap) : ordered_json(nullptr);
  write_text_file((out / "surface.json").string(), j.dump(2) + "\n");
  log << "surface: " << grid.nx << "x" << grid.ny << (grid.nz > 1 ? "x" + std::to_string(grid.nz) : "")
      << " cells, Molecule " << count[0] << ", IEL " << count[1] << ", Ions " << count[2] << "\n";
  return kSuccess;
}

int run_mesh(const RunConfig &c, const fs::path &out, std::ostream &log) {
  const pbe::Mesh mesh = build_mesh(c);
  pbe::save_mesh_file((out / "mesh.txt").string(), mesh);
  write_vtk_file((out / "mesh.vtk").string(), mesh, {}, true);
  std::size_t count[3] = {0, 0, 0};
  for (auto t : mesh.elem_region)
    ++count[static_cast<int>(t)];
  ordered_json j;
  j["nodes"] = mesh.num_nodes();
  j["triangles"] = mesh.num_triangles();
  j["boundary_nodes"] = mesh.boundary_nodes.size();
  j["interface_nodes"] = mesh.interface_nodes.size();
  j["elements"] = {{"Molecule", count[0]}, {"IEL", count[1]}, {"Ions", count[2]}};
  j["max_edge"] = mesh.max_edge();
  j["min_angle_deg"] = mesh.min_angle() * 180.0 / 3.14159265358979323846;
  write_text_file((out / "mesh.json").string(), j.dump(2) + "\n");
  log << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_triangles() << " triangles\n";
  return kSuccess;
}

int run_solve(const RunConfig &c, const fs::path &out, std::ostream &log) {
  const Setup s = make_setup(c);
  const auto t0 = std::chrono::steady_clock::now();
  const pbe::SplitSolution sol = configured_solve(s, c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const pbe::Reconstruction rec = pbe::reconstruct_phi(sol);
  std::vector<double> phi = rec.phi.values;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (rec.masked[i])
      phi[i] = std::nan("");
  write_vtk_file((out / "phi.vtk").string(), s.mesh, {{"phi", &phi}});
  write_vtk_file((out / "u.vtk").string(), s.mesh, {{"u", &sol.u.values}});
  if (sol.uH)
    write_vtk_file((out / "uH.vtk").string(), s.mesh, {{"uH", &sol.uH->values}});
  else
    write_vtk_file((out / "G.vtk").string(), s.mesh, {{"G", &sol.G_at_nodes}});
  write_text_file((out / "report.jsonl").string(), report_jsonl(sol.report, s.problem));
  Table hist{{"iteration", "residual", "energy", "energy_change", "step", "backtracks",
              "cg_iterations", "cg_residual"},
             {}};
  for (const auto &it : sol.report.history)
    hist.rows.push_back({double(it.iteration), it.residual, it.energy, it.energy_change, it.step,
                         double(it.backtracks), double(it.cg_iterations), it.cg_residual});
  write_csv_file((out / "history.csv").string(), hist);
  log << "solve: " << sol.report.method << " " << pbe::to_string(sol.splitting) << ", "
      << (sol.report.converged ? "converged" : "NOT converged") << " after "
      << sol.report.newton_iterations << " Newton iterations, residual "
      << sol.report.final_residual << ", wall " << wall << " s\n";
  return sol.report.converged ? kSuccess : kSolverFailure;
}

int run_energy(const RunConfig &c, const fs::path &out, std::ostream &log) {
  // The solvation energy reads the reaction field, which is u only in the
  // two-term splitting; the configured splitting is overridden.
  RunConfig two = c;
  two.splitting = pbe::Splitting::TwoTerm;
  const Setup s = make_setup(two);
  const pbe::SplitSolution sol = configured_solve(s, two);
  if (!sol.report.converged) {
    log << "energy: solve did not converge\n";
    return kSolverFailure;
  }
  const pbe::SolvationEnergy e = pbe::solvation_energy(sol, s.problem, s.charges);
  ordered_json j = units_record(s.problem);
  j["method"] = sol.report.method;
  j["splitting"] = "two_term";
  j["dimensionless"] = e.dimensionless;
  j["erg"] = e.erg;
  j["e0_weighted_esu"] = e.e0_weighted;
  j["charges"] = s.charges.charges.size();
  write_text_file((out / "energy.json").string(), j.dump(2) + "\n");
  log << "energy: " << e.dimensionless << " (kB T units), " << e.erg << " erg\n";
  return kSuccess;
}

int run_convergence(const RunConfig &c, const fs::path &out, std::ostream &log) {
  pbe::CaseParameters p;
  p.eps_m = c.eps_m;
  p.eps_s = c.eps_s;
  p.r_m = c.r_m;
  p.r_iel = c.r_iel;
  p.L = c.half_width;
  const pbe::ManufacturedCase mc = pbe::manufactured_case(c.study_case, p);
  const pbe::ConvergenceTable t =
      pbe::convergence_study(mc, c.study_n, c.study_levels, c.solver_options());
  std::ostringstream csv;
  pbe::write_convergence_csv(csv, t);
  write_text_file((out / "convergence.csv").string(), csv.str());
  log << "convergence: " << t.case_name << ", L2 slope " << t.slope_L2 << ", H1 slope "
      << t.slope_H1 << (t.saturated ? " (saturated)" : "") << "\n";
  if (t.aborted) {
    log << "convergence aborted: " << t.message << "\n";
    return kSolverFailure;
  }
  return kSuccess;
}

int run_verify(const RunConfig &c, const fs::path &out, std::ostream &log) {
  const auto checks = invariant_suite(c, log);
  std::ostringstream csv;
  csv << "check,value,threshold,pass\n";
  bool all = true;
  char buf[64];
  for (const auto &r : checks) {
    csv << r.name << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    csv << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.threshold);
    csv << buf << ',' << (r.pass ? "pass" : "FAIL") << '\n';
    all = all && r.pass;
    log << (r.pass ? "  pass  " : "  FAIL  ") << r.name << " = " << r.value << " (threshold "
        << r.threshold << ")\n";
  }
  write_text_file((out / "verify.csv").string(), csv.str());
  log << "verify: " << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all ? kSuccess : kSolverFailure;
}

} // namespace

std::vector<CheckResult> invariant_suite(const RunConfig &c, std::ostream &log) {
  const Setup s = make_setup(c);
  const pbe::BoundarySpec bc = c.boundary();
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double threshold, bool pass) {
    out.push_back({std::move(name), value, threshold, pass});
  };

  pbe::SplitSolution two, three;
  for (auto split : {pbe::Splitting::TwoTerm, pbe::Splitting::ThreeTerm}) {
    pbe::SplitSolution sol = solve(s, c, split, Method::GPBE);
    const std::string tag = pbe::to_string(split);
    add("newton_converged_" + tag, sol.report.final_residual, sol.report.tolerance,
        sol.report.converged);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto &it : sol.report.history)
      worst = std::max(worst, it.energy_change);
    if (sol.report.history.empty())
      worst = -1.0;
    add("energy_strictly_decreasing_" + tag, worst, 0.0, worst < 0.0);
    add("b_certificate_finite_" + tag, sol.report.max_abs_b,
        std::numeric_limits<double>::max(), std::isfinite(sol.report.max_abs_b));
    (split == pbe::Splitting::TwoTerm ? two : three) = std::move(sol);
  }
  log << "verify: base solves done\n";

  {
    const auto init = random_init(s, c, pbe::Splitting::TwoTerm, c.seed);
    const pbe::SplitSolution r = solve(s, c, pbe::Splitting::TwoTerm, Method::GPBE, &init);
    const double d = r.report.converged ? linf_diff(r.u.values, two.u.values)
                                        : std::numeric_limits<double>::infinity();
    add("initial_guess_independence", d, 1e-8, d <= 1e-8);
  }

  {
    double worst = 0.0;
    std::vector<char> solvent_node(s.mesh.num_nodes(), 0);
    for (std::size_t e = 0; e < s.mesh.num_triangles(); ++e)
      if (pbe::is_solvent(s.mesh.elem_region[e]))
        for (int v : s.mesh.triangles[e])
          solvent_node[v] = 1;
    for (std::size_t i = 0; i < s.mesh.num_nodes(); ++i)
      if (solvent_node[i] && !std::isnan(three.G_at_nodes[i]))
        worst = std::max(worst, std::abs(three.uH->values[i] + three.G_at_nodes[i]));
    add("uH_equals_minus_G_on_solvent", worst, 1e-12, worst <= 1e-12);
  }

  {
    const pbe::EquivalenceReport eq = pbe::splitting_equivalence(
        s.problem, s.field, s.mesh, c.equivalence_levels, bc, true, c.solver_options());
    add("splitting_difference_decreasing", eq.min_ratio, 1.0, eq.decreasing);
    add("splitting_difference_final", eq.rows.back().rel_phi_diff, 1e-2,
        eq.rows.back().rel_phi_diff <= 1e-2);
  }

  {
    RunConfig weak = c;
    for (auto &sp : weak.species)
      sp.concentration *= 1e-6;
    Setup w = s;
    w.problem = weak.problem();
    const pbe::SplitSolution g = solve(w, weak, pbe::Splitting::TwoTerm, Method::GPBE);
    const pbe::SplitSolution l = solve(w, weak, pbe::Splitting::TwoTerm, Method::LGPBE);
    const double scale = std::max(linf(l.u.values), 1e-300);
    const double gap = linf_diff(g.u.values, l.u.values);
    add("linear_limit_gap_over_scale", gap / scale, 1e-6, g.report.converged && gap <= 1e-6 * scale);
  }

  {
    const pbe::SolutionBound b = pbe::solution_bound(s.problem, s.field, two, bc);
    add("linf_bound_k1_dominates", b.sup_u, b.constants.k1, b.holds);
    const auto levels = pbe::bound_levels(b.sup_u, b.constants.k1, c.theta_levels);
    const auto theta = pbe::theta_curve(b.homogenized, levels);
    bool monotone = true;
    for (std::size_t i = 1; i < theta.size(); ++i)
      monotone = monotone && theta[i].second <= theta[i - 1].second;
    add("theta_nonincreasing", monotone ? 1.0 : 0.0, 1.0, monotone);
    const auto beyond = pbe::theta_curve(b.homogenized, {b.sup_u * (1.0 + 1e-9) + 1e-300});
    add("theta_vanishes_beyond_max", beyond[0].second, 0.0, beyond[0].second == 0.0);
    const auto &k = b.constants;
    const auto v = pbe::extinction_check(theta, std::pow(2.0 * k.C_M, k.inputs.q), k.inputs.q,
                                         k.beta, k.k0);
    add("extinction_lemma", v.theta_at_level, 0.0, v.pass);
  }
  return out;
}

int run(Command command, const RunConfig &config, std::ostream &log) {
  validate(config);
  const fs::path out(config.output);
  fs::create_directories(out);
  write_text_file((out / "config_echo.ini").string(), echo_config(config));
  switch (command) {
  case Command::Surface:
    return run_surface(config, out, log);
  case Command::Mesh:
    return run_mesh(config, out, log);
  case Command::Solve:
    return run_solve(config, out, log);
  case Command::Verify:
    return run_verify(config, out, log);
  case Command::Convergence:
    return run_convergence(config, out, log);
  case Command::Energy:
    return run_energy(config, out, log);
  }
  return kInputError;
}

} // namespace pbesolve
