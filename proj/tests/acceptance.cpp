// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracle.hpp"
#include "pbe/coulomb.hpp"
#include "pbe/error.hpp"
#include "pbe/geometry.hpp"
#include "pbe/model.hpp"
#include "pbe/solver.hpp"
#include "pbe/sparse.hpp"
#include "pbe/verify.hpp"
#include "pbesolve/config.hpp"

using namespace pbe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double linf_diff(const std::vector<double> &a, const std::vector<double> &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double linf(const std::vector<double> &a) {
  double d = 0.0;
  for (double v : a)
    d = std::max(d, std::abs(v));
  return d;
}

ChargeSystem dipole() {
  ChargeSystem s;
  s.charges = {{{0.3, 0.1, 0}, 1.0, 0.0}, {{-0.35, -0.2, 0}, -1.0, 0.0}};
  return s;
}

PBEProblem synthetic(std::vector<IonSpecies> sp) {
  PBEProblem p;
  p.species = std::move(sp);
  return p;
}

const BoundarySpec kRestricted{BoundaryMode::RestrictedG, 0.0, 80.0, 2.0};

std::string config_path(const std::string &name) { return std::string(PBE_CONFIG_DIR) + "/" + name; }

// 1. Nonlinearity algebra
void nonlinearity(Outcome &o) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> T(-10.0, 10.0), M(0.0, 2.0), S(-5.0, 5.0);
  std::uniform_int_distribution<int> V(-3, 3), N(1, 4);
  int mono_bad = 0;
  double fd_b = 0.0, fd_bp = 0.0, hyper = 0.0;
  for (int i = 0; i < 10000; ++i) {
    PBEProblem p;
    for (int j = N(rng); j > 0; --j) {
      int z = 0;
      while (z == 0)
        z = V(rng);
      p.species.push_back({M(rng), z});
    }
    const double t1 = T(rng), t2 = T(rng);
    const double b1 = eval_b(p, RegionTag::Ions, t1), b2 = eval_b(p, RegionTag::Ions, t2);
    if ((b1 - b2) * (t1 - t2) < -1e-14 * (std::abs(b1) + std::abs(b2)) * std::abs(t1 - t2))
      ++mono_bad;
    const double t = S(rng), h = 1e-6;
    const double B_fd = (eval_B(p, RegionTag::Ions, t + h) - eval_B(p, RegionTag::Ions, t - h)) / (2 * h);
    const double b_fd = (eval_b(p, RegionTag::Ions, t + h) - eval_b(p, RegionTag::Ions, t - h)) / (2 * h);
    const double b = eval_b(p, RegionTag::Ions, t), bp = eval_b_prime(p, RegionTag::Ions, t);
    if (std::abs(b) > 1e-8)
      fd_b = std::max(fd_b, rel(B_fd, b));
    fd_bp = std::max(fd_bp, rel(b_fd, bp));
    const double m = M(rng) + 0.01;
    const PBEProblem sym = synthetic({{m, 1}, {m, -1}});
    hyper = std::max(hyper, rel(eval_b(sym, RegionTag::Ions, t), 2.0 * m * std::sinh(t)));
    hyper = std::max(hyper, rel(eval_b_prime(sym, RegionTag::Ions, t), 2.0 * m * std::cosh(t)));
  }
  o.detail << "monotonicity violations " << mono_bad << "/10000, B'=b rel " << fd_b << ", b' rel " << fd_bp
           << ", sinh/cosh rel " << hyper;
  o.require(mono_bad == 0, "monotonicity");
  o.require(fd_b <= 1e-6, "B' = b");
  o.require(fd_bp <= 1e-6, "b' finite difference");
  o.require(hyper <= 1e-12, "sinh/cosh reduction");
}

// 2. Coulomb identity
void coulomb(Outcome &o) {
  const CoulombField f2(dipole(), 1.0, 10.0);
  auto lap = [&](const Vec3 &x, double h) {
    return (eval_G(f2, x + Vec3{h, 0, 0}) + eval_G(f2, x - Vec3{h, 0, 0}) + eval_G(f2, x + Vec3{0, h, 0}) +
            eval_G(f2, x - Vec3{0, h, 0}) - 4.0 * eval_G(f2, x)) /
           (h * h);
  };
  const std::vector<double> hs{0.04, 0.02, 0.01};
  double worst_slope_dev = 0.0;
  for (const Vec3 &x : {Vec3{1.2, 0.7, 0}, Vec3{-1.5, 0.4, 0}, Vec3{0.2, -1.8, 0}}) {
    std::vector<double> err;
    for (double h : hs)
      err.push_back(std::abs(lap(x, h)));
    const double slope = fitted_slope(hs, err);
    worst_slope_dev = std::max(worst_slope_dev, std::abs(slope - 2.0));
  }
  ChargeSystem s3;
  s3.dimension = 3;
  s3.charges = {{{0.3, 0.1, -0.2}, 1.0, 0.0}, {{-0.4, -0.2, 0.5}, -0.7, 0.0}};
  const CoulombField f3(s3, 1.0, 10.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  double grad_rel = 0.0;
  for (const CoulombField *f : {&f2, &f3}) {
    for (int tested = 0; tested < 200;) {
      const Vec3 x{U(rng), U(rng), f->dimension() == 3 ? U(rng) : 0.0};
      bool near = false;
      for (const auto &q : f->charges.charges)
        near = near || distance(x, q.position) < 0.2;
      if (near)
        continue;
      ++tested;
      const double h = 1e-5;
      Vec3 fd{(eval_G(*f, x + Vec3{h, 0, 0}) - eval_G(*f, x - Vec3{h, 0, 0})) / (2 * h),
              (eval_G(*f, x + Vec3{0, h, 0}) - eval_G(*f, x - Vec3{0, h, 0})) / (2 * h), 0.0};
      if (f->dimension() == 3)
        fd.z = (eval_G(*f, x + Vec3{0, 0, h}) - eval_G(*f, x - Vec3{0, 0, h})) / (2 * h);
      const Vec3 g = eval_grad_G(*f, x);
      grad_rel = std::max(grad_rel, norm(fd - g) / norm(g));
    }
  }
  o.detail << "harmonicity slope deviation " << worst_slope_dev << ", gradient rel " << grad_rel;
  o.require(worst_slope_dev <= 0.3, "order-2 harmonicity decay");
  o.require(grad_rel <= 1e-6, "gradient");
}

// 3. Geometry morphology
void morphology(Outcome &o) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> C(-1.5, 1.5), R(0.5, 1.2), P(0.3, 0.8);
  const VoxelGrid g = oracle::square_grid(4.0, 128);
  int bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    BallUnion u;
    for (int b = 0; b < 2 + trial % 2; ++b)
      u.balls.push_back({{C(rng), C(rng), 0}, R(rng)});
    const double r = P(rng);
    const Mask sigma = union_mask(u, g);
    const Mask close = rolling_ball_close(u, r, g);
    const Mask open = rolling_ball_open(u, r, g);
    const bool ok = oracle::subset(open, sigma) && oracle::subset(sigma, close) &&
                    close_mask(close, r, g) == close &&
                    oracle::subset(close, rolling_ball_close(u, 1.5 * r, g));
    bad += !ok;
  }
  BallUnion gap;
  gap.balls = {{{-1.25, 0, 0}, 1.0}, {{1.25, 0, 0}, 1.0}};
  const VoxelGrid gg = oracle::square_grid(4.5, 128);
  const Mask closed = rolling_ball_close(gap, 1.0, gg);
  const int disc = oracle::boundary_discrepancy(closed, oracle::probe_oracle(gap, 1.0, gg), gg);
  o.detail << "invariant failures " << bad << "/20, thin-gap discrepancy " << disc << " cells";
  o.require(bad == 0, "nesting/idempotence/monotonicity");
  o.require(disc <= 2, "thin-gap oracle");
  o.require(closed[gg.nearest({0, 0, 0})] != 0, "gap filled");
}

// 4. Manufactured convergence
void convergence(Outcome &o) {
  for (CaseId id : {CaseId::LinearJump, CaseId::SemilinearNeutral}) {
    const ConvergenceTable t = convergence_study(manufactured_case(id), 16, 5);
    o.detail << to_string(id) << " L2 " << t.slope_L2 << " H1 " << t.slope_H1 << "; ";
    o.require(!t.aborted, std::string(to_string(id)) + " aborted: " + t.message);
    o.require(std::abs(t.slope_L2 - 2.0) <= 0.25, std::string(to_string(id)) + " L2 slope");
    o.require(std::abs(t.slope_H1 - 1.0) <= 0.25, std::string(to_string(id)) + " H1 slope");
  }
}

// 5. Splitting equivalence
void equivalence(Outcome &o) {
  const Mesh base = generate_disk_mesh(1.0, 1.5, 3.0, 16);
  const CoulombField f(dipole(), 1.0, base.diameter());
  const EquivalenceReport r =
      splitting_equivalence(synthetic({{0.5, 1}, {0.5, -1}}), f, base, 4, kRestricted);
  o.detail << "rel diff";
  for (const auto &row : r.rows)
    o.detail << " " << row.rel_phi_diff;
  o.detail << ", min factor " << r.min_ratio;
  o.require(r.decreasing, "monotone decrease");
  o.require(r.rows.back().rel_phi_diff <= 1e-2, "final difference");
  o.require(r.min_ratio >= 2.5, "decrease factor");
}

// 6. Solver robustness
void robustness(Outcome &o) {
  const Mesh m = refine_uniform(generate_disk_mesh(1.0, 1.5, 3.0, 16));
  struct Case {
    const char *name;
    PBEProblem problem;
    ChargeSystem charges;
  };
  ChargeSystem cell;
  cell.charges = {{{0.1, 0.05, 0}, -1.0, 0.0}};
  const std::vector<Case> cases{{"neutral", synthetic({{0.5, 1}, {0.5, -1}}), dipole()},
                                {"cell", synthetic({{1.0, 1}}), cell}};
  SolverOptions opts;
  opts.tol = 1e-10;
  int max_its = 0;
  double init_gap = 0.0;
  for (const auto &c : cases) {
    const CoulombField f(c.charges, 1.0, m.diameter());
    for (Splitting s : {Splitting::TwoTerm, Splitting::ThreeTerm}) {
      const auto a = solve_gpbe_regular(c.problem, m, f, s, kRestricted, opts);
      const std::string tag = std::string(c.name) + "/" + to_string(s);
      o.require(a.report.converged, tag + " converged");
      o.require(a.report.final_residual <= opts.tol * (1.0 + a.report.rhs_norm), tag + " residual");
      max_its = std::max(max_its, a.report.newton_iterations);
      for (const auto &it : a.report.history)
        o.require(it.energy_change < 0.0, tag + " strict descent at " + std::to_string(it.iteration));
      std::vector<double> init(m.num_nodes());
      std::mt19937_64 rng(6);
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      for (double &v : init)
        v = U(rng);
      for (const auto &[i, g] : regular_dirichlet_data(m, f, s, kRestricted))
        init[i] = g;
      const auto b = solve_gpbe_regular(c.problem, m, f, s, kRestricted, opts, &init);
      o.require(b.report.converged, tag + " random init converged");
      init_gap = std::max(init_gap, linf_diff(a.u.values, b.u.values));
    }
  }
  o.detail << "max Newton iterations " << max_its << ", init gap " << init_gap;
  o.require(max_its <= 25, "iteration count");
  o.require(init_gap <= 1e-8, "initial-guess independence");
}

// 7. Linearization consistency
void linear_limit(Outcome &o) {
  const Mesh m = refine_uniform(generate_disk_mesh(1.0, 1.5, 3.0, 16));
  const CoulombField f(dipole(), 1.0, m.diameter());
  const PBEProblem p = synthetic({{0.5e-6, 1}, {0.5e-6, -1}});
  SolverOptions opts;
  opts.cg_tol = 1e-14;
  double worst = 0.0;
  for (Splitting s : {Splitting::TwoTerm, Splitting::ThreeTerm}) {
    const auto lin = solve_lgpbe(p, m, f, s, kRestricted, opts);
    const auto non = solve_gpbe_regular(p, m, f, s, kRestricted, opts);
    o.require(non.report.converged, "Newton converged");
    worst = std::max(worst, linf_diff(lin.u.values, non.u.values) / linf(lin.u.values));
  }
  o.detail << "L-inf gap / scale " << worst;
  o.require(worst <= 1e-6, "gap");
}

// 8. L-infinity diagnostics
void linf_diagnostics(Outcome &o) {
  std::vector<std::pair<double, double>> synth;
  for (int i = 0; i <= 200; ++i)
    synth.emplace_back(0.01 * i, std::pow(std::max(0.0, 1.0 - 0.01 * i), 3));
  o.require(extinction_check(synth, 1.0 / 64.0, 3.0, 2.0, 0.0).pass, "synthetic extinction");
  for (const char *name : {"disk.ini", "cell_model.ini", "physical.ini"}) {
    const pbesolve::RunConfig c = pbesolve::load_config_file(config_path(name));
    const PBEProblem p = c.problem();
    Mesh m = c.mesh_file.empty() ? generate_disk_mesh(c.r_m, c.r_iel, c.half_width, c.n)
                                 : load_mesh_file(c.resolve(c.mesh_file));
    for (int i = 0; i < c.refinements; ++i)
      m = refine_uniform(m);
    const CoulombField f = CoulombField::from_problem(p, c.charge_system(), m.diameter());
    const BoundarySpec bc = c.boundary();
    const SplitSolution sol = c.method == pbesolve::Method::GPBE
                                  ? solve_gpbe_regular(p, m, f, c.splitting, bc, c.solver_options())
                                  : solve_lgpbe(p, m, f, c.splitting, bc, c.solver_options());
    const std::string tag(name);
    o.require(sol.report.converged, tag + " converged");
    const SolutionBound b = solution_bound(p, f, sol, bc);
    const auto th = theta_curve(b.homogenized, bound_levels(b.sup_u, b.constants.k1, c.theta_levels));
    bool nonincreasing = true;
    for (std::size_t i = 1; i < th.size(); ++i)
      nonincreasing = nonincreasing && th[i].second <= th[i - 1].second;
    const double beyond = theta_curve(b.homogenized, {b.sup_u * (1.0 + 1e-12)})[0].second;
    const auto v = extinction_check(th, std::pow(2.0 * b.constants.C_M, b.constants.inputs.q), b.constants.inputs.q,
                                    b.constants.beta, b.constants.k0);
    o.detail << tag << " sup " << b.sup_u << " k1 " << b.constants.k1 << "; ";
    o.require(nonincreasing, tag + " theta nonincreasing");
    o.require(beyond == 0.0, tag + " theta beyond max");
    o.require(b.holds, tag + " k1 dominates");
    o.require(v.pass, tag + " extinction");
  }
}

int run_cli(const std::string &args, const fs::path &log) {
  const std::string cmd = std::string(PBESOLVE_EXE) + " " + args + " > " + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// 9. Infrastructure
void infrastructure(Outcome &o) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  std::uniform_int_distribution<int> D(5, 60);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = D(rng);
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        B(i, j) = N(rng);
    const Eigen::MatrixXd A = B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i)
      b(i) = N(rng);
    const Eigen::VectorXd want = A.ldlt().solve(b);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        t.push_back({i, j, A(i, j)});
    std::vector<double> x(n, 0.0), rhs(b.data(), b.data() + n);
    cg_solve(csr_from_triplets(n, t), rhs, x, 1e-14, 10 * n);
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(x[i] - want(i)));
  }
  o.require(worst <= 1e-8, "CG vs dense");

  const Mesh m = refine_uniform(generate_disk_mesh(1.0, 1.5, 3.0, 16));
  const std::string text = save_mesh(m);
  std::istringstream in(text);
  const Mesh back = load_mesh(in);
  o.require(back == m && save_mesh(back) == text, "mesh round trip");

  for (const char *name : {"disk.ini", "cell_model.ini", "physical.ini", "surface.ini"}) {
    const auto c = pbesolve::load_config_file(config_path(name));
    const std::string echo = pbesolve::echo_config(c);
    o.require(pbesolve::echo_config(pbesolve::parse_config(echo, c.base_dir)) == echo &&
                  pbesolve::parse_config(echo, c.base_dir) == c,
              std::string(name) + " config round trip");
  }

  const fs::path out = fs::temp_directory_path() / "pbe_acceptance";
  fs::remove_all(out);
  fs::create_directories(out);
  int runs = 0;
  const std::vector<std::pair<std::string, std::string>> smoke{
      {"surface", "surface.ini"}, {"mesh", "disk.ini"},        {"solve", "disk.ini"},
      {"solve", "cell_model.ini"}, {"solve", "physical.ini"},  {"energy", "physical.ini"},
      {"convergence", "disk.ini"}, {"verify", "disk.ini"},     {"verify", "cell_model.ini"}};
  for (const auto &[cmd, cfg] : smoke) {
    const fs::path dir = out / (cmd + "_" + cfg);
    fs::create_directories(dir);
    const int code = run_cli(cmd + " --config " + config_path(cfg) + " --out " + dir.string(), dir / "log");
    o.require(code == 0, cmd + " " + cfg + " exit " + std::to_string(code));
    ++runs;
  }
  o.detail << "CG max error " << worst << ", " << runs << " CLI runs";
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    double limit_s;
    std::function<void(Outcome &)> body;
  };
  const std::vector<Criterion> criteria{
      {1, "nonlinearity algebra", 1.0, nonlinearity},
      {2, "Coulomb identity", 5.0, coulomb},
      {3, "geometry morphology", 30.0, morphology},
      {4, "manufactured convergence", 120.0, convergence},
      {5, "splitting equivalence", 120.0, equivalence},
      {6, "solver robustness", 60.0, robustness},
      {7, "linearization consistency", 30.0, linear_limit},
      {8, "L-infinity diagnostics", 30.0, linf_diagnostics},
      {9, "infrastructure", 30.0, infrastructure},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail << " [runtime over " << c.limit_s << " s]";
    }
    failures += !o.pass;
    std::printf("criterion %d %-26s %s  %7.2f s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
