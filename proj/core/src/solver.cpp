#include "pbe/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbe/error.hpp"

namespace pbe {

const char *to_string(Splitting s) {
  return s == Splitting::TwoTerm ? "two_term" : "three_term";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> nodal_G(const Mesh &mesh, const CoulombField &field) {
  std::vector<double> G(mesh.num_nodes());
  for (std::size_t i = 0; i < G.size(); ++i) {
    try {
      G[i] = eval_G(field, mesh.nodes[i]);
    } catch (const SingularityError &) {
      G[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return G;
}

// Regular-component data shared by the linear and nonlinear solves.
struct Setup {
  SparseMatrix A;
  std::vector<double> rhs;
  std::vector<std::pair<int, double>> dirichlet;
  std::optional<DiscreteField> uH;
  int uH_cg = 0;
};

Setup make_setup(const PBEProblem &problem, const Mesh &mesh,
                 const CoulombField &field, Splitting splitting,
                 const BoundarySpec &bc, const SolverOptions &opts) {
  problem.validate();
  Setup s;
  s.A = assemble_stiffness(mesh, problem);
  if (splitting == Splitting::TwoTerm) {
    s.rhs = assemble_two_term_rhs(mesh, field, problem);
  } else {
    s.uH = solve_uH(mesh, field, opts, &s.uH_cg);
    s.rhs = assemble_three_term_rhs(mesh, field, problem.eps_m, s.uH->values);
  }
  s.dirichlet = regular_dirichlet_data(mesh, field, splitting, bc);
  return s;
}

SolveStats checked_cg(const SparseMatrix &A, const std::vector<double> &b,
                      std::vector<double> &x, const SolverOptions &opts,
                      const char *what) {
  SolveStats st = cg_solve(A, b, x, opts.cg_tol, opts.cg_maxit, opts.precond);
  if (!st.converged) {
    std::ostringstream os;
    os << what << ": CG did not converge in " << st.iterations
       << " iterations (relative residual " << st.residual << ")";
    throw SolverError(os.str());
  }
  return st;
}

} // namespace

std::vector<std::pair<int, double>>
regular_dirichlet_data(const Mesh &mesh, const CoulombField &field,
                       Splitting splitting, const BoundarySpec &bc) {
  std::vector<std::pair<int, double>> d;
  d.reserve(mesh.boundary_nodes.size());
  for (int i : mesh.boundary_nodes) {
    const Vec3 &x = mesh.nodes[i];
    double g;
    if (splitting == Splitting::TwoTerm && bc.mode == BoundaryMode::RestrictedG)
      g = 0.0;
    else {
      g = boundary_data(field, bc, x);
      if (splitting == Splitting::TwoTerm)
        g -= eval_G(field, x);
    }
    d.emplace_back(i, g);
  }
  return d;
}

DiscreteField solve_uH(const Mesh &mesh, const CoulombField &field,
                       const SolverOptions &opts, int *cg_iterations) {
  const Submesh sub = extract_submesh(mesh, RegionTag::Molecule);
  const SparseMatrix K =
      assemble_stiffness(sub.mesh, std::vector<double>(sub.mesh.num_triangles(), 1.0));
  std::vector<std::pair<int, double>> gamma;
  for (int i : sub.mesh.boundary_nodes)
    gamma.emplace_back(i, -eval_G(field, sub.mesh.nodes[i]));
  const AssembledSystem sys =
      apply_dirichlet(K, std::vector<double>(sub.mesh.num_nodes(), 0.0), gamma);
  std::vector<double> x(sys.rhs.size(), 0.0);
  const SolveStats st = checked_cg(sys.matrix, sys.rhs, x, opts, "harmonic component");
  if (cg_iterations)
    *cg_iterations = st.iterations;
  const std::vector<double> inside = sys.expand(x);

  DiscreteField uH(mesh);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const int c = sub.to_child[i];
    uH.values[i] = c >= 0 ? inside[c] : -eval_G(field, mesh.nodes[i]);
  }
  return uH;
}

SplitSolution solve_lgpbe(const PBEProblem &problem, const Mesh &mesh,
                          const CoulombField &field, Splitting splitting,
                          const BoundarySpec &bc, const SolverOptions &opts) {
  const auto t0 = Clock::now();
  Setup s = make_setup(problem, mesh, field, splitting, bc, opts);
  const LinearReaction lin = assemble_linear_reaction(
      mesh, problem, splitting == Splitting::TwoTerm ? &field : nullptr);
  std::vector<double> rhs = s.rhs;
  for (std::size_t i = 0; i < rhs.size(); ++i)
    rhs[i] += lin.load[i];
  const AssembledSystem sys = apply_dirichlet(add_scaled(s.A, lin.mass, 1.0), rhs, s.dirichlet);
  std::vector<double> x(sys.rhs.size(), 0.0);
  const SolveStats st = checked_cg(sys.matrix, sys.rhs, x, opts, "linearized problem");

  SplitSolution sol;
  sol.splitting = splitting;
  sol.u = DiscreteField(mesh, sys.expand(x));
  sol.uH = std::move(s.uH);
  sol.G_at_nodes = nodal_G(mesh, field);
  SolveReport &r = sol.report;
  r.method = "lgpbe";
  r.splitting = splitting;
  r.converged = true;
  r.cg_iterations = st.iterations;
  r.cg_residual = st.residual;
  r.uH_cg_iterations = s.uH_cg;
  r.rhs_norm = norm2(sys.rhs);
  r.final_residual = st.residual;
  r.tolerance = opts.cg_tol;
  r.options = opts;
  r.wall_seconds = seconds_since(t0);
  return sol;
}

EnergyMinimum minimize_energy(const SparseMatrix &A, const std::vector<double> &rhs,
                              const SemilinearContext &ctx,
                              const std::vector<std::pair<int, double>> &dirichlet,
                              const SolverOptions &opts,
                              const std::vector<double> *init) {
  if (!(opts.armijo_c > 0.0 && opts.armijo_c < 1.0 && opts.backtrack > 0.0 &&
        opts.backtrack < 1.0))
    throw SolverError("Newton parameters must lie in (0, 1)");
  const auto t0 = Clock::now();
  const std::size_t n = ctx.mesh->num_nodes();
  std::vector<double> u(n, 0.0);
  if (init) {
    if (init->size() != n)
      throw SolverError("initial guess length does not match node count");
    u = *init;
    for (const auto &[i, g] : dirichlet)
      if (std::abs(u[i] - g) > 1e-12 * (1.0 + std::abs(g)))
        throw SolverError("initial guess violates Dirichlet data at node " +
                          std::to_string(i));
  }
  for (const auto &[i, g] : dirichlet)
    u[i] = g;

  std::vector<char> constrained(n, 0);
  std::vector<std::pair<int, double>> homogeneous;
  for (const auto &[i, g] : dirichlet) {
    constrained[i] = 1;
    homogeneous.emplace_back(i, 0.0);
  }
  double rhs_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!constrained[i])
      rhs_norm += rhs[i] * rhs[i];
  rhs_norm = std::sqrt(rhs_norm);

  EnergyMinimum out;
  SolveReport &r = out.report;
  r.method = "gpbe";
  r.options = opts;
  r.rhs_norm = rhs_norm;
  r.tolerance = opts.tol * (1.0 + rhs_norm);

  const EnergyValue J0 = energy_J(A, ctx, u, rhs);
  if (J0.infinite)
    throw SolverError("energy is infinite at the initial guess");
  double J = J0.value;
  r.initial_energy = J;

  for (int k = 0;; ++k) {
    const SemilinearTerms terms = assemble_semilinear(ctx, u);
    r.max_abs_b = terms.max_abs_b;
    std::vector<double> F = A * u;
    for (std::size_t i = 0; i < n; ++i)
      F[i] = constrained[i] ? 0.0 : F[i] + terms.residual[i] - rhs[i];
    const double fnorm = norm2(F);
    r.final_residual = fnorm;
    if (fnorm <= r.tolerance) {
      r.converged = true;
      break;
    }
    if (k >= opts.maxit)
      break;

    std::vector<double> minus_F(n);
    for (std::size_t i = 0; i < n; ++i)
      minus_F[i] = -F[i];
    const AssembledSystem sys =
        apply_dirichlet(add_scaled(A, terms.tangent, 1.0), minus_F, homogeneous);
    std::vector<double> dx(sys.rhs.size(), 0.0);
    const SolveStats st = checked_cg(sys.matrix, sys.rhs, dx, opts, "Newton step");
    r.cg_iterations += st.iterations;
    const std::vector<double> d = sys.expand(dx);

    const double slope = dot(F, d);
    const double curvature = dot(d, A * d);
    if (!(slope < 0.0))
      throw SolverError("Newton direction is not a descent direction at iteration " +
                        std::to_string(k + 1));
    double alpha = 1.0;
    int backtracks = 0;
    double dJ = 0.0;
    for (;;) {
      bool ok = false;
      try {
        dJ = alpha * slope + 0.5 * alpha * alpha * curvature +
             integrate_B_remainder(ctx, u, d, alpha);
        ok = std::isfinite(dJ) && dJ <= opts.armijo_c * alpha * slope;
      } catch (const DomainError &) {
        ok = false;
      }
      if (ok)
        break;
      alpha *= opts.backtrack;
      ++backtracks;
      if (alpha < opts.min_step)
        throw SolverError("line search step underflow at Newton iteration " +
                          std::to_string(k + 1));
    }
    for (std::size_t i = 0; i < n; ++i)
      u[i] += alpha * d[i];
    J += dJ;
    r.history.push_back({k + 1, fnorm, J, dJ, alpha, backtracks, st.iterations, st.residual});
    r.newton_iterations = k + 1;
  }
  r.final_energy = J;
  if (!r.history.empty())
    r.cg_residual = r.history.back().cg_residual;
  r.wall_seconds = seconds_since(t0);
  out.u = std::move(u);
  return out;
}

SplitSolution solve_gpbe_regular(const PBEProblem &problem, const Mesh &mesh,
                                 const CoulombField &field, Splitting splitting,
                                 const BoundarySpec &bc, const SolverOptions &opts,
                                 const std::vector<double> *init) {
  const auto t0 = Clock::now();
  Setup s = make_setup(problem, mesh, field, splitting, bc, opts);
  const SemilinearContext ctx = make_semilinear_context(
      mesh, problem, splitting == Splitting::TwoTerm ? &field : nullptr);
  EnergyMinimum m = minimize_energy(s.A, s.rhs, ctx, s.dirichlet, opts, init);

  SplitSolution sol;
  sol.splitting = splitting;
  sol.report = std::move(m.report);
  sol.report.splitting = splitting;
  sol.report.uH_cg_iterations = s.uH_cg;
  sol.report.wall_seconds = seconds_since(t0);
  sol.u = DiscreteField(mesh, std::move(m.u));
  sol.uH = std::move(s.uH);
  sol.G_at_nodes = nodal_G(mesh, field);
  return sol;
}

Reconstruction reconstruct_phi(const SplitSolution &solution) {
  const Mesh &mesh = *solution.u.mesh;
  Reconstruction out{DiscreteField(mesh), std::vector<char>(mesh.num_nodes(), 0)};
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const double G = solution.G_at_nodes[i];
    double v = solution.u.values[i];
    if (solution.uH)
      v += solution.uH->values[i];
    if (std::isnan(G)) {
      out.masked[i] = 1;
      out.phi.values[i] = std::numeric_limits<double>::quiet_NaN();
    } else {
      out.phi.values[i] = v + G;
    }
  }
  if (solution.uH)
    // u^H = -G exactly cancels G on solvent nodes; keep phi = u there.
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
      if (!out.masked[i] && solution.uH->values[i] == -solution.G_at_nodes[i])
        out.phi.values[i] = solution.u.values[i];
  return out;
}

double eval_phi(const SplitSolution &solution, const CoulombField &field,
                const Vec3 &x) {
  double v = point_eval(solution.u, x) + eval_G(field, x);
  if (solution.uH)
    v += point_eval(*solution.uH, x);
  return v;
}

SolvationEnergy solvation_energy(const SplitSolution &solution,
                                 const PBEProblem &problem,
                                 const ChargeSystem &charges) {
  if (solution.splitting != Splitting::TwoTerm)
    throw SolverError("solvation energy needs the two-term reaction field; "
                      "solve with the two_term splitting");
  double s = 0.0;
  for (const auto &c : charges.charges)
    s += c.valence * point_eval(solution.u, c.position);
  SolvationEnergy E;
  E.dimensionless = 0.5 * s;
  E.erg = problem.thermal_energy() * E.dimensionless;
  E.e0_weighted = problem.constants.elementary_charge * E.dimensionless;
  return E;
}

} // namespace pbe
