#include "pbe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "pbe/error.hpp"
#include "pbe/quadrature.hpp"

namespace pbe {

const char *to_string(CaseId id) {
  switch (id) {
  case CaseId::LinearJump:
    return "linear_jump";
  case CaseId::SemilinearNeutral:
    return "semilinear_neutral";
  case CaseId::SemilinearNonneutral:
    return "semilinear_nonneutral";
  case CaseId::ExactLinear:
    return "exact_linear";
  }
  return "unknown";
}

CaseId case_from_string(const std::string &name) {
  for (CaseId id : {CaseId::LinearJump, CaseId::SemilinearNeutral,
                    CaseId::SemilinearNonneutral, CaseId::ExactLinear})
    if (name == to_string(id))
      return id;
  throw Error("unknown manufactured case '" + name + "'");
}

namespace {

PBEProblem synthetic_problem(const CaseParameters &p, std::vector<IonSpecies> species) {
  PBEProblem problem;
  problem.eps_m = p.eps_m;
  problem.eps_s.value = p.eps_s;
  problem.species = std::move(species);
  problem.unit_mode = UnitMode::Synthetic;
  return problem;
}

double region_eps(const CaseParameters &p, RegionTag tag) {
  return tag == RegionTag::Molecule ? p.eps_m : p.eps_s;
}

ManufacturedCase linear_jump(const CaseParameters &p) {
  ManufacturedCase mc;
  mc.id = CaseId::LinearJump;
  mc.params = p;
  mc.linear = true;
  mc.problem = synthetic_problem(p, {{0.5, 1}, {0.5, -1}});
  // radial part A r^2 | B r^2 + C, dipole part D x | D (e x + f x / r^2)
  const double A = 1.0, D = 0.5;
  const double B = A * p.eps_m / p.eps_s;
  const double C = A * p.r_m * p.r_m * (1.0 - p.eps_m / p.eps_s);
  const double e = (p.eps_s + p.eps_m) / (2.0 * p.eps_s);
  const double f = p.r_m * p.r_m * (p.eps_s - p.eps_m) / (2.0 * p.eps_s);
  const double rm = p.r_m;
  mc.exact = [=](const Vec3 &x, RegionTag) {
    const double r2 = x.x * x.x + x.y * x.y;
    if (r2 < rm * rm)
      return A * r2 + D * x.x;
    return B * r2 + C + D * (e * x.x + f * x.x / r2);
  };
  mc.grad_exact = [=](const Vec3 &x, RegionTag) {
    const double r2 = x.x * x.x + x.y * x.y;
    if (r2 < rm * rm)
      return Vec3{2.0 * A * x.x + D, 2.0 * A * x.y, 0.0};
    const double r4 = r2 * r2;
    return Vec3{2.0 * B * x.x + D * (e + f * (r2 - 2.0 * x.x * x.x) / r4),
                2.0 * B * x.y - D * f * 2.0 * x.x * x.y / r4, 0.0};
  };
  const auto lin = linearized_coefficients(mc.problem, RegionTag::Ions);
  const auto exact = mc.exact;
  const double eps_m = p.eps_m;
  mc.f0 = [=](const Vec3 &x, RegionTag tag) {
    double v = -4.0 * A * eps_m;
    if (tag == RegionTag::Ions)
      v += lin.m_bar_sq * exact(x, tag) - lin.ell;
    return v;
  };
  return mc;
}

ManufacturedCase semilinear(const CaseParameters &p, CaseId id,
                            std::vector<IonSpecies> species) {
  ManufacturedCase mc;
  mc.id = id;
  mc.params = p;
  mc.problem = synthetic_problem(p, std::move(species));
  // u* = a cos(kx x) sin(ky y + c) with kx^2 + ky^2 = 1, so -Laplace u* = u*.
  const double a = 0.4, kx = 0.8, ky = 0.6, c = 0.3;
  mc.exact = [=](const Vec3 &x, RegionTag) {
    return a * std::cos(kx * x.x) * std::sin(ky * x.y + c);
  };
  mc.grad_exact = [=](const Vec3 &x, RegionTag) {
    return Vec3{-a * kx * std::sin(kx * x.x) * std::sin(ky * x.y + c),
                a * ky * std::cos(kx * x.x) * std::cos(ky * x.y + c), 0.0};
  };
  mc.w = [](const Vec3 &x) { return -2.0 * std::log(std::hypot(x.x, x.y)); };
  const auto exact = mc.exact;
  const auto grad = mc.grad_exact;
  const auto w = mc.w;
  const PBEProblem problem = mc.problem;
  const CaseParameters pp = p;
  mc.f0 = [=](const Vec3 &x, RegionTag tag) {
    double v = pp.eps_m * exact(x, tag);
    if (tag == RegionTag::Ions)
      v += eval_b(problem, tag, exact(x, tag) + w(x));
    return v;
  };
  mc.f = [=](const Vec3 &x, RegionTag tag) {
    return (region_eps(pp, tag) - pp.eps_m) * grad(x, tag);
  };
  return mc;
}

ManufacturedCase exact_linear(const CaseParameters &p) {
  ManufacturedCase mc;
  mc.id = CaseId::ExactLinear;
  mc.params = p;
  mc.problem = synthetic_problem(p, {});
  mc.exact = [](const Vec3 &x, RegionTag) { return 1.0 + 2.0 * x.x - 3.0 * x.y; };
  mc.grad_exact = [](const Vec3 &, RegionTag) { return Vec3{2.0, -3.0, 0.0}; };
  mc.f = [p](const Vec3 &, RegionTag tag) {
    return (region_eps(p, tag) - p.eps_m) * Vec3{2.0, -3.0, 0.0};
  };
  return mc;
}

struct DiscreteCase {
  SparseMatrix A; // stiffness, plus the linear reaction for linear cases
  std::vector<double> rhs;
  std::vector<std::pair<int, double>> dirichlet;
  SemilinearContext ctx;
};

DiscreteCase discretize(const ManufacturedCase &mc, const Mesh &mesh) {
  DiscreteCase d;
  d.A = assemble_stiffness(mesh, mc.problem);
  d.rhs = assemble_load(mesh, mc.f0, mc.f);
  if (mc.linear) {
    const LinearReaction lin = assemble_linear_reaction(mesh, mc.problem, nullptr);
    d.A = add_scaled(d.A, lin.mass, 1.0);
    for (std::size_t i = 0; i < d.rhs.size(); ++i)
      d.rhs[i] += lin.load[i];
  } else {
    d.ctx = make_semilinear_context(mesh, mc.problem, mc.w);
  }
  for (int i : mesh.boundary_nodes)
    d.dirichlet.emplace_back(i, mc.exact(mesh.nodes[i], RegionTag::Ions));
  return d;
}

} // namespace

ManufacturedCase manufactured_case(CaseId id, const CaseParameters &p) {
  if (!(p.eps_m > 0.0 && p.eps_s > 0.0 && p.r_m > 0.0 && p.r_m < p.r_iel && p.r_iel < p.L))
    throw Error("invalid manufactured case parameters");
  switch (id) {
  case CaseId::LinearJump:
    return linear_jump(p);
  case CaseId::SemilinearNeutral:
    return semilinear(p, id, {{0.5, 1}, {0.5, -1}});
  case CaseId::SemilinearNonneutral:
    return semilinear(p, id, {{0.5, 1}});
  case CaseId::ExactLinear:
    return exact_linear(p);
  }
  throw Error("unknown manufactured case");
}

Mesh case_mesh(const ManufacturedCase &mc, int n) {
  return generate_disk_mesh(mc.params.r_m, mc.params.r_iel, mc.params.L, n);
}

ManufacturedSolution solve_manufactured(const ManufacturedCase &mc, const Mesh &mesh,
                                        const SolverOptions &opts) {
  DiscreteCase d = discretize(mc, mesh);
  ManufacturedSolution out;
  if (mc.linear) {
    const AssembledSystem sys = apply_dirichlet(d.A, d.rhs, d.dirichlet);
    std::vector<double> x(sys.rhs.size(), 0.0);
    const SolveStats st = cg_solve(sys.matrix, sys.rhs, x, opts.cg_tol, opts.cg_maxit, opts.precond);
    if (!st.converged)
      throw SolverError("manufactured linear solve did not converge");
    out.u = DiscreteField(mesh, sys.expand(x));
    out.report.method = "linear";
    out.report.converged = true;
    out.report.cg_iterations = st.iterations;
    out.report.cg_residual = st.residual;
    out.report.final_residual = st.residual;
  } else {
    EnergyMinimum m = minimize_energy(d.A, d.rhs, d.ctx, d.dirichlet, opts);
    if (!m.report.converged)
      throw SolverError("manufactured Newton solve did not converge");
    out.u = DiscreteField(mesh, std::move(m.u));
    out.report = std::move(m.report);
  }
  return out;
}

ErrorNorms manufactured_errors(const ManufacturedCase &mc, const DiscreteField &u) {
  return error_norms(
      u, [&](const Vec3 &x) { return mc.exact(x, RegionTag::Ions); },
      [&](const Vec3 &x) { return mc.grad_exact(x, RegionTag::Ions); });
}

double consistency_residual(const ManufacturedCase &mc, const Mesh &mesh,
                            const SolverOptions &opts) {
  DiscreteCase d = discretize(mc, mesh);
  std::vector<double> I(mesh.num_nodes());
  for (std::size_t i = 0; i < I.size(); ++i)
    I[i] = mc.exact(mesh.nodes[i], RegionTag::Ions);
  std::vector<double> R = d.A * I;
  if (!mc.linear) {
    const auto b = semilinear_residual(d.ctx, I);
    for (std::size_t i = 0; i < R.size(); ++i)
      R[i] += b[i];
  }
  for (std::size_t i = 0; i < R.size(); ++i)
    R[i] -= d.rhs[i];
  std::vector<std::pair<int, double>> zero;
  for (const auto &[i, g] : d.dirichlet)
    zero.emplace_back(i, 0.0);
  const AssembledSystem sys = apply_dirichlet(assemble_stiffness(mesh, mc.problem), R, zero);
  std::vector<double> z(sys.rhs.size(), 0.0);
  cg_solve(sys.matrix, sys.rhs, z, opts.cg_tol, opts.cg_maxit, opts.precond);
  return std::sqrt(std::max(0.0, dot(sys.rhs, z)));
}

double fitted_slope(const std::vector<double> &x, const std::vector<double> &y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw Error("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(const ManufacturedCase &mc, int n, int levels,
                                   const SolverOptions &opts) {
  if (levels < 2)
    throw Error("convergence study needs at least two levels");
  ConvergenceTable t;
  t.case_name = to_string(mc.id);
  Mesh mesh = case_mesh(mc, n);
  for (int l = 0; l < levels; ++l) {
    if (l > 0)
      mesh = refine_uniform(mesh);
    try {
      const ManufacturedSolution s = solve_manufactured(mc, mesh, opts);
      const ErrorNorms e = manufactured_errors(mc, s.u);
      t.rows.push_back({l, mesh.max_edge(), mesh.num_nodes(), mesh.num_triangles(), e.L2,
                        e.H1, s.report.newton_iterations});
    } catch (const Error &e) {
      t.aborted = true;
      t.message = "level " + std::to_string(l) + ": " + e.what();
      break;
    }
  }
  if (t.rows.size() >= 2) {
    std::vector<double> h, l2, h1;
    bool tiny = true;
    for (const auto &r : t.rows) {
      h.push_back(r.h);
      l2.push_back(std::max(r.L2, 1e-300));
      h1.push_back(std::max(r.H1, 1e-300));
      tiny = tiny && r.L2 < 1e-9 && r.H1 < 1e-9;
    }
    t.saturated = tiny;
    t.slope_L2 = fitted_slope(h, l2);
    t.slope_H1 = fitted_slope(h, h1);
  }
  return t;
}

void write_convergence_csv(std::ostream &out, const ConvergenceTable &t) {
  char buf[512];
  out << "level,h,nodes,triangles,L2,H1,newton_iterations\n";
  for (const auto &r : t.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%zu,%zu,%.17g,%.17g,%d\n", r.level, r.h, r.nodes,
                  r.triangles, r.L2, r.H1, r.newton_iterations);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "slope,,,,%.17g,%.17g,%s\n", t.slope_L2, t.slope_H1,
                t.saturated ? "saturated" : (t.aborted ? "aborted" : ""));
  out << buf;
}

EquivalenceReport splitting_equivalence(const PBEProblem &problem,
                                        const CoulombField &field, const Mesh &base,
                                        int levels, const BoundarySpec &bc, bool nonlinear,
                                        const SolverOptions &opts) {
  EquivalenceReport rep;
  Mesh mesh = base;
  for (int l = 0; l < levels; ++l) {
    if (l > 0)
      mesh = refine_uniform(mesh);
    auto solve = [&](Splitting s) {
      return nonlinear ? solve_gpbe_regular(problem, mesh, field, s, bc, opts)
                       : solve_lgpbe(problem, mesh, field, s, bc, opts);
    };
    const SplitSolution two = solve(Splitting::TwoTerm);
    const SplitSolution three = solve(Splitting::ThreeTerm);
    if (nonlinear && !(two.report.converged && three.report.converged))
      throw SolverError("splitting equivalence: Newton did not converge at level " +
                        std::to_string(l));
    const Reconstruction p2 = reconstruct_phi(two), p3 = reconstruct_phi(three);
    DiscreteField diff(mesh);
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
      diff.values[i] = p2.masked[i] ? 0.0 : p2.phi.values[i] - p3.phi.values[i];
    DiscreteField ref = p2.phi;
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
      if (p2.masked[i])
        ref.values[i] = 0.0;
    const double abs = l2_norm(diff, is_solvent);
    const double nrm = l2_norm(ref, is_solvent);
    rep.rows.push_back({l, mesh.max_edge(), nrm > 0.0 ? abs / nrm : abs, abs,
                        two.report.newton_iterations, three.report.newton_iterations});
  }
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double prev = rep.rows[i - 1].rel_phi_diff, cur = rep.rows[i].rel_phi_diff;
    if (!(cur < prev))
      rep.decreasing = false;
    rep.min_ratio = std::min(rep.min_ratio, cur > 0.0 ? prev / cur
                                                      : std::numeric_limits<double>::infinity());
  }
  return rep;
}

namespace {

// Area of {x in triangle : s(x) > 0} for the linear s with vertex values v.
double positive_area(const std::array<Vec3, 3> &p, const std::array<double, 3> &v) {
  Vec3 poly[4];
  int m = 0;
  for (int k = 0; k < 3; ++k) {
    const int j = (k + 1) % 3;
    if (v[k] > 0.0)
      poly[m++] = p[k];
    if ((v[k] > 0.0) != (v[j] > 0.0)) {
      const double t = v[k] / (v[k] - v[j]);
      poly[m++] = p[k] + t * (p[j] - p[k]);
    }
  }
  double a = 0.0;
  for (int k = 0; k < m; ++k) {
    const Vec3 &x = poly[k], &y = poly[(k + 1) % m];
    a += x.x * y.y - x.y * y.x;
  }
  return 0.5 * std::abs(a);
}

} // namespace

std::vector<std::pair<double, double>> theta_curve(const DiscreteField &u,
                                                   const std::vector<double> &levels) {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] < 0.0 || (i > 0 && levels[i] < levels[i - 1]))
      throw DomainError("theta levels must be nonnegative and ascending");
  const Mesh &mesh = *u.mesh;
  std::vector<std::pair<double, double>> out;
  out.reserve(levels.size());
  for (double k : levels) {
    double area = 0.0;
    for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
      const auto &t = mesh.triangles[e];
      const std::array<Vec3, 3> p{mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]};
      const std::array<double, 3> a{u.values[t[0]], u.values[t[1]], u.values[t[2]]};
      const double hi = std::max({a[0], a[1], a[2]}), lo = std::min({a[0], a[1], a[2]});
      if (hi > k)
        area += lo > k ? mesh.signed_area(e) : positive_area(p, {a[0] - k, a[1] - k, a[2] - k});
      if (lo < -k)
        area += hi < -k ? mesh.signed_area(e)
                        : positive_area(p, {-a[0] - k, -a[1] - k, -a[2] - k});
    }
    out.emplace_back(k, area);
  }
  return out;
}

std::vector<double> bound_levels(double sup, double k1, int count) {
  if (count < 2)
    throw DomainError("bound_levels needs at least two levels per range");
  std::vector<double> out;
  for (double top : {1.01 * sup, 1.01 * k1})
    for (int i = 0; i < count; ++i)
      out.push_back(top * i / (count - 1));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double default_embedding_constant() { return std::pow(2.0, -0.25); }

double default_poincare_constant(double diameter) {
  return diameter / 3.14159265358979323846;
}

BoundConstants apriori_bound(const BoundInputs &in) {
  const int d = in.dimension;
  if (!(in.s > d))
    throw DomainError("exponent s must exceed the dimension");
  if (!(in.r > d / 2.0))
    throw DomainError("exponent r must exceed half the dimension");
  if (!(in.q > 2.0) || !(in.C_E > 0.0) || !(in.C_P > 0.0) || !(in.alpha_lower > 0.0) ||
      !(in.area > 0.0))
    throw DomainError("bound constants need q > 2 and positive C_E, C_P, alpha, |Omega|");
  const double qp = in.q / (in.q - 1.0);
  if (!(in.r > qp))
    throw DomainError("exponent r must exceed q'");
  BoundConstants b;
  b.inputs = in;
  b.beta = std::min((in.s - 2.0) / (2.0 * in.s), (in.r - qp) / (in.r * qp)) * in.q;
  if (!(b.beta > 1.0))
    throw DomainError("infeasible exponents: beta = " + std::to_string(b.beta) +
                      " <= 1 (needs s > 2q/(q-2) and r > q/(q-2))");
  const auto &n = in.norms;
  const double P = (in.C_P * in.C_P + 1.0) / in.alpha_lower;
  b.C_D = P * (in.C_E * n.c_qprime + in.C_E * n.f0_qprime + n.f_L2);
  b.C_M = in.C_E * P * std::max(in.C_E * (n.c_r + n.f0_r), n.f_s);
  b.k0 = b.C_D;
  b.k1 = b.C_D + 2.0 * b.C_M * std::pow(in.area, (b.beta - 1.0) / in.q) *
                     std::pow(2.0, b.beta / (b.beta - 1.0));
  return b;
}

DataNorms compute_data_norms(const Mesh &mesh, const RegionScalar &c, const RegionScalar &f0,
                             const RegionVector &f, double s, double r, double q) {
  const double qp = q / (q - 1.0);
  auto lp = [&](const RegionScalar &g, double p) {
    if (!g)
      return 0.0;
    return std::pow(integrate(mesh, [&](const Vec3 &x, RegionTag t) {
                      return std::pow(std::abs(g(x, t)), p);
                    }),
                    1.0 / p);
  };
  DataNorms n;
  n.c_qprime = lp(c, qp);
  n.c_r = lp(c, r);
  n.f0_qprime = lp(f0, qp);
  n.f0_r = lp(f0, r);
  if (f) {
    const RegionScalar mag = [&](const Vec3 &x, RegionTag t) { return norm(f(x, t)); };
    n.f_L2 = lp(mag, 2.0);
    n.f_s = lp(mag, s);
  }
  return n;
}

SolutionBound solution_bound(const PBEProblem &problem, const CoulombField &field,
                             const SplitSolution &solution, const BoundarySpec &bc, double s,
                             double r, double q) {
  const Mesh &mesh = *solution.u.mesh;
  const bool two = solution.splitting == Splitting::TwoTerm;
  const bool linear = solution.report.method == "lgpbe";
  std::vector<double> ug(mesh.num_nodes(), 0.0);
  for (const auto &[i, g] : regular_dirichlet_data(mesh, field, solution.splitting, bc))
    ug[i] = g;
  const auto lin = linearized_coefficients(problem, RegionTag::Ions);
  const auto eps = element_permittivity(mesh, problem);

  const double qp = q / (q - 1.0);
  double Ic_qp = 0, Ic_r = 0, If0_qp = 0, If0_r = 0, If_2 = 0, If_s = 0;
  const auto &rule = triangle_rule(4);
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto g = element_geometry(mesh, e);
    const auto &t = mesh.triangles[e];
    const RegionTag tag = mesh.elem_region[e];
    Vec3 grad_ug{}, grad_uH{};
    for (int k = 0; k < 3; ++k) {
      grad_ug += ug[t[k]] * g.grad[k];
      if (solution.uH)
        grad_uH += solution.uH->values[t[k]] * g.grad[k];
    }
    for (std::size_t iq = 0; iq < rule.size(); ++iq) {
      const auto &l = rule.bary[iq];
      const Vec3 x = barycentric_point(g, l);
      const double w = rule.weights[iq] * g.area;
      const double ugx = l[0] * ug[t[0]] + l[1] * ug[t[1]] + l[2] * ug[t[2]];
      Vec3 f = -eps[e] * grad_ug;
      double c = 0.0, f0 = 0.0;
      if (tag == RegionTag::Molecule) {
        if (!two)
          f -= problem.eps_m * grad_uH;
      } else {
        const Vec3 gG = eval_grad_G(field, x);
        f += two ? (problem.eps_m - problem.eps_s(x)) * gG : problem.eps_m * gG;
      }
      if (tag == RegionTag::Ions) {
        const double omega = ugx + (two && !linear ? eval_G(field, x) : 0.0);
        if (linear) {
          c = lin.m_bar_sq * omega;
          f0 = lin.ell - (two ? lin.m_bar_sq * eval_G(field, x) : 0.0);
        } else {
          c = eval_b(problem, tag, omega);
        }
      }
      const double fm = norm(f);
      Ic_qp += w * std::pow(std::abs(c), qp);
      Ic_r += w * std::pow(std::abs(c), r);
      If0_qp += w * std::pow(std::abs(f0), qp);
      If0_r += w * std::pow(std::abs(f0), r);
      If_2 += w * fm * fm;
      If_s += w * std::pow(fm, s);
    }
  }
  BoundInputs in;
  in.norms = {std::pow(Ic_qp, 1.0 / qp), std::pow(Ic_r, 1.0 / r), std::pow(If0_qp, 1.0 / qp),
              std::pow(If0_r, 1.0 / r),  std::sqrt(If_2),          std::pow(If_s, 1.0 / s)};
  in.C_E = default_embedding_constant();
  in.C_P = default_poincare_constant(mesh.diameter());
  double alpha = problem.eps_m;
  for (const auto &x : mesh.nodes)
    alpha = std::min(alpha, problem.eps_s(x));
  in.alpha_lower = alpha;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e)
    in.area += mesh.signed_area(e);
  in.s = s;
  in.r = r;
  in.q = q;

  SolutionBound out;
  out.constants = apriori_bound(in);
  out.homogenized = DiscreteField(mesh);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    out.homogenized.values[i] = solution.u.values[i] - ug[i];
    out.sup_u = std::max(out.sup_u, std::abs(out.homogenized.values[i]));
    out.sup_lifting = std::max(out.sup_lifting, std::abs(ug[i]));
  }
  out.holds = out.sup_u <= out.constants.k1;
  return out;
}

ExtinctionVerdict extinction_check(const std::vector<std::pair<double, double>> &theta,
                                   double C, double alpha, double beta, double k0) {
  if (!(beta > 1.0))
    throw DomainError("extinction check needs beta > 1");
  if (theta.empty())
    throw DomainError("empty theta curve");
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (theta[i].first < theta[i - 1].first || theta[i].second > theta[i - 1].second)
      throw DomainError("theta curve is not nonincreasing");
  // largest sampled level not above x; Theta there bounds Theta(x) from above
  auto below = [&](double x) -> int {
    int idx = -1;
    for (std::size_t i = 0; i < theta.size(); ++i)
      if (theta[i].first <= x)
        idx = static_cast<int>(i);
    return idx;
  };
  ExtinctionVerdict v;
  const int i0 = below(k0);
  if (i0 < 0)
    throw DomainError("theta curve has no level at or below k0");
  for (std::size_t i = static_cast<std::size_t>(i0); i < theta.size(); ++i) {
    if (theta[i].first < k0)
      continue;
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      const double dt = theta[j].first - theta[i].first;
      if (!(dt > 0.0))
        continue;
      ++v.pairs_checked;
      const double rhs = C * std::pow(theta[i].second, beta) / std::pow(dt, alpha);
      if (theta[j].second > rhs * (1.0 + 1e-12) + 1e-300)
        ++v.violations;
    }
  }
  v.inequality_holds = v.violations == 0;
  const double theta0 = theta[i0].second;
  v.t_e = std::pow(C * std::pow(theta0, beta - 1.0) * std::pow(2.0, alpha * beta / (beta - 1.0)),
                   1.0 / alpha);
  v.level = k0 + v.t_e;
  const int ie = below(v.level);
  v.theta_at_level = theta[ie].second;
  v.pass = v.inequality_holds && v.theta_at_level == 0.0;
  return v;
}

} // namespace pbe
