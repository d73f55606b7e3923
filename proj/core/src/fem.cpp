#include "pbe/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "pbe/error.hpp"
#include "pbe/quadrature.hpp"

namespace pbe {

ElementGeometry element_geometry(const Mesh &mesh, std::size_t e) {
  ElementGeometry g;
  const auto &t = mesh.triangles[e];
  for (int k = 0; k < 3; ++k)
    g.x[k] = mesh.nodes[t[k]];
  const double twice = (g.x[1].x - g.x[0].x) * (g.x[2].y - g.x[0].y) -
                       (g.x[1].y - g.x[0].y) * (g.x[2].x - g.x[0].x);
  if (!(twice > 0.0))
    throw MeshError("degenerate or inverted element " + std::to_string(e));
  g.area = 0.5 * twice;
  for (int k = 0; k < 3; ++k) {
    const Vec3 &a = g.x[(k + 1) % 3], &b = g.x[(k + 2) % 3];
    g.grad[k] = {(a.y - b.y) / twice, (b.x - a.x) / twice, 0.0};
  }
  return g;
}

std::vector<double> element_permittivity(const Mesh &mesh,
                                         const PBEProblem &problem) {
  std::vector<double> eps(mesh.num_triangles());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    if (mesh.elem_region[e] == RegionTag::Molecule) {
      eps[e] = problem.eps_m;
    } else {
      const auto &t = mesh.triangles[e];
      const Vec3 c = (1.0 / 3.0) * (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]]);
      eps[e] = problem.eps_s(c);
    }
    if (!(eps[e] > 0.0))
      throw DomainError("non-positive permittivity on element " + std::to_string(e));
  }
  return eps;
}

SparseMatrix assemble_stiffness(const Mesh &mesh,
                                const std::vector<double> &eps) {
  if (eps.size() != mesh.num_triangles())
    throw Error("permittivity count does not match element count");
  std::vector<Triplet> t;
  t.reserve(9 * mesh.num_triangles());
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto g = element_geometry(mesh, e);
    const auto &tri = mesh.triangles[e];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t.push_back({tri[i], tri[j], eps[e] * g.area * dot(g.grad[i], g.grad[j])});
  }
  return csr_from_triplets(static_cast<int>(mesh.num_nodes()), t);
}

SparseMatrix assemble_stiffness(const Mesh &mesh, const PBEProblem &problem) {
  return assemble_stiffness(mesh, element_permittivity(mesh, problem));
}

std::vector<double> assemble_two_term_rhs(const Mesh &mesh,
                                          const CoulombField &field,
                                          const PBEProblem &problem) {
  std::vector<double> rhs(mesh.num_nodes(), 0.0);
  const auto &rule = triangle_rule(7);
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    if (mesh.elem_region[e] == RegionTag::Molecule)
      continue;
    const auto g = element_geometry(mesh, e);
    Vec3 flux{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = barycentric_point(g, rule.bary[q]);
      flux += (rule.weights[q] * (problem.eps_m - problem.eps_s(x))) * eval_grad_G(field, x);
    }
    for (int k = 0; k < 3; ++k)
      rhs[mesh.triangles[e][k]] += g.area * dot(flux, g.grad[k]);
  }
  return rhs;
}

std::vector<double> assemble_three_term_rhs(const Mesh &mesh,
                                            const CoulombField &field,
                                            double eps_m,
                                            const std::vector<double> &uH) {
  if (uH.size() != mesh.num_nodes())
    throw Error("uH length does not match node count");
  std::vector<double> rhs(mesh.num_nodes(), 0.0);
  const auto &rule = triangle_rule(7);
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto g = element_geometry(mesh, e);
    const auto &tri = mesh.triangles[e];
    Vec3 flux{};
    if (mesh.elem_region[e] == RegionTag::Molecule) {
      for (int k = 0; k < 3; ++k)
        flux -= (eps_m * uH[tri[k]]) * g.grad[k];
    } else {
      for (std::size_t q = 0; q < rule.size(); ++q)
        flux += (rule.weights[q] * eps_m) *
                eval_grad_G(field, barycentric_point(g, rule.bary[q]));
    }
    for (int k = 0; k < 3; ++k)
      rhs[tri[k]] += g.area * dot(flux, g.grad[k]);
  }
  return rhs;
}

std::vector<double> assemble_interface_flux_rhs(const Mesh &mesh,
                                                const CoulombField &field,
                                                double eps_m, double eps_s) {
  // 5-point Gauss-Legendre on [0, 1]
  static const double gx[5] = {0.046910077030668, 0.230765344947158, 0.5,
                               0.769234655052842, 0.953089922969332};
  static const double gw[5] = {0.118463442528095, 0.239314335249683,
                               0.284444444444444, 0.239314335249683,
                               0.118463442528095};
  struct Side {
    int elem = -1, local = -1;
  };
  std::unordered_map<std::uint64_t, std::array<Side, 2>> edges;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e)
    for (int k = 0; k < 3; ++k) {
      int a = mesh.triangles[e][k], b = mesh.triangles[e][(k + 1) % 3];
      if (a > b)
        std::swap(a, b);
      auto &s = edges[(std::uint64_t(a) << 32) | std::uint32_t(b)];
      (s[0].elem < 0 ? s[0] : s[1]) = {static_cast<int>(e), k};
    }
  std::vector<double> rhs(mesh.num_nodes(), 0.0);
  auto integrate = [&](int e, int k, double coeff) {
    const int a = mesh.triangles[e][k], b = mesh.triangles[e][(k + 1) % 3];
    const Vec3 pa = mesh.nodes[a], pb = mesh.nodes[b];
    const Vec3 d = pb - pa;
    const double len = norm(d);
    const Vec3 n{d.y / len, -d.x / len, 0.0}; // outward for a CCW element
    for (int q = 0; q < 5; ++q) {
      const Vec3 x = pa + gx[q] * d;
      const double flux = coeff * dot(eval_grad_G(field, x), n) * gw[q] * len;
      rhs[a] += (1.0 - gx[q]) * flux;
      rhs[b] += gx[q] * flux;
    }
  };
  for (const auto &[key, s] : edges) {
    if (s[1].elem < 0) {
      if (mesh.elem_region[s[0].elem] != RegionTag::Molecule)
        integrate(s[0].elem, s[0].local, eps_m - eps_s);
      continue;
    }
    const bool m0 = mesh.elem_region[s[0].elem] == RegionTag::Molecule;
    const bool m1 = mesh.elem_region[s[1].elem] == RegionTag::Molecule;
    if (m0 != m1) {
      const Side &mol = m0 ? s[0] : s[1];
      integrate(mol.elem, mol.local, eps_s - eps_m);
    }
  }
  return rhs;
}

LinearReaction assemble_linear_reaction(const Mesh &mesh,
                                        const PBEProblem &problem,
                                        const CoulombField *field) {
  LinearReaction out;
  out.load.assign(mesh.num_nodes(), 0.0);
  const auto lin = linearized_coefficients(problem, RegionTag::Ions);
  const auto &rule = triangle_rule(4);
  std::vector<Triplet> t;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    if (mesh.elem_region[e] != RegionTag::Ions)
      continue;
    const auto g = element_geometry(mesh, e);
    const auto &tri = mesh.triangles[e];
    if (lin.m_bar_sq != 0.0)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          t.push_back({tri[i], tri[j], lin.m_bar_sq * g.area * (i == j ? 2.0 : 1.0) / 12.0});
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double f0 = lin.ell;
      if (field && lin.m_bar_sq != 0.0)
        f0 -= lin.m_bar_sq * eval_G(*field, barycentric_point(g, rule.bary[q]));
      for (int k = 0; k < 3; ++k)
        out.load[tri[k]] += rule.weights[q] * g.area * f0 * rule.bary[q][k];
    }
  }
  out.mass = csr_from_triplets(static_cast<int>(mesh.num_nodes()), t);
  return out;
}

SemilinearContext make_semilinear_context(const Mesh &mesh,
                                          const PBEProblem &problem,
                                          const ScalarFunction &w) {
  SemilinearContext ctx;
  ctx.mesh = &mesh;
  ctx.problem = &problem;
  const auto &rule = triangle_rule(4);
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    if (mesh.elem_region[e] != RegionTag::Ions)
      continue;
    ctx.ion_elements.push_back(e);
    ctx.geometry.push_back(element_geometry(mesh, e));
    for (std::size_t q = 0; q < rule.size(); ++q)
      ctx.w.push_back(w ? w(barycentric_point(ctx.geometry.back(), rule.bary[q])) : 0.0);
  }
  return ctx;
}

SemilinearContext make_semilinear_context(const Mesh &mesh,
                                          const PBEProblem &problem,
                                          const CoulombField *field) {
  if (!field)
    return make_semilinear_context(mesh, problem, ScalarFunction{});
  return make_semilinear_context(mesh, problem, [field](const Vec3 &x) { return eval_G(*field, x); });
}

namespace {

template <class F>
void for_each_ion_point(const SemilinearContext &ctx,
                        const std::vector<double> &u, F &&f) {
  if (u.size() != ctx.mesh->num_nodes())
    throw Error("field length does not match node count");
  const auto &rule = triangle_rule(4);
  for (std::size_t i = 0; i < ctx.ion_elements.size(); ++i) {
    const auto &tri = ctx.mesh->triangles[ctx.ion_elements[i]];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto &l = rule.bary[q];
      const double t = l[0] * u[tri[0]] + l[1] * u[tri[1]] + l[2] * u[tri[2]] +
                       ctx.w[i * rule.size() + q];
      f(tri, l, rule.weights[q] * ctx.geometry[i].area, t);
    }
  }
}

} // namespace

SemilinearTerms assemble_semilinear(const SemilinearContext &ctx,
                                    const std::vector<double> &u) {
  SemilinearTerms out;
  out.residual.assign(ctx.mesh->num_nodes(), 0.0);
  std::vector<Triplet> t;
  t.reserve(27 * ctx.ion_elements.size());
  for_each_ion_point(ctx, u, [&](const Triangle &tri, const auto &l, double w, double s) {
    const double b = eval_b(*ctx.problem, RegionTag::Ions, s);
    const double bp = eval_b_prime(*ctx.problem, RegionTag::Ions, s);
    out.max_abs_b = std::max(out.max_abs_b, std::abs(b));
    for (int i = 0; i < 3; ++i) {
      out.residual[tri[i]] += w * b * l[i];
      for (int j = 0; j < 3; ++j)
        t.push_back({tri[i], tri[j], w * bp * l[i] * l[j]});
    }
  });
  out.tangent = csr_from_triplets(static_cast<int>(ctx.mesh->num_nodes()), t);
  return out;
}

std::vector<double> semilinear_residual(const SemilinearContext &ctx,
                                        const std::vector<double> &u) {
  std::vector<double> r(ctx.mesh->num_nodes(), 0.0);
  for_each_ion_point(ctx, u, [&](const Triangle &tri, const auto &l, double w, double s) {
    const double b = eval_b(*ctx.problem, RegionTag::Ions, s);
    for (int i = 0; i < 3; ++i)
      r[tri[i]] += w * b * l[i];
  });
  return r;
}

double integrate_B(const SemilinearContext &ctx, const std::vector<double> &u) {
  double sum = 0.0;
  for_each_ion_point(ctx, u, [&](const Triangle &, const auto &, double w, double s) {
    sum += w * eval_B(*ctx.problem, RegionTag::Ions, s);
  });
  return sum;
}

double integrate_B_remainder(const SemilinearContext &ctx,
                             const std::vector<double> &u,
                             const std::vector<double> &d, double a) {
  double sum = 0.0;
  for_each_ion_point(ctx, u, [&](const Triangle &tri, const auto &l, double w, double s) {
    const double step = a * (l[0] * d[tri[0]] + l[1] * d[tri[1]] + l[2] * d[tri[2]]);
    sum += w * eval_B_remainder(*ctx.problem, RegionTag::Ions, s, step);
  });
  return sum;
}

std::vector<double> assemble_load(const Mesh &mesh, const RegionScalar &f0,
                                  const RegionVector &f) {
  std::vector<double> rhs(mesh.num_nodes(), 0.0);
  const auto &rule = triangle_rule(2);
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto g = element_geometry(mesh, e);
    const auto &tri = mesh.triangles[e];
    const RegionTag tag = mesh.elem_region[e];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = barycentric_point(g, rule.bary[q]);
      const double w = rule.weights[q] * g.area;
      const double s = f0 ? f0(x, tag) : 0.0;
      const Vec3 v = f ? f(x, tag) : Vec3{};
      for (int k = 0; k < 3; ++k)
        rhs[tri[k]] += w * (s * rule.bary[q][k] + dot(v, g.grad[k]));
    }
  }
  return rhs;
}

std::vector<double> assemble_load(const Mesh &mesh, const ScalarFunction &f0,
                                  const VectorFunction &f) {
  RegionScalar s;
  RegionVector v;
  if (f0)
    s = [&f0](const Vec3 &x, RegionTag) { return f0(x); };
  if (f)
    v = [&f](const Vec3 &x, RegionTag) { return f(x); };
  return assemble_load(mesh, s, v);
}

double integrate(const Mesh &mesh, const RegionScalar &g,
                 const std::function<bool(RegionTag)> &include) {
  const auto &rule = triangle_rule(4);
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const RegionTag tag = mesh.elem_region[e];
    if (include && !include(tag))
      continue;
    const auto geo = element_geometry(mesh, e);
    for (std::size_t q = 0; q < rule.size(); ++q)
      sum += rule.weights[q] * geo.area * g(barycentric_point(geo, rule.bary[q]), tag);
  }
  return sum;
}

std::vector<double> AssembledSystem::expand(const std::vector<double> &free) const {
  std::vector<double> full = dirichlet_values;
  for (std::size_t i = 0; i < free_nodes.size(); ++i)
    full[free_nodes[i]] = free[i];
  return full;
}

std::vector<double> AssembledSystem::restrict_to_free(const std::vector<double> &full) const {
  std::vector<double> out(free_nodes.size());
  for (std::size_t i = 0; i < free_nodes.size(); ++i)
    out[i] = full[free_nodes[i]];
  return out;
}

AssembledSystem apply_dirichlet(const SparseMatrix &A, const std::vector<double> &rhs,
                                const std::vector<std::pair<int, double>> &values) {
  const int n = A.n;
  if (static_cast<int>(rhs.size()) != n)
    throw Error("rhs length does not match matrix");
  AssembledSystem s;
  s.dirichlet_values.assign(n, 0.0);
  std::vector<char> constrained(n, 0);
  for (const auto &[node, g] : values) {
    if (node < 0 || node >= n)
      throw Error("Dirichlet node " + std::to_string(node) + " out of range");
    if (constrained[node] && s.dirichlet_values[node] != g)
      throw Error("conflicting Dirichlet values at node " + std::to_string(node));
    constrained[node] = 1;
    s.dirichlet_values[node] = g;
  }
  s.full_to_free.assign(n, -1);
  for (int i = 0; i < n; ++i)
    if (constrained[i])
      s.dirichlet.emplace_back(i, s.dirichlet_values[i]);
    else {
      s.full_to_free[i] = static_cast<int>(s.free_nodes.size());
      s.free_nodes.push_back(i);
    }
  const int nf = static_cast<int>(s.free_nodes.size());
  s.rhs.resize(nf);
  std::vector<Triplet> t;
  t.reserve(A.nnz());
  for (int fi = 0; fi < nf; ++fi) {
    const int i = s.free_nodes[fi];
    double r = rhs[i];
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const int j = A.col[k];
      if (constrained[j])
        r -= A.val[k] * s.dirichlet_values[j];
      else
        t.push_back({fi, s.full_to_free[j], A.val[k]});
    }
    s.rhs[fi] = r;
  }
  s.matrix = csr_from_triplets(nf, t);
  return s;
}

EnergyValue energy_J(const SparseMatrix &A, const SemilinearContext &ctx,
                     const std::vector<double> &u, const std::vector<double> &rhs) {
  EnergyValue J;
  try {
    J.value = 0.5 * dot(u, A * u) + integrate_B(ctx, u) - dot(rhs, u);
  } catch (const DomainError &) {
    J.infinite = true;
    J.value = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(J.value)) {
    J.infinite = true;
    J.value = std::numeric_limits<double>::infinity();
  }
  return J;
}

namespace {

std::array<double, 3> barycentric(const Mesh &mesh, std::size_t e, const Vec3 &x) {
  const auto &t = mesh.triangles[e];
  const Vec3 &a = mesh.nodes[t[0]], &b = mesh.nodes[t[1]], &c = mesh.nodes[t[2]];
  const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  const double l1 = ((x.x - a.x) * (c.y - a.y) - (x.y - a.y) * (c.x - a.x)) / det;
  const double l2 = ((b.x - a.x) * (x.y - a.y) - (b.y - a.y) * (x.x - a.x)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

} // namespace

int locate(const Mesh &mesh, const Vec3 &x) {
  int best = -1;
  double best_min = -1e-12;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto l = barycentric(mesh, e, x);
    const double m = std::min({l[0], l[1], l[2]});
    if (m >= 0.0)
      return static_cast<int>(e);
    if (m > best_min) {
      best_min = m;
      best = static_cast<int>(e);
    }
  }
  return best;
}

double point_eval(const DiscreteField &u, const Vec3 &x) {
  const Mesh &mesh = *u.mesh;
  const int e = locate(mesh, x);
  if (e < 0)
    throw MeshError("point (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                    ") lies outside the mesh");
  const auto l = barycentric(mesh, e, x);
  const auto &t = mesh.triangles[e];
  return l[0] * u.values[t[0]] + l[1] * u.values[t[1]] + l[2] * u.values[t[2]];
}

ErrorNorms error_norms(const DiscreteField &u, const ScalarFunction &exact,
                       const VectorFunction &grad_exact,
                       const std::function<bool(RegionTag)> &include) {
  const Mesh &mesh = *u.mesh;
  const auto &rule = triangle_rule(4);
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    if (include && !include(mesh.elem_region[e]))
      continue;
    const auto g = element_geometry(mesh, e);
    const auto &t = mesh.triangles[e];
    Vec3 grad{};
    for (int k = 0; k < 3; ++k)
      grad += u.values[t[k]] * g.grad[k];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto &l = rule.bary[q];
      const Vec3 x = barycentric_point(g, l);
      const double uh = l[0] * u.values[t[0]] + l[1] * u.values[t[1]] + l[2] * u.values[t[2]];
      const double w = rule.weights[q] * g.area;
      const double d = uh - exact(x);
      l2 += w * d * d;
      if (grad_exact) {
        const Vec3 dg = grad - grad_exact(x);
        h1 += w * dot(dg, dg);
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

double l2_norm(const DiscreteField &u, const std::function<bool(RegionTag)> &include) {
  const Mesh &mesh = *u.mesh;
  double s = 0.0;
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    if (include && !include(mesh.elem_region[e]))
      continue;
    const auto &t = mesh.triangles[e];
    const double a = u.values[t[0]], b = u.values[t[1]], c = u.values[t[2]];
    // exact integral of the square of a linear function
    s += mesh.signed_area(e) / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
  }
  return std::sqrt(s);
}

} // namespace pbe
