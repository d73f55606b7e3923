#pragma once

// P1 finite-element forms of the regularized Poisson-Boltzmann problem.

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "pbe/coulomb.hpp"
#include "pbe/mesh.hpp"
#include "pbe/model.hpp"
#include "pbe/sparse.hpp"

namespace pbe {

using ScalarFunction = std::function<double(const Vec3 &)>;
using VectorFunction = std::function<Vec3(const Vec3 &)>;
/// Data that may jump across region boundaries, evaluated with the tag of
/// the element being integrated.
using RegionScalar = std::function<double(const Vec3 &, RegionTag)>;
using RegionVector = std::function<Vec3(const Vec3 &, RegionTag)>;

struct ElementGeometry {
  double area = 0.0;
  std::array<Vec3, 3> grad; // gradients of the barycentric hat functions
  std::array<Vec3, 3> x;
};

ElementGeometry element_geometry(const Mesh &mesh, std::size_t e);

inline Vec3 barycentric_point(const ElementGeometry &g,
                              const std::array<double, 3> &l) {
  return l[0] * g.x[0] + l[1] * g.x[1] + l[2] * g.x[2];
}

/// eps_m on Molecule elements, eps_s at the centroid elsewhere.
std::vector<double> element_permittivity(const Mesh &mesh,
                                         const PBEProblem &problem);

SparseMatrix assemble_stiffness(const Mesh &mesh,
                                const std::vector<double> &eps_per_element);
SparseMatrix assemble_stiffness(const Mesh &mesh, const PBEProblem &problem);

/// sum over solvent elements of int (eps_m - eps_s) grad G . grad phi_i.
std::vector<double> assemble_two_term_rhs(const Mesh &mesh,
                                          const CoulombField &field,
                                          const PBEProblem &problem);
/// -sum_Molecule int eps_m grad uH . grad phi_i
///   + sum_solvent int eps_m grad G . grad phi_i.
std::vector<double> assemble_three_term_rhs(const Mesh &mesh,
                                            const CoulombField &field,
                                            double eps_m,
                                            const std::vector<double> &uH);

/// int_Gamma (eps_s - eps_m) grad G . n phi_i with n the outward normal of
/// the molecule; equals the two-term volume form for constant eps_s.
std::vector<double> assemble_interface_flux_rhs(const Mesh &mesh,
                                                const CoulombField &field,
                                                double eps_m, double eps_s);

struct LinearReaction {
  SparseMatrix mass; // m_bar^2-weighted consistent mass matrix
  std::vector<double> load;
};

/// Mass matrix weighted by m_bar^2 and the load of f0 = -m_bar^2 G + ell
/// (field given) or f0 = ell (field == nullptr).
LinearReaction assemble_linear_reaction(const Mesh &mesh,
                                        const PBEProblem &problem,
                                        const CoulombField *field);

/// Quadrature data for the nonlinear term b(x, u_h + w).
struct SemilinearContext {
  const Mesh *mesh = nullptr;
  const PBEProblem *problem = nullptr;
  std::vector<std::size_t> ion_elements;
  std::vector<ElementGeometry> geometry; // parallel to ion_elements
  std::vector<double> w;                 // per (ion element, point)
};

/// w = G on Ions elements (field given) or w = 0 (field == nullptr).
SemilinearContext make_semilinear_context(const Mesh &mesh,
                                          const PBEProblem &problem,
                                          const CoulombField *field);
/// Arbitrary shift w(x) on Ions elements.
SemilinearContext make_semilinear_context(const Mesh &mesh,
                                          const PBEProblem &problem,
                                          const ScalarFunction &w);

/// Integral of a function over the elements accepted by `include`, order 4.
double integrate(const Mesh &mesh, const RegionScalar &g,
                 const std::function<bool(RegionTag)> &include = {});

struct SemilinearTerms {
  std::vector<double> residual; // int b(x, u_h + w) phi_i
  SparseMatrix tangent;         // int b'(x, u_h + w) phi_i phi_j
  double max_abs_b = 0.0;
};

SemilinearTerms assemble_semilinear(const SemilinearContext &ctx,
                                    const std::vector<double> &u);
std::vector<double> semilinear_residual(const SemilinearContext &ctx,
                                        const std::vector<double> &u);
/// int B(x, u_h + w); throws DomainError on exponent overflow.
double integrate_B(const SemilinearContext &ctx, const std::vector<double> &u);
/// int [B(u + a d + w) - B(u + w) - a d b(u + w)]: the exact nonlinear part
/// of an energy change, free of cancellation.
double integrate_B_remainder(const SemilinearContext &ctx,
                             const std::vector<double> &u,
                             const std::vector<double> &d, double a);

/// int f0 phi_i + int f . grad phi_i with the order-2 rule.
std::vector<double> assemble_load(const Mesh &mesh, const ScalarFunction &f0,
                                  const VectorFunction &f);
std::vector<double> assemble_load(const Mesh &mesh, const RegionScalar &f0,
                                  const RegionVector &f);

struct AssembledSystem {
  SparseMatrix matrix; // free-free block
  std::vector<double> rhs;
  std::vector<int> free_nodes;
  std::vector<int> full_to_free; // -1 for constrained nodes
  std::vector<double> dirichlet_values; // full length; 0 at free nodes
  std::vector<std::pair<int, double>> dirichlet;

  std::vector<double> expand(const std::vector<double> &free) const;
  std::vector<double> restrict_to_free(const std::vector<double> &full) const;
};

/// Symmetric elimination of the constrained nodes.
AssembledSystem apply_dirichlet(const SparseMatrix &matrix,
                                const std::vector<double> &rhs,
                                const std::vector<std::pair<int, double>> &values);

struct EnergyValue {
  double value = 0.0;
  bool infinite = false;
};

/// 1/2 u'Au + int B(x, u_h + w) - rhs'u; +infinity if B overflows.
EnergyValue energy_J(const SparseMatrix &A, const SemilinearContext &ctx,
                     const std::vector<double> &u,
                     const std::vector<double> &rhs);

/// Index of a triangle containing x, or -1.
int locate(const Mesh &mesh, const Vec3 &x);
double point_eval(const DiscreteField &u, const Vec3 &x);

struct ErrorNorms {
  double L2 = 0.0;
  double H1 = 0.0; // seminorm
};

/// Order-4 quadrature; `include` restricts the element set.
ErrorNorms error_norms(const DiscreteField &u, const ScalarFunction &exact,
                       const VectorFunction &grad_exact,
                       const std::function<bool(RegionTag)> &include = {});

/// L2 norm of a P1 field over the elements accepted by `include`.
double l2_norm(const DiscreteField &u,
               const std::function<bool(RegionTag)> &include = {});

inline bool is_solvent(RegionTag t) { return t != RegionTag::Molecule; }

} // namespace pbe
