#pragma once

// Verification harness: manufactured solutions, convergence studies,
// splitting equivalence, and the L-infinity bound diagnostics built on
// level-set measures Theta(k) = |{|u| > k}|.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pbe/fem.hpp"
#include "pbe/solver.hpp"

namespace pbe {

enum class CaseId { LinearJump, SemilinearNeutral, SemilinearNonneutral, ExactLinear };

const char *to_string(CaseId id);
CaseId case_from_string(const std::string &name);

struct CaseParameters {
  double eps_m = 2.0;
  double eps_s = 80.0;
  double r_m = 1.0;
  double r_iel = 1.5;
  double L = 3.0;
};

/// Weak problem a(u,v) + int b(x, u + w) v = int (f0 v + f . grad v),
/// u = g on the boundary, whose exact solution is known. For linear cases
/// b is replaced by its linearization m_bar^2 t - ell.
struct ManufacturedCase {
  CaseId id = CaseId::LinearJump;
  CaseParameters params;
  PBEProblem problem;
  bool linear = false;
  RegionScalar exact;
  RegionVector grad_exact;
  RegionScalar f0;
  RegionVector f;
  ScalarFunction w; // shift inside b on Ions
};

ManufacturedCase manufactured_case(CaseId id, const CaseParameters &params = {});

Mesh case_mesh(const ManufacturedCase &mc, int n);

struct ManufacturedSolution {
  DiscreteField u;
  SolveReport report;
};

ManufacturedSolution solve_manufactured(const ManufacturedCase &mc, const Mesh &mesh,
                                        const SolverOptions &opts = {});

ErrorNorms manufactured_errors(const ManufacturedCase &mc, const DiscreteField &u);

/// Energy norm of the discrete error of the interpolant of u*:
/// sqrt(R' A^{-1} R) with R the free-node residual of the interpolant.
double consistency_residual(const ManufacturedCase &mc, const Mesh &mesh,
                            const SolverOptions &opts = {});

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  std::size_t nodes = 0;
  std::size_t triangles = 0;
  double L2 = 0.0;
  double H1 = 0.0;
  int newton_iterations = 0;
};

struct ConvergenceTable {
  std::string case_name;
  std::vector<ConvergenceRow> rows;
  double slope_L2 = 0.0;
  double slope_H1 = 0.0;
  bool saturated = false; // errors at round-off level, slopes meaningless
  bool aborted = false;
  std::string message;
};

/// Least-squares slope of log(y) against log(x).
double fitted_slope(const std::vector<double> &x, const std::vector<double> &y);

/// Base disk mesh with n inner-circle nodes and `levels` meshes in total.
ConvergenceTable convergence_study(const ManufacturedCase &mc, int n, int levels,
                                   const SolverOptions &opts = {});
void write_convergence_csv(std::ostream &out, const ConvergenceTable &table);

struct EquivalenceRow {
  int level = 0;
  double h = 0.0;
  double rel_phi_diff = 0.0; // ||phi_2 - phi_3|| / ||phi_2|| over the solvent
  double abs_phi_diff = 0.0;
  int newton_two = 0;
  int newton_three = 0;
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  bool decreasing = true;
  double min_ratio = 0.0; // smallest successive decrease factor
};

/// Solves with both splittings on `levels` successively refined meshes.
EquivalenceReport splitting_equivalence(const PBEProblem &problem,
                                        const CoulombField &field, const Mesh &base,
                                        int levels, const BoundarySpec &bc,
                                        bool nonlinear = true,
                                        const SolverOptions &opts = {});

/// measure |{x : |u_h(x)| > k}| of the P1 interpolant for each level k.
std::vector<std::pair<double, double>> theta_curve(const DiscreteField &u,
                                                   const std::vector<double> &levels);

/// Ascending levels covering [0, 1.01 sup] and [0, 1.01 k1], `count` each.
std::vector<double> bound_levels(double sup, double k1, int count);

/// Lebesgue norms of the data of the regular-component problem.
struct DataNorms {
  double c_qprime = 0.0;  // ||c(x, omega)||_{q'}
  double c_r = 0.0;       // ||c(x, omega)||_r
  double f0_qprime = 0.0;
  double f0_r = 0.0;
  double f_L2 = 0.0;
  double f_s = 0.0;
};

struct BoundInputs {
  DataNorms norms;
  double C_E = 0.0;
  double C_P = 0.0;
  double alpha_lower = 0.0;
  double area = 0.0;
  double s = 8.0;
  double r = 4.0;
  double q = 4.0;
  int dimension = 2;
};

struct BoundConstants {
  BoundInputs inputs;
  double C_D = 0.0;
  double C_M = 0.0;
  double beta = 0.0;
  double k0 = 0.0;
  double k1 = 0.0;
};

/// Embedding constant of H1 into L4 in 2-D from Ladyzhenskaya's inequality.
double default_embedding_constant();
/// diam/pi, a Poincare constant for convex domains.
double default_poincare_constant(double diameter);

BoundConstants apriori_bound(const BoundInputs &in);

DataNorms compute_data_norms(const Mesh &mesh, const RegionScalar &c,
                             const RegionScalar &f0, const RegionVector &f,
                             double s, double r, double q);

/// Bound diagnostics for a solved regular component. Non-homogeneous
/// Dirichlet data are lifted by the P1 function u_g that vanishes at
/// interior nodes; the bound is for u - u_g.
struct SolutionBound {
  BoundConstants constants;
  DiscreteField homogenized; // u - u_g
  double sup_u = 0.0;        // ||u_h - u_g||_inf
  double sup_lifting = 0.0;  // ||u_g||_inf
  bool holds = false;        // sup_u <= k1
};

SolutionBound solution_bound(const PBEProblem &problem, const CoulombField &field,
                             const SplitSolution &solution, const BoundarySpec &bc,
                             double s = 8.0, double r = 4.0, double q = 4.0);

struct ExtinctionVerdict {
  bool pass = false;
  double t_e = 0.0;
  double level = 0.0;        // k0 + t_e
  double theta_at_level = 0.0;
  bool inequality_holds = true;
  int pairs_checked = 0;
  int violations = 0;
};

/// Checks Theta(t) <= C Theta(k)^beta / (t - k)^alpha on sampled pairs
/// t > k >= k0 and that the curve vanishes at k0 + t_e with
/// t_e^alpha = C Theta(k0)^(beta - 1) 2^(alpha beta / (beta - 1)).
ExtinctionVerdict extinction_check(const std::vector<std::pair<double, double>> &theta,
                                   double C, double alpha, double beta, double k0);

} // namespace pbe
