#pragma once

// Solution pipeline: harmonic component, linearized and nonlinear solves
// for the regular component, potential reconstruction, solvation energy.

#include <optional>
#include <string>
#include <vector>

#include "pbe/coulomb.hpp"
#include "pbe/fem.hpp"
#include "pbe/mesh.hpp"
#include "pbe/model.hpp"
#include "pbe/sparse.hpp"

namespace pbe {

enum class Splitting { TwoTerm, ThreeTerm };
const char *to_string(Splitting s);

struct SolverOptions {
  double tol = 1e-10; // Newton: ||F|| <= tol (1 + ||rhs||)
  int maxit = 50;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-12;
  double cg_tol = 1e-12;
  int cg_maxit = 20000;
  Preconditioner precond = Preconditioner::Jacobi;
};

struct NewtonIteration {
  int iteration = 0;
  double residual = 0.0;      // ||F|| before the step
  double energy = 0.0;        // J after the step
  double energy_change = 0.0; // J(after) - J(before), evaluated without cancellation
  double step = 0.0;
  int backtracks = 0;
  int cg_iterations = 0;
  double cg_residual = 0.0;
};

struct SolveReport {
  std::string method; // "lgpbe" or "gpbe"
  Splitting splitting = Splitting::TwoTerm;
  bool converged = false;
  int newton_iterations = 0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double final_residual = 0.0;
  double rhs_norm = 0.0;
  double tolerance = 0.0;
  double max_abs_b = 0.0;
  int cg_iterations = 0;
  double cg_residual = 0.0;
  int uH_cg_iterations = 0;
  double wall_seconds = 0.0;
  SolverOptions options;
  std::vector<NewtonIteration> history;
};

struct SplitSolution {
  Splitting splitting = Splitting::TwoTerm;
  DiscreteField u;
  std::optional<DiscreteField> uH;
  std::vector<double> G_at_nodes; // NaN where a node sits on a charge
  SolveReport report;
};

/// -G on solvent nodes; discrete harmonic extension of that trace on the
/// molecule.
DiscreteField solve_uH(const Mesh &mesh, const CoulombField &field,
                       const SolverOptions &opts = {}, int *cg_iterations = nullptr);

SplitSolution solve_lgpbe(const PBEProblem &problem, const Mesh &mesh,
                          const CoulombField &field, Splitting splitting,
                          const BoundarySpec &bc, const SolverOptions &opts = {});

/// Damped Newton on the convex energy J. `init` (full nodal vector) must
/// match the Dirichlet data; nullptr starts from the lifting of that data.
SplitSolution solve_gpbe_regular(const PBEProblem &problem, const Mesh &mesh,
                                 const CoulombField &field, Splitting splitting,
                                 const BoundarySpec &bc, const SolverOptions &opts = {},
                                 const std::vector<double> *init = nullptr);

struct EnergyMinimum {
  std::vector<double> u;
  SolveReport report;
};

/// Damped Newton with Armijo backtracking for
/// J(u) = 1/2 u'Au + int B(x, u_h + w) - rhs'u over the affine space fixed
/// by `dirichlet`. The report's method/splitting fields are left to the caller.
EnergyMinimum minimize_energy(const SparseMatrix &A, const std::vector<double> &rhs,
                              const SemilinearContext &ctx,
                              const std::vector<std::pair<int, double>> &dirichlet,
                              const SolverOptions &opts,
                              const std::vector<double> *init = nullptr);

/// Dirichlet data of the regular component u at the boundary nodes.
std::vector<std::pair<int, double>>
regular_dirichlet_data(const Mesh &mesh, const CoulombField &field,
                       Splitting splitting, const BoundarySpec &bc);

struct Reconstruction {
  DiscreteField phi;
  std::vector<char> masked; // node on a charge: phi undefined there
};

Reconstruction reconstruct_phi(const SplitSolution &solution);
/// Full potential at a point; throws SingularityError at a charge.
double eval_phi(const SplitSolution &solution, const CoulombField &field,
                const Vec3 &x);

struct SolvationEnergy {
  double dimensionless = 0.0; // 1/2 sum z_i u(x_i)
  double erg = 0.0;           // kB T times the dimensionless value
  double e0_weighted = 0.0;   // 1/2 sum z_i e0 u(x_i), esu
};

SolvationEnergy solvation_energy(const SplitSolution &solution,
                                 const PBEProblem &problem,
                                 const ChargeSystem &charges);

} // namespace pbe
