#pragma once

// Run configuration: an INI-like text format with [section] headers,
// `key = value` lines and `#` comments.

#include <cstdint>
#include <string>
#include <vector>

#include "pbe/coulomb.hpp"
#include "pbe/model.hpp"
#include "pbe/solver.hpp"
#include "pbe/verify.hpp"

namespace pbesolve {

enum class Command { Surface, Mesh, Solve, Verify, Convergence, Energy };

const char *to_string(Command c);
Command command_from_string(const std::string &name);

enum class Method { GPBE, LGPBE };
enum class InitialGuess { Zero, Random };
enum class ConcentrationUnit { NumberDensity, Molar };

struct ChargeEntry {
  double x = 0.0, y = 0.0, z = 0.0;
  double valence = 0.0;
  double radius = 0.0;
  friend bool operator==(const ChargeEntry &, const ChargeEntry &) = default;
};

struct SpeciesEntry {
  double concentration = 0.0;
  int valence = 1;
  friend bool operator==(const SpeciesEntry &, const SpeciesEntry &) = default;
};

struct RunConfig {
  // [run]
  std::string output = "out";
  std::uint64_t seed = 42;

  // [geometry]
  double r_m = 1.0;
  double r_iel = 1.5;
  double half_width = 3.0;
  int n = 16;
  int refinements = 0;
  std::string mesh_file; // overrides the generated disk mesh
  double probe_radius = 1.4;
  double ion_radius = 2.0;
  double grid_spacing = 0.1;

  // [charges]
  int dimension = 2;
  std::vector<ChargeEntry> charges;
  std::string pqr;
  double length_per_angstrom = 1.0;

  // [problem]
  pbe::UnitMode unit_mode = pbe::UnitMode::Synthetic;
  double eps_m = 2.0;
  double eps_s = 80.0;
  double eps_s_gradient_x = 0.0;
  double eps_s_gradient_y = 0.0;
  double temperature = 298.15;
  double length_unit = 1.0;
  ConcentrationUnit concentration_unit = ConcentrationUnit::NumberDensity;
  std::vector<SpeciesEntry> species;

  // [solver]
  Method method = Method::GPBE;
  pbe::Splitting splitting = pbe::Splitting::TwoTerm;
  pbe::BoundaryMode bc = pbe::BoundaryMode::RestrictedG;
  double kappa = 0.0;
  double tol = 1e-10;
  int maxit = 50;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-12;
  double cg_tol = 1e-12;
  int cg_maxit = 20000;
  pbe::Preconditioner precond = pbe::Preconditioner::Jacobi;
  InitialGuess init = InitialGuess::Zero;
  double init_amplitude = 1.0;

  // [convergence]
  pbe::CaseId study_case = pbe::CaseId::LinearJump;
  int study_n = 16;
  int study_levels = 4;

  // [verify]
  int equivalence_levels = 3;
  int theta_levels = 400;

  /// Directory of the config file; not part of the echo.
  std::string base_dir;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;

  /// Input path relative to base_dir unless absolute.
  std::string resolve(const std::string &path) const;

  pbe::PBEProblem problem() const;
  pbe::ChargeSystem charge_system() const;
  pbe::SolverOptions solver_options() const;
  pbe::BoundarySpec boundary() const;
};

/// Throws pbe::ConfigError with the offending line for unknown sections or
/// keys, malformed values and missing required keys. Paths are taken as
/// written; `base_dir` (if nonempty) resolves relative input paths.
RunConfig parse_config(const std::string &text, const std::string &base_dir = "");
RunConfig load_config_file(const std::string &path);

/// Canonical text of a configuration with every key present.
std::string echo_config(const RunConfig &config);

/// Range checks and file existence; throws pbe::ConfigError.
void validate(const RunConfig &config);

} // namespace pbesolve
