#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "pbesolve/config.hpp"

namespace pbesolve {

enum ExitCode { kSuccess = 0, kInputError = 1, kSolverFailure = 2 };

/// 1 for configuration, parse, geometry and mesh errors; 2 for solver and
/// numerical failures.
int exit_code_for(const std::exception &e);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Invariant checks on the configured problem: Newton convergence and
/// energy descent, initial-guess independence, splitting equivalence,
/// the harmonic component's trace, the linear limit, and the L-infinity
/// bound with its level-set diagnostics.
std::vector<CheckResult> invariant_suite(const RunConfig &config, std::ostream &log);

/// Runs a command and writes its artifacts to config.output. Library errors
/// propagate; the return value is kSuccess or kSolverFailure.
int run(Command command, const RunConfig &config, std::ostream &log);

} // namespace pbesolve
