#pragma once

#include "pbe/model.hpp"
#include "pbe/vec.hpp"

namespace pbe {

/// Coulomb potential of the fixed charges in a uniform dielectric eps_m.
struct CoulombField {
  ChargeSystem charges;
  double scale_G = 1.0;
  /// Evaluations closer than singular_radius to a charge throw.
  double singular_radius = 1e-12;

  CoulombField() = default;
  CoulombField(ChargeSystem system, double scale, double domain_diameter = 1.0);
  /// Uses problem.coulomb_scale().
  static CoulombField from_problem(const PBEProblem &problem,
                                   ChargeSystem system,
                                   double domain_diameter = 1.0);

  int dimension() const { return charges.dimension; }
};

double eval_G(const CoulombField &field, const Vec3 &x);
Vec3 eval_grad_G(const CoulombField &field, const Vec3 &x);

enum class BoundaryMode { Zero, RestrictedG, ScreenedCoulomb };

struct BoundarySpec {
  BoundaryMode mode = BoundaryMode::RestrictedG;
  double kappa = 0.0; // inverse Debye length, screened mode only
  double eps_s = 80.0;
  double eps_m = 2.0;
};

/// Dirichlet data g_Omega at a boundary point.
double boundary_data(const CoulombField &field, const BoundarySpec &spec,
                     const Vec3 &x);

const char *to_string(BoundaryMode mode);

} // namespace pbe
