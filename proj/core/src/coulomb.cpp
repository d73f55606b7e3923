#include "pbe/coulomb.hpp"

#include <cmath>
#include <sstream>

#include "pbe/error.hpp"

namespace pbe {

CoulombField::CoulombField(ChargeSystem system, double scale,
                           double domain_diameter)
    : charges(std::move(system)), scale_G(scale),
      singular_radius(1e-12 * domain_diameter) {
  if (!(scale_G > 0.0))
    throw DomainError("Coulomb scale must be positive");
  if (charges.dimension != 2 && charges.dimension != 3)
    throw GeometryError("Coulomb field dimension must be 2 or 3");
}

CoulombField CoulombField::from_problem(const PBEProblem &problem,
                                        ChargeSystem system,
                                        double domain_diameter) {
  return CoulombField(std::move(system), problem.coulomb_scale(),
                      domain_diameter);
}

namespace {

Vec3 offset(const CoulombField &field, const Vec3 &x, const Charge &c,
            std::size_t i) {
  Vec3 d = x - c.position;
  if (field.dimension() == 2)
    d.z = 0.0;
  if (norm(d) < field.singular_radius) {
    std::ostringstream os;
    os << "Coulomb potential evaluated at charge " << i << " ("
       << c.position.x << ", " << c.position.y << ", " << c.position.z << ")";
    throw SingularityError(os.str());
  }
  return d;
}

} // namespace

double eval_G(const CoulombField &field, const Vec3 &x) {
  double sum = 0.0;
  const auto &cs = field.charges.charges;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double r = norm(offset(field, x, cs[i], i));
    if (field.dimension() == 3)
      sum += cs[i].valence / r;
    else
      sum -= 2.0 * cs[i].valence * std::log(r);
  }
  return field.scale_G * sum;
}

Vec3 eval_grad_G(const CoulombField &field, const Vec3 &x) {
  Vec3 g{};
  const auto &cs = field.charges.charges;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Vec3 d = offset(field, x, cs[i], i);
    const double r2 = dot(d, d);
    if (field.dimension() == 3)
      g -= (cs[i].valence / (r2 * std::sqrt(r2))) * d;
    else
      g -= (2.0 * cs[i].valence / r2) * d;
  }
  return field.scale_G * g;
}

double boundary_data(const CoulombField &field, const BoundarySpec &spec,
                     const Vec3 &x) {
  switch (spec.mode) {
  case BoundaryMode::Zero:
    return 0.0;
  case BoundaryMode::RestrictedG:
    return eval_G(field, x);
  case BoundaryMode::ScreenedCoulomb: {
    if (field.dimension() != 3)
      throw DomainError("screened_coulomb boundary data is only available in 3-D");
    double sum = 0.0;
    const auto &cs = field.charges.charges;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double r = norm(offset(field, x, cs[i], i));
      sum += cs[i].valence * std::exp(-spec.kappa * r) / r;
    }
    return field.scale_G * spec.eps_m / spec.eps_s * sum;
  }
  }
  return 0.0;
}

const char *to_string(BoundaryMode mode) {
  switch (mode) {
  case BoundaryMode::Zero:
    return "zero";
  case BoundaryMode::RestrictedG:
    return "restricted_G";
  case BoundaryMode::ScreenedCoulomb:
    return "screened_coulomb";
  }
  return "unknown";
}

} // namespace pbe
