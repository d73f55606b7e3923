#include "pbe/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pbe/error.hpp"

namespace pbe {

const char *to_string(RegionTag tag) {
  switch (tag) {
  case RegionTag::Molecule:
    return "molecule";
  case RegionTag::IEL:
    return "iel";
  case RegionTag::Ions:
    return "ions";
  }
  return "unknown";
}

RegionTag region_from_int(int value) {
  if (value < 0 || value > 2)
    throw DomainError("region tag out of range: " + std::to_string(value));
  return static_cast<RegionTag>(value);
}

void ChargeSystem::validate() const {
  if (dimension != 2 && dimension != 3)
    throw GeometryError("charge system dimension must be 2 or 3");
  if (charges.empty())
    throw GeometryError("charge system has no charges");
  for (std::size_t i = 0; i < charges.size(); ++i) {
    if (charges[i].radius < 0.0)
      throw GeometryError("negative radius for charge " + std::to_string(i));
    for (std::size_t j = i + 1; j < charges.size(); ++j)
      if (charges[i].position == charges[j].position)
        throw GeometryError("charges " + std::to_string(i) + " and " +
                            std::to_string(j) + " coincide");
  }
}

double ChargeSystem::total_valence() const {
  double sum = 0.0;
  for (const auto &c : charges)
    sum += c.valence;
  return sum;
}

double PBEProblem::scale() const {
  if (unit_mode == UnitMode::Synthetic)
    return 1.0;
  const double e0 = constants.elementary_charge;
  return 4.0 * std::numbers::pi * e0 * e0 /
         (constants.boltzmann * temperature) * length_unit * length_unit;
}

double PBEProblem::coulomb_scale() const {
  if (unit_mode == UnitMode::Synthetic)
    return 1.0;
  const double e0 = constants.elementary_charge;
  return e0 * e0 / (eps_m * constants.boltzmann * temperature) / length_unit;
}

double PBEProblem::thermal_energy() const {
  return constants.boltzmann * temperature;
}

void PBEProblem::validate() const {
  if (!(eps_m > 0.0))
    throw DomainError("eps_m must be positive");
  if (!(eps_s.value > 0.0))
    throw DomainError("eps_s must be positive");
  if (!(temperature > 0.0))
    throw DomainError("temperature must be positive");
  if (!(length_unit > 0.0))
    throw DomainError("length unit must be positive");
  for (std::size_t j = 0; j < species.size(); ++j) {
    if (species[j].concentration < 0.0)
      throw DomainError("negative concentration for species " +
                        std::to_string(j));
    if (species[j].valence == 0)
      throw DomainError("zero valence for species " + std::to_string(j));
  }
}

namespace {

void guard_exponent(const PBEProblem &problem, double t) {
  for (std::size_t j = 0; j < problem.species.size(); ++j) {
    const double e = problem.species[j].valence * t;
    if (!std::isfinite(t) || std::abs(e) > kExponentLimit) {
      std::ostringstream os;
      os << "exponent overflow for species " << j << " (valence "
         << problem.species[j].valence << ", t = " << t << ")";
      throw DomainError(os.str());
    }
  }
}

// e^x - 1 - x, accurate for small |x|.
double expm1_minus_x(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return x2 * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x * (1.0 / 120.0 + x / 720.0))));
  }
  return std::expm1(x) - x;
}

} // namespace

double eval_b(const PBEProblem &problem, RegionTag region, double t) {
  if (region != RegionTag::Ions)
    return 0.0;
  guard_exponent(problem, t);
  double sum = 0.0;
  for (const auto &s : problem.species)
    sum += s.concentration * s.valence * std::exp(-s.valence * t);
  return -problem.scale() * sum;
}

double eval_b_prime(const PBEProblem &problem, RegionTag region, double t) {
  if (region != RegionTag::Ions)
    return 0.0;
  guard_exponent(problem, t);
  double sum = 0.0;
  for (const auto &s : problem.species)
    sum += s.concentration * s.valence * s.valence * std::exp(-s.valence * t);
  return problem.scale() * sum;
}

double eval_B(const PBEProblem &problem, RegionTag region, double t) {
  if (region != RegionTag::Ions)
    return 0.0;
  guard_exponent(problem, t);
  double sum = 0.0;
  for (const auto &s : problem.species)
    sum += s.concentration * std::exp(-s.valence * t);
  return problem.scale() * sum;
}

double eval_B_remainder(const PBEProblem &problem, RegionTag region, double t,
                        double s) {
  if (region != RegionTag::Ions)
    return 0.0;
  guard_exponent(problem, t);
  guard_exponent(problem, t + s);
  double sum = 0.0;
  for (const auto &sp : problem.species)
    sum += sp.concentration * std::exp(-sp.valence * t) *
           expm1_minus_x(-sp.valence * s);
  return problem.scale() * sum;
}

LinearizedCoefficients linearized_coefficients(const PBEProblem &problem,
                                               RegionTag region) {
  if (region != RegionTag::Ions)
    return {};
  LinearizedCoefficients c;
  for (const auto &s : problem.species) {
    c.m_bar_sq += s.concentration * s.valence * s.valence;
    c.ell += s.concentration * s.valence;
  }
  c.m_bar_sq *= problem.scale();
  c.ell *= problem.scale();
  return c;
}

double kappa_sq_from_ionic_strength(const PhysicalConstants &constants,
                                    double ionic_strength, double temperature) {
  const double e0 = constants.elementary_charge;
  return 8.0 * std::numbers::pi * constants.avogadro * e0 * e0 *
         ionic_strength / (1000.0 * constants.boltzmann * temperature);
}

double charge_neutrality_defect(const std::vector<IonSpecies> &species) {
  double sum = 0.0;
  for (const auto &s : species)
    sum += s.concentration * s.valence;
  return sum;
}

double molar_to_number_density(const PhysicalConstants &constants,
                               double molar) {
  return molar * constants.avogadro / 1000.0;
}

} // namespace pbe
