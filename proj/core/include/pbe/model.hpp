#pragma once

// Physical model of the General Poisson-Boltzmann equation: ion species,
// the dimensionless nonlinearity b(x, t), its antiderivative B and
// linearization coefficients, and the CGS constants that fix their scale.

#include <cstdint>
#include <string>
#include <vector>

#include "pbe/vec.hpp"

namespace pbe {

struct PhysicalConstants {
  double avogadro = 6.022140857e23;         // 1/mol
  double elementary_charge = 4.8032424e-10; // esu
  double boltzmann = 1.38064852e-16;        // erg/K

  friend bool operator==(const PhysicalConstants &,
                         const PhysicalConstants &) = default;
};

struct IonSpecies {
  double concentration = 0.0; // ions/cm^3 (physical) or raw (synthetic)
  int valence = 1;

  friend bool operator==(const IonSpecies &, const IonSpecies &) = default;
};

enum class RegionTag : std::uint8_t { Molecule = 0, IEL = 1, Ions = 2 };

const char *to_string(RegionTag tag);
RegionTag region_from_int(int value);

struct Charge {
  Vec3 position;
  double valence = 0.0;
  double radius = 0.0;
};

/// Fixed partial charges of the molecule.
struct ChargeSystem {
  int dimension = 2;
  std::vector<Charge> charges;

  /// Throws GeometryError unless dimension is 2 or 3, the list is nonempty,
  /// radii are nonnegative and positions pairwise distinct.
  void validate() const;
  double total_valence() const;
};

enum class UnitMode : std::uint8_t { Physical, Synthetic };

/// Solvent permittivity eps_s(x) = value + gradient . x (Lipschitz, > 0).
struct SolventPermittivity {
  double value = 80.0;
  Vec3 gradient{};

  double operator()(const Vec3 &x) const { return value + dot(gradient, x); }
  bool is_constant() const { return gradient == Vec3{}; }
};

/// Overflow guard for the exponentials in b, b' and B.
inline constexpr double kExponentLimit = 700.0;

struct PBEProblem {
  double eps_m = 2.0;
  SolventPermittivity eps_s{};
  double temperature = 298.15; // K
  std::vector<IonSpecies> species;
  PhysicalConstants constants{};
  UnitMode unit_mode = UnitMode::Synthetic;
  /// Model length unit in cm (physical mode only); 1 means lengths in cm.
  double length_unit = 1.0;

  /// 4 pi e0^2 / (kB T), times length_unit^2 so that b is per model area;
  /// exactly 1 in synthetic mode.
  double scale() const;
  /// e0^2 / (eps_m kB T) per model length, i.e. the prefactor of G; 1 in
  /// synthetic mode.
  double coulomb_scale() const;
  /// kB T in erg.
  double thermal_energy() const;

  void validate() const;
};

/// b(x, t) = -scale sum_j M_j xi_j exp(-xi_j t) on Ions, 0 elsewhere.
double eval_b(const PBEProblem &problem, RegionTag region, double t);
/// d/dt b(x, t) >= 0.
double eval_b_prime(const PBEProblem &problem, RegionTag region, double t);
/// B(x, t) = scale sum_j M_j exp(-xi_j t) >= 0, with dB/dt = b.
double eval_B(const PBEProblem &problem, RegionTag region, double t);

/// B(x, t + s) - B(x, t) - s b(x, t), computed without cancellation.
double eval_B_remainder(const PBEProblem &problem, RegionTag region, double t,
                        double s);

struct LinearizedCoefficients {
  double m_bar_sq = 0.0;
  double ell = 0.0;
};

/// Maclaurin coefficients of b: b(t) ~ m_bar_sq t - ell.
LinearizedCoefficients linearized_coefficients(const PBEProblem &problem,
                                               RegionTag region);

/// 8 pi N_A e0^2 I_s / (1000 kB T), I_s in mol/L.
double kappa_sq_from_ionic_strength(const PhysicalConstants &constants,
                                    double ionic_strength, double temperature);

/// sum_j M_j xi_j; zero iff the electrolyte is charge neutral.
double charge_neutrality_defect(const std::vector<IonSpecies> &species);

/// ions/cm^3 for a molar concentration (mol/L).
double molar_to_number_density(const PhysicalConstants &constants,
                               double molar);

} // namespace pbe
