#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "pbe/error.hpp"
#include "pbe/model.hpp"

using namespace pbe;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

PBEProblem symmetric(double M) {
  PBEProblem p;
  p.species = {{M, 1}, {M, -1}};
  return p;
}

PBEProblem three_species() {
  PBEProblem p;
  p.species = {{0.3, 1}, {0.2, -2}, {0.05, 3}};
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST(Constants, TableDefaults) {
  PhysicalConstants c;
  EXPECT_EQ(c.avogadro, 6.022140857e23);
  EXPECT_EQ(c.elementary_charge, 4.8032424e-10);
  EXPECT_EQ(c.boltzmann, 1.38064852e-16);
}

TEST(Problem, SyntheticScaleIsOne) {
  PBEProblem p;
  EXPECT_EQ(p.scale(), 1.0);
  EXPECT_EQ(p.coulomb_scale(), 1.0);
}

TEST(Problem, PhysicalScale) {
  PBEProblem p;
  p.unit_mode = UnitMode::Physical;
  const auto &c = p.constants;
  const double expect = 4.0 * M_PI * c.elementary_charge * c.elementary_charge /
                        (c.boltzmann * p.temperature);
  EXPECT_LT(rel(p.scale(), expect), 1e-14);
  EXPECT_LT(rel(p.coulomb_scale(), c.elementary_charge * c.elementary_charge /
                                       (p.eps_m * c.boltzmann * p.temperature)),
            1e-14);
}

TEST(EvalB, SymmetricReducesToSinh) {
  const double M = 0.37;
  const auto p = symmetric(M);
  for (double t : {-3.0, -0.5, 0.0, 1e-3, 0.8, 4.0})
    EXPECT_LE(rel(eval_b(p, RegionTag::Ions, t), 2.0 * M * std::sinh(t)) , 1e-12) << t;
}

TEST(EvalB, VanishesOutsideIons) {
  const auto p = three_species();
  for (double t : {-5.0, 0.0, 2.0}) {
    EXPECT_EQ(eval_b(p, RegionTag::Molecule, t), 0.0);
    EXPECT_EQ(eval_b(p, RegionTag::IEL, t), 0.0);
    EXPECT_EQ(eval_B(p, RegionTag::Molecule, t), 0.0);
    EXPECT_EQ(eval_B(p, RegionTag::IEL, t), 0.0);
  }
}

TEST(EvalB, NeutralAtZero) {
  EXPECT_EQ(eval_b(symmetric(2.0), RegionTag::Ions, 0.0), 0.0);
}

TEST(EvalB, ThreeSpeciesExtendedPrecision) {
  const auto p = three_species();
  const double t = 0.7;
  big s = 0;
  for (const auto &sp : p.species)
    s -= big(sp.concentration) * sp.valence * exp(-big(sp.valence) * big(t));
  EXPECT_LE(rel(eval_b(p, RegionTag::Ions, t), s.convert_to<double>()), 1e-14);
}

TEST(EvalB, OverflowGuardNamesSpecies) {
  PBEProblem p;
  p.species = {{1.0, 1}, {1.0, -3}};
  try {
    eval_b(p, RegionTag::Ions, 300.0);
    FAIL() << "expected DomainError";
  } catch (const DomainError &e) {
    EXPECT_NE(std::string(e.what()).find("species 1"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(eval_b(p, RegionTag::Molecule, 300.0));
}

TEST(EvalBPrime, SymmetricAtZero) {
  EXPECT_DOUBLE_EQ(eval_b_prime(symmetric(0.25), RegionTag::Ions, 0.0), 0.5);
  EXPECT_EQ(eval_b_prime(symmetric(0.25), RegionTag::IEL, 1.0), 0.0);
}

TEST(EvalBPrime, MatchesFiniteDifference) {
  const auto p = three_species();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double t = U(rng), h = 1e-5 * std::max(1.0, std::abs(t));
    const double fd = (eval_b(p, RegionTag::Ions, t + h) - eval_b(p, RegionTag::Ions, t - h)) / (2 * h);
    EXPECT_LE(rel(fd, eval_b_prime(p, RegionTag::Ions, t)), 1e-6) << t;
  }
}

TEST(EvalBAntiderivative, MatchesFiniteDifference) {
  const auto p = three_species();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double t = U(rng), h = 1e-5 * std::max(1.0, std::abs(t));
    const double fd = (eval_B(p, RegionTag::Ions, t + h) - eval_B(p, RegionTag::Ions, t - h)) / (2 * h);
    EXPECT_LE(rel(fd, eval_b(p, RegionTag::Ions, t)), 1e-6) << t;
  }
  const double t = -1.3, h = 1e-5;
  EXPECT_LE(rel((eval_B(p, RegionTag::Ions, t + h) - eval_B(p, RegionTag::Ions, t - h)) / (2 * h),
                eval_b(p, RegionTag::Ions, t)),
            1e-6);
}

TEST(EvalBAntiderivative, SymmetricReducesToCosh) {
  const auto p = symmetric(0.6);
  for (double t : {-2.0, 0.0, 3.5})
    EXPECT_LE(rel(eval_B(p, RegionTag::Ions, t), 1.2 * std::cosh(t)), 1e-12);
}

TEST(EvalBRemainder, AgreesWithExtendedPrecision) {
  const auto p = three_species();
  for (double t : {-2.0, 0.1, 1.5})
    for (double s : {1e-9, 1e-5, 1e-2, 0.7, -1.1}) {
      big r = 0;
      for (const auto &sp : p.species) {
        const big xi = sp.valence, M = sp.concentration;
        r += M * (exp(-xi * (big(t) + big(s))) - exp(-xi * big(t)) + big(s) * xi * exp(-xi * big(t)));
      }
      const double want = r.convert_to<double>();
      EXPECT_LE(std::abs(eval_B_remainder(p, RegionTag::Ions, t, s) - want),
                1e-13 * std::abs(want) + 1e-300)
          << t << " " << s;
    }
}

TEST(Invariants, MonotoneAndNonnegative) {
  const auto p = three_species();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  std::uniform_int_distribution<int> R(0, 2);
  for (int i = 0; i < 10000; ++i) {
    const RegionTag tag = region_from_int(R(rng));
    const double t1 = U(rng), t2 = U(rng);
    EXPECT_GE((eval_b(p, tag, t1) - eval_b(p, tag, t2)) * (t1 - t2), 0.0);
    EXPECT_GE(eval_B(p, tag, t1), 0.0);
    EXPECT_GE(eval_b_prime(p, tag, t1), 0.0);
  }
}

TEST(Linearization, SymmetricElectrolyte) {
  const auto c = linearized_coefficients(symmetric(0.4), RegionTag::Ions);
  EXPECT_DOUBLE_EQ(c.m_bar_sq, 0.8);
  EXPECT_EQ(c.ell, 0.0);
  const auto m = linearized_coefficients(symmetric(0.4), RegionTag::Molecule);
  EXPECT_EQ(m.m_bar_sq, 0.0);
  EXPECT_EQ(m.ell, 0.0);
}

TEST(Linearization, CellModelHasNonzeroEll) {
  PBEProblem p;
  p.species = {{0.3, 1}};
  EXPECT_DOUBLE_EQ(linearized_coefficients(p, RegionTag::Ions).ell, 0.3);
}

TEST(Linearization, IsMaclaurinOfB) {
  const auto p = three_species();
  const auto c = linearized_coefficients(p, RegionTag::Ions);
  const double t = 1e-6;
  EXPECT_NEAR(eval_b(p, RegionTag::Ions, t), c.m_bar_sq * t - c.ell, 1e-11);
}

TEST(Kappa, ZeroIonicStrength) {
  EXPECT_EQ(kappa_sq_from_ionic_strength(PhysicalConstants{}, 0.0, 298.15), 0.0);
}

TEST(Kappa, ConsistentWithTwoScaleM) {
  PBEProblem p;
  p.unit_mode = UnitMode::Physical;
  const double Is = 0.15;
  const double M = Is * p.constants.avogadro / 1000.0;
  EXPECT_LE(rel(kappa_sq_from_ionic_strength(p.constants, Is, p.temperature), 2.0 * p.scale() * M),
            1e-12);
  EXPECT_DOUBLE_EQ(molar_to_number_density(p.constants, Is), M);
}

TEST(Kappa, ExtendedPrecisionArithmetic) {
  const PhysicalConstants c;
  const big pi = boost::math::constants::pi<big>();
  const big e0 = c.elementary_charge, NA = c.avogadro, kB = c.boltzmann;
  const big want = 8 * pi * NA * e0 * e0 * big("0.1") / (1000 * kB * big("298.15"));
  EXPECT_LE(rel(kappa_sq_from_ionic_strength(c, 0.1, 298.15), want.convert_to<double>()), 1e-14);
}

TEST(Neutrality, Defect) {
  EXPECT_EQ(charge_neutrality_defect(symmetric(1.0).species), 0.0);
  EXPECT_EQ(charge_neutrality_defect({{0.5, 2}}), 1.0);
  const auto p = three_species();
  EXPECT_DOUBLE_EQ(charge_neutrality_defect(p.species), 0.3 - 0.4 + 0.15);
}

TEST(Validation, RejectsBadInput) {
  PBEProblem p;
  p.species = {{1.0, 0}};
  EXPECT_THROW(p.validate(), Error);
  p.species = {{-1.0, 1}};
  EXPECT_THROW(p.validate(), Error);
  p = PBEProblem{};
  p.eps_m = 0.0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Regions, Names) {
  EXPECT_STREQ(to_string(RegionTag::IEL), "iel");
  EXPECT_EQ(region_from_int(2), RegionTag::Ions);
  EXPECT_THROW(region_from_int(3), Error);
}
