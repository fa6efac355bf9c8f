#include <gtest/gtest.h>

#include <cmath>

#include "jjage/core_model.hpp"
#include "jjage/errors.hpp"
#include "jjage/rng.hpp"

using namespace jjage;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

// Reference values below were computed with 30-digit arithmetic.

TEST(SingleLog, Chip1AtZero) {
  EXPECT_LT(rel(eval_single_log({0.21, 1.2e4, 1.01}, 0.0), 1.00208956947916529740), 1e-15);
}

TEST(SingleLog, UnitOffsetIsExactlyOneAtZero) {
  for (double a : {0.0, 0.05, 0.3, 2.0}) EXPECT_EQ(eval_single_log({a, 3.3e3, 1.0}, 0.0), 1.0);
}

TEST(SingleLog, Chip2AtFiftySixDays) {
  const double v = eval_single_log({0.15, 4.3e4, 1.06}, 56.0 * kSecondsPerDay);
  EXPECT_LT(rel(v, 1.70987734367868299784), 1e-14);
  EXPECT_NEAR(v * 24.3e3, 41.55e3, 10.0);
}

TEST(SingleLog, MonotoneInTime) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    AgingParams p{0.01 + 0.5 * rng.uniform(), std::exp(4.0 + 12.0 * rng.uniform()), 0.2 + 3.0 * rng.uniform()};
    double prev = eval_single_log(p, 0.0);
    for (double t = 1.0; t < 1e8; t *= 3.7) {
      const double v = eval_single_log(p, t);
      ASSERT_GT(v, prev);
      prev = v;
    }
  }
  AgingParams flat{0.0, 1e4, 1.3};
  EXPECT_EQ(eval_single_log(flat, 0.0), eval_single_log(flat, 1e7));
}

TEST(SingleLog, RejectsBadInput) {
  EXPECT_THROW(eval_single_log({0.1, 0.0, 1.0}, 1.0), DomainError);
  EXPECT_THROW(eval_single_log({0.1, 1e4, 0.0}, 1.0), DomainError);
  EXPECT_THROW(eval_single_log({0.1, 1e4, 1.0}, -1.0), DomainError);
  EXPECT_THROW(eval_single_log({-0.1, 1e4, 1.0}, 1.0), DomainError);
}

TEST(TwoLog, ZeroAtOrigin) {
  EXPECT_EQ(eval_two_log({0.1, 3.9e4, 0.11, 1.2e4}, 0.0), 1.0);
}

TEST(TwoLog, ReferenceValue) {
  EXPECT_LT(rel(eval_two_log({0.10, 3.9e4, 0.11, 1.2e4}, 1e6), 1.81607072650349325632), 1e-14);
}

TEST(TwoLog, DegeneratesToSingleLog) {
  for (double t : {0.0, 10.0, 1e3, 2e5, 4.8e6}) {
    EXPECT_NEAR(eval_two_log({0.21, 1.2e4, 0.0, 5e3}, t), eval_single_log({0.21, 1.2e4, 1.0}, t), 1e-14);
    EXPECT_NEAR(eval_two_log({0.0, 5e3, 0.21, 1.2e4}, t), eval_single_log({0.21, 1.2e4, 1.0}, t), 1e-14);
  }
}

TEST(EffectiveTau, ReferenceAndLimits) {
  EXPECT_LT(rel(effective_tau({0.10, 3.9e4, 0.11, 1.2e4}), 21034.6469666199576), 1e-13);
  EXPECT_DOUBLE_EQ(effective_tau({0.2, 7e3, 0.2, 7e3}), 7e3);
  EXPECT_EQ(effective_tau({0.0, 7e3, 0.3, 2.5e4}), 2.5e4);
  EXPECT_THROW(effective_tau({0.0, 7e3, 0.0, 2.5e4}), DomainError);
}

TEST(EffectiveTau, BetweenChannelTimescales) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    TwoLogParams p{rng.uniform(), std::exp(2.0 + 15.0 * rng.uniform()), rng.uniform() + 1e-6,
                   std::exp(2.0 + 15.0 * rng.uniform())};
    const double t = effective_tau(p);
    EXPECT_GE(t, std::min(p.tau_int_s, p.tau_ext_s) * (1 - 1e-12));
    EXPECT_LE(t, std::max(p.tau_int_s, p.tau_ext_s) * (1 + 1e-12));
  }
}

TEST(Barrier, KappaReference) {
  PhysicalConstants c;
  BarrierParams b{1e-9, 2.0 * kElectronVoltJ, kElectronMassKg};
  EXPECT_LT(rel(barrier_kappa(b, c), 7245252568.80885), 1e-12);
}

TEST(Barrier, KappaScalesAsSquareRoot) {
  PhysicalConstants c;
  BarrierParams b{1e-9, 1.3 * kElectronVoltJ, 0.4 * kElectronMassKg};
  const double k = barrier_kappa(b, c);
  auto u4 = b;
  u4.height_U_J *= 4.0;
  auto m4 = b;
  m4.mass_m_kg *= 4.0;
  EXPECT_NEAR(barrier_kappa(u4, c) / k, 2.0, 1e-14);
  EXPECT_NEAR(barrier_kappa(m4, c) / k, 2.0, 1e-14);
}

TEST(Barrier, RatioIdentityInversionAndComposition) {
  PhysicalConstants c;
  BarrierParams b1{1.2e-9, 1.5 * kElectronVoltJ, kElectronMassKg};
  EXPECT_EQ(resistance_ratio_from_barrier(b1, b1, c), 1.0);

  const double kappa = barrier_kappa(b1, c);
  auto b2 = b1;
  b2.thickness_d_m = b1.thickness_d_m + std::log(2.0) / (2.0 * kappa);
  EXPECT_NEAR(resistance_ratio_from_barrier(b1, b2, c), 2.0, 1e-12);

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    auto draw = [&] {
      return BarrierParams{0.8e-9 + 0.8e-9 * rng.uniform(), (0.5 + 2.0 * rng.uniform()) * kElectronVoltJ,
                           (0.2 + rng.uniform()) * kElectronMassKg};
    };
    const auto x = draw(), y = draw(), z = draw();
    const double direct = resistance_ratio_from_barrier(x, z, c);
    const double chained = resistance_ratio_from_barrier(x, y, c) * resistance_ratio_from_barrier(y, z, c);
    EXPECT_LT(rel(chained, direct), 1e-9);
  }
}

TEST(Barrier, SubAngstromSensitivity) {
  // kappa = 1e10 / m and 0.3 A thicker: exp(2 * 1e10 * 3e-11) = exp(0.6).
  PhysicalConstants c;
  const double m = kElectronMassKg;
  const double u = std::pow(1e10 * c.hbar_Js, 2) / (2.0 * m);
  BarrierParams b1{1.0e-9, u, m};
  BarrierParams b2{1.03e-9, u, m};
  EXPECT_LT(rel(resistance_ratio_from_barrier(b1, b2, c), 1.82211880039050897), 1e-9);
}

TEST(CriticalCurrent, ReferenceAndProportionality) {
  PhysicalConstants c;
  EXPECT_LT(rel(critical_current_from_resistance(8e3, c), 3.53429173528852e-8), 1e-13);
  const double product = critical_current_from_resistance(8e3, c) * 8e3;
  for (double r : {1.0, 73.0, 5e3, 2.28e4, 1e7}) {
    EXPECT_LT(rel(critical_current_from_resistance(r, c) * r, product), 1e-14);
  }
  EXPECT_NEAR(critical_current_from_resistance(16e3, c), critical_current_from_resistance(8e3, c) / 2.0, 1e-22);
  EXPECT_THROW(critical_current_from_resistance(0.0, c), DomainError);
}

TEST(FrequencyShift, Values) {
  EXPECT_EQ(qubit_frequency_shift(0.0), 0.0);
  EXPECT_LT(rel(qubit_frequency_shift(0.21), -0.0909090909090909), 1e-14);
  EXPECT_EQ(qubit_frequency_shift(3.0), -0.5);
  EXPECT_THROW(qubit_frequency_shift(-1.0), DomainError);
}

TEST(Environment, NamesRoundTrip) {
  for (auto k : {EnvironmentKind::Ambient, EnvironmentKind::NitrogenGlovebox, EnvironmentKind::HighVacuum}) {
    EXPECT_EQ(parse_environment(environment_name(k)), k);
    EXPECT_EQ(Environment::of(k).kind, k);
  }
  EXPECT_EQ(parse_environment("n2"), EnvironmentKind::NitrogenGlovebox);
  EXPECT_EQ(parse_environment("atmosphere"), EnvironmentKind::Ambient);
  EXPECT_FALSE(parse_environment("mars"));
}

TEST(Purity, BitIdenticalRepeats) {
  const AgingParams p{0.21, 1.2e4, 1.01};
  const TwoLogParams q{0.10, 3.9e4, 0.11, 1.2e4};
  for (double t : {0.0, 1.0, 1e4, 3e6}) {
    EXPECT_EQ(eval_single_log(p, t), eval_single_log(p, t));
    EXPECT_EQ(eval_two_log(q, t), eval_two_log(q, t));
  }
}
