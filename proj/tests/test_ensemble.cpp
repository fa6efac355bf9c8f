#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jjage/ensemble.hpp"
#include "jjage/errors.hpp"
#include "jjage/fit.hpp"
#include "jjage/presets.hpp"

using namespace jjage;

namespace {

constexpr double kDay = kSecondsPerDay;

ChipSpec flat_spec(int n = 8) {
  ChipSpec s;
  s.chip_id = "flat";
  s.n_junctions = n;
  s.r0_cv = 0.0;
  s.noise_sigma = 0.0;
  return s;
}

std::vector<double> daily(int days) {
  std::vector<double> t;
  for (int d = 0; d <= days; ++d) t.push_back(d * kDay);
  return t;
}

MeasurementRecord rec(int id, double t, double r, RecordFlag f = RecordFlag::Ok) {
  return {"c", id, t, r, "ambient", f};
}

}  // namespace

TEST(DrawChip, ZeroSpreadGivesTheMeans) {
  const auto chip = draw_chip(flat_spec(), 1);
  for (const auto& j : chip.junctions) {
    EXPECT_EQ(j.params.r0_ohm, 22.8e3);
    EXPECT_EQ(j.params.a, 0.21);
    EXPECT_EQ(j.params.b, 1.0);
    EXPECT_DOUBLE_EQ(j.params.tau_s, 1.2e4);
    EXPECT_EQ(j.tau_scale, 1.0);
    EXPECT_FALSE(j.open);
  }
}

TEST(DrawChip, Chip6SpreadOfR0) {
  auto spec = preset("chip6").spec;
  spec.n_junctions = 1000;
  const auto chip = draw_chip(spec, 77);
  std::vector<double> r0;
  int open = 0;
  for (const auto& j : chip.junctions) {
    r0.push_back(j.params.r0_ohm);
    open += j.open;
  }
  EXPECT_NEAR(coefficient_of_variation(std::span<const double>(r0)), 0.121, 0.03);
  EXPECT_NEAR(open / 1000.0, spec.open_prob, 0.05);
}

TEST(DrawChip, SeedDeterminism) {
  const auto spec = preset("chip1").spec;
  const auto a = draw_chip(spec, 5), b = draw_chip(spec, 5), c = draw_chip(spec, 6);
  for (std::size_t i = 0; i < a.junctions.size(); ++i) {
    EXPECT_EQ(a.junctions[i].params.r0_ohm, b.junctions[i].params.r0_ohm);
    EXPECT_EQ(a.junctions[i].params.tau_s, b.junctions[i].params.tau_s);
  }
  EXPECT_NE(a.junctions[0].params.r0_ohm, c.junctions[0].params.r0_ohm);
}

TEST(DrawChip, SeedChangesRealizationNotMeans) {
  auto spec = preset("chip1").spec;
  spec.n_junctions = 2000;
  auto mean_a = [&](std::uint64_t seed) {
    const auto chip = draw_chip(spec, seed);
    double s = 0.0;
    for (const auto& j : chip.junctions) s += j.params.a;
    return s / spec.n_junctions;
  };
  EXPECT_NEAR(mean_a(1), spec.a_mean, 4.0 * spec.a_sd / std::sqrt(2000.0));
  EXPECT_NEAR(mean_a(2), spec.a_mean, 4.0 * spec.a_sd / std::sqrt(2000.0));
}

TEST(DrawChip, ValidationNamesTheField) {
  auto spec = flat_spec();
  spec.n_junctions = 0;
  try {
    draw_chip(spec, 1);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("n_junctions"), std::string::npos);
  }
  spec = flat_spec();
  spec.open_prob = 1.5;
  EXPECT_THROW(draw_chip(spec, 1), ValidationError);
}

TEST(SimulateChip, NoiselessHomogeneousMatchesClosedForm) {
  const auto spec = flat_spec();
  const auto ds = simulate_chip(draw_chip(spec, 1), StorageSchedule::constant(EnvironmentKind::Ambient), {},
                                daily(20), SimConfig::defaults(), 2);
  ASSERT_EQ(ds.records.size(), 8u * 21u);
  for (const auto& r : ds.records) {
    const double want = 22.8e3 * eval_single_log({0.21, 1.2e4, 1.0}, r.t_s);
    EXPECT_LT(std::abs(r.r_ohm - want) / want, 1e-12);
  }
  for (const auto& row : aggregate_series(ds)) EXPECT_LT(row.cv, 1e-14);
}

TEST(SimulateChip, Chip1MeanCurveFit) {
  const auto p = preset("chip1");
  const auto times = sample_times(56.0);
  const auto ds = simulate_chip(draw_chip(p.spec, 3), p.schedule, {}, times, p.cfg, 4);
  const auto fit = fit_chip(ds, FitOptions{});
  EXPECT_NEAR(fit.average.value("a"), 0.21, 0.03);
}

TEST(SimulateChip, OpenJunctionsAreFlagged) {
  auto spec = flat_spec(200);
  spec.open_prob = 0.3;
  const auto chip = draw_chip(spec, 8);
  const auto ds = simulate_chip(chip, StorageSchedule::constant(EnvironmentKind::Ambient), {}, daily(2),
                                SimConfig::defaults(), 9);
  for (const auto& j : chip.junctions) {
    for (const auto& r : ds.junction(j.junction_id)) {
      EXPECT_EQ(r.flag == RecordFlag::Open, j.open);
      if (j.open) {
        EXPECT_TRUE(std::isnan(r.r_ohm));
      }
    }
  }
}

TEST(SimulateChip, YieldToggleLeavesOtherJunctionsAlone) {
  auto spec = preset("chip1").spec;
  auto chip = draw_chip(spec, 12);
  const auto sched = StorageSchedule::constant(EnvironmentKind::Ambient);
  const auto a = simulate_chip(chip, sched, {}, daily(5), SimConfig::defaults(), 3);
  chip.junctions[4].open = true;
  const auto b = simulate_chip(chip, sched, {}, daily(5), SimConfig::defaults(), 3);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].junction_id == 4) continue;
    EXPECT_EQ(a.records[i].r_ohm, b.records[i].r_ohm);
  }
}

TEST(CoefficientOfVariation, HandValues) {
  const std::vector<double> constant = {3.0, 3.0, 3.0};
  EXPECT_EQ(coefficient_of_variation(std::span<const double>(constant)), 0.0);
  const std::vector<double> pair = {9.0, 11.0};
  EXPECT_NEAR(coefficient_of_variation(std::span<const double>(pair)), 0.141421356237309505, 1e-15);
  const std::vector<MeasurementRecord> with_open = {rec(0, 0, 9.0), rec(1, 0, 11.0), rec(2, 0, 5e6, RecordFlag::Open)};
  EXPECT_EQ(coefficient_of_variation(std::span<const MeasurementRecord>(with_open)),
            coefficient_of_variation(std::span<const double>(pair)));
  const std::vector<double> one = {4.0};
  EXPECT_THROW(coefficient_of_variation(std::span<const double>(one)), InsufficientDataError);
}

TEST(Aggregate, SingleJunctionHasUndefinedCv) {
  ChipDataset ds;
  for (int d = 0; d < 4; ++d) ds.records.push_back(rec(0, d * kDay, 100.0 + d));
  const auto rows = aggregate_series(ds);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].n_used, 1);
    EXPECT_FALSE(rows[i].cv_defined());
    EXPECT_EQ(rows[i].mean_r_ohm, 100.0 + static_cast<double>(i));
  }
}

TEST(Aggregate, IdenticalJunctionsHaveZeroCv) {
  ChipDataset ds;
  for (int d = 0; d < 4; ++d) {
    ds.records.push_back(rec(0, d * kDay, 50.0 * (1 + d)));
    ds.records.push_back(rec(1, d * kDay + 30.0, 50.0 * (1 + d)));
  }
  for (const auto& row : aggregate_series(ds)) {
    EXPECT_EQ(row.n_used, 2);
    EXPECT_EQ(row.cv, 0.0);
  }
}

TEST(Aggregate, PermutationInvariantAndOpenExcluded) {
  const auto p = preset("chip1");
  auto ds = simulate_chip(draw_chip(p.spec, 1), p.schedule, {}, daily(10), p.cfg, 2);
  const auto base = aggregate_series(ds);

  auto shuffled = ds;
  std::reverse(shuffled.records.begin(), shuffled.records.end());
  for (auto& r : shuffled.records) r.junction_id = 15 - r.junction_id;
  const auto perm = aggregate_series(shuffled);
  ASSERT_EQ(base.size(), perm.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(base[i].mean_r_ohm, perm[i].mean_r_ohm);
    EXPECT_EQ(base[i].cv, perm[i].cv);
    EXPECT_EQ(base[i].t_s, perm[i].t_s);
  }

  for (auto& r : ds.records) {
    if (r.junction_id == 3) r.flag = RecordFlag::Open;
  }
  const auto fewer = aggregate_series(ds);
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_LE(fewer[i].n_used, base[i].n_used);
}

TEST(Aggregate, CvRisesForHeterogeneousAmbientChip) {
  const auto p = preset("chip1");
  std::vector<double> first, last;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto ds = simulate_chip(draw_chip(p.spec, seed), p.schedule, {}, {0.0, 56 * kDay}, p.cfg, seed + 1000);
    const auto rows = aggregate_series(ds);
    first.push_back(rows.front().cv);
    last.push_back(rows.back().cv);
  }
  std::sort(first.begin(), first.end());
  std::sort(last.begin(), last.end());
  EXPECT_NEAR(first[20], 0.05, 0.02);
  EXPECT_NEAR(last[20], 0.07, 0.02);
  EXPECT_GT(last[20], first[20]);
}
