#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "jjage/cli.hpp"
#include "jjage/core_model.hpp"
#include "jjage/data_io.hpp"

using namespace jjage;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = JJAGE_TEST_DATA;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  json summary() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string tmp(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "jjage_cli_tests";
  fs::create_directories(dir);
  return (dir / name).string();
}

void write(const std::string& path, const std::string& text) { write_text_file(path, text); }

}  // namespace

TEST(CliSimulate, Chip1FiftySixDays) {
  // Spreads and noise switched off so the mean follows the closed form.
  const auto spec = tmp("flat_chip1.json");
  write(spec, R"({"chip": {"r0_cv": 0, "a_sd": 0, "log_tau_sd": 0, "b_sd": 0, "noise_sigma": 0}})");
  const auto r = run({"simulate", "--preset", "chip1", "--spec", spec, "--seed", "1", "--days", "56", "--out",
                      tmp("flat.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.summary()["final_mean_over_r0"].get<double>(), 2.26040625442713, 0.005 * 2.26040625442713);

  const auto noisy = run({"simulate", "--preset", "chip1", "--seed", "1", "--days", "56", "--out", tmp("c1.csv")});
  ASSERT_EQ(noisy.code, 0);
  EXPECT_NEAR(noisy.summary()["final_mean_over_r0"].get<double>(), 2.26, 0.15);
}

TEST(CliSimulate, ZeroJunctionsIsAnInputError) {
  const auto spec = tmp("zero.json");
  write(spec, R"({"chip": {"n_junctions": 0}})");
  const auto r = run({"simulate", "--spec", spec, "--seed", "1", "--out", tmp("zero.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("n_junctions"), std::string::npos);
}

TEST(CliSimulate, SeedIsRequiredAndDeterministic) {
  EXPECT_EQ(run({"simulate", "--preset", "chip2", "--out", tmp("noseed.csv")}).code, 2);
  const auto a = run({"simulate", "--preset", "chip2", "--seed", "9", "--out", tmp("a.csv")});
  const auto b = run({"simulate", "--preset", "chip2", "--seed", "9", "--out", tmp("b.csv")});
  const auto c = run({"simulate", "--preset", "chip2", "--seed", "10", "--out", tmp("c.csv")});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(read_text_file(tmp("a.csv")), read_text_file(tmp("b.csv")));
  EXPECT_NE(read_text_file(tmp("a.csv")), read_text_file(tmp("c.csv")));
  EXPECT_EQ(a.summary()["config_digest"], b.summary()["config_digest"]);
  EXPECT_NE(a.summary()["config_digest"], c.summary()["config_digest"]);
}

TEST(CliSimulate, GoldenChip2Csv) {
  const auto r = run({"simulate", "--preset", "chip2", "--seed", "2024", "--days", "56", "--out", tmp("g.csv")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_text_file(tmp("g.csv")), read_text_file(kData / "chip2_golden.csv"));
}

TEST(CliSimulate, UnknownPreset) {
  EXPECT_EQ(run({"simulate", "--preset", "chip9", "--seed", "1", "--out", tmp("x.csv")}).code, 2);
}

TEST(CliFit, GoldenChip2) {
  const auto report = tmp("chip2_report.json");
  const auto plot = tmp("chip2_plot.csv");
  const auto r = run({"fit", "--in", (kData / "chip2_golden.csv").string(), "--out", report, "--plot-out", plot});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = read_report(report);
  EXPECT_NEAR(rep.average.params.at("a"), 0.15, 0.02);
  EXPECT_EQ(rep.junctions.size(), 16u);
  EXPECT_EQ(rep.provenance.inputs.at(0).sha256, file_sha256(kData / "chip2_golden.csv"));
  EXPECT_EQ(rep.histograms.count("log_tau"), 1u);

  // Byte-level comparison after dropping the machine-specific input path.
  auto mine = rep;
  auto golden = read_report(kData / "chip2_report_golden.json");
  mine.provenance.inputs.at(0).path.clear();
  golden.provenance.inputs.at(0).path.clear();
  EXPECT_EQ(format_report(mine), format_report(golden));
}

TEST(CliFit, TooFewTimePoints) {
  const auto csv = tmp("short.csv");
  write(csv,
        "chip_id,junction_id,t_seconds,resistance_ohms,environment\n"
        "c,0,0,100,ambient\nc,0,3600,101,ambient\nc,0,7200,102,ambient\n");
  const auto r = run({"fit", "--in", csv, "--out", tmp("short.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("at least 4"), std::string::npos);
}

TEST(CliFit, ParseErrorsExitTwo) {
  const auto csv = tmp("broken.csv");
  write(csv, "chip_id,junction_id,t_seconds,resistance_ohms,environment\nc,zero,0,100,ambient\n");
  EXPECT_EQ(run({"fit", "--in", csv, "--out", tmp("broken.json")}).code, 2);
  EXPECT_EQ(run({"fit", "--in", tmp("missing.csv"), "--out", tmp("missing.json")}).code, 2);
}

TEST(CliFit, TwoLogCanonicalChannels) {
  const TwoLogParams truth{0.10, 3.9e4, 0.11, 1.2e4, 9e3};
  std::ostringstream csv;
  csv << "chip_id,junction_id,t_seconds,resistance_ohms,environment\n";
  for (int id = 0; id < 3; ++id) {
    csv << "c," << id << ",0," << format_double(truth.r0_ohm) << ",ambient\n";
    for (int i = 0; i < 60; ++i) {
      const double t = 1e4 * std::exp(std::log(5e3) * i / 59.0);
      csv << "c," << id << "," << format_double(t) << "," << format_double(truth.r0_ohm * eval_two_log(truth, t))
          << ",ambient\n";
    }
  }
  const auto in = tmp("twolog.csv");
  write(in, csv.str());
  const auto report = tmp("twolog.json");
  const auto r = run({"fit", "--in", in, "--model", "two-log", "--out", report});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = read_report(report);
  const auto& p = rep.average.params;
  EXPECT_GE(p.at("tau_int"), p.at("tau_ext"));
  EXPECT_NEAR(p.at("a_int"), 0.10, 1e-3);
  EXPECT_NEAR(p.at("a_ext"), 0.11, 1e-3);
  EXPECT_NEAR(p.at("tau_int"), 3.9e4, 3.9e1);
  EXPECT_NEAR(p.at("tau_ext"), 1.2e4, 1.2e1);
}

TEST(CliFit, NonConvergenceExitsThreeAndStillWrites) {
  const auto report = tmp("capped.json");
  fs::remove(report);
  const auto r =
      run({"fit", "--in", (kData / "chip2_golden.csv").string(), "--out", report, "--max-iterations", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(fs::exists(report));
}

TEST(CliPredict, FlatParametersKeepTheLastResistance) {
  const auto r = run({"predict", "--a", "0", "--tau", "1e4", "--b", "1", "--r-last", "9000", "--from-days", "10",
                      "--target-days", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(r.summary()["predicted_r_ohm"].get<double>(), 9000.0);
  EXPECT_EQ(r.summary()["frequency_shift"].get<double>(), 0.0);
}

TEST(CliPredict, Chip1SevenAmbientDays) {
  const auto r = run({"predict", "--preset", "chip1", "--from-days", "56", "--target-days", "63", "--env", "ambient"});
  ASSERT_EQ(r.code, 0) << r.err;
  const AgingParams p{0.21, 1.2e4, 1.01};
  const double want = eval_single_log(p, 63 * kSecondsPerDay) / eval_single_log(p, 56 * kSecondsPerDay) - 1.0;
  const auto s = r.summary();
  EXPECT_NEAR(s["fractional_change"].get<double>(), want, 1e-9);
  const double r_pred = s["predicted_r_ohm"].get<double>();
  PhysicalConstants pc;
  EXPECT_NEAR(s["critical_current_A"].get<double>(), critical_current_from_resistance(r_pred, pc), 1e-20);
  EXPECT_NEAR(s["frequency_shift"].get<double>(), qubit_frequency_shift(want), 1e-12);
}

TEST(CliPredict, AmbientAgesFasterThanGlovebox) {
  auto predict = [](const std::string& env) {
    const auto r = run({"predict", "--preset", "chip2", "--from-days", "30", "--target-days", "37", "--env", env});
    EXPECT_EQ(r.code, 0) << r.err;
    return r.summary()["predicted_r_ohm"].get<double>();
  };
  EXPECT_GT(predict("ambient"), predict("glovebox"));
}

TEST(CliPredict, ForwardScheduleFromReport) {
  const auto report = tmp("for_predict.json");
  ASSERT_EQ(run({"fit", "--in", (kData / "chip2_golden.csv").string(), "--out", report}).code, 0);
  const auto sched = tmp("forward.txt");
  write(sched, "0,glovebox\n2,ambient\n");
  const auto r = run({"predict", "--report", report, "--schedule", sched, "--target-days", "60", "--delta-uev", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(r.summary()["predicted_r_ohm"].get<double>(), r.summary()["last_r_ohm"].get<double>());
  EXPECT_EQ(r.summary()["inputs"].size(), 2u);
}

TEST(CliPredict, TargetBeforeLastMeasurement) {
  const auto r = run({"predict", "--preset", "chip1", "--from-days", "56", "--target-days", "50"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("earlier"), std::string::npos);
}

TEST(CliAnneal, ThermalSequenceSignsAndFloor) {
  for (const char* chip : {"chip3", "chip4"}) {
    const auto r = run({"anneal", "--preset", chip, "--seed", "5", "--out", tmp(std::string(chip) + "_ann.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = r.summary();
    ASSERT_EQ(s["steps"].size(), 5u);
    std::string signs;
    for (const auto& st : s["steps"]) signs += st["sign"].get<std::string>();
    EXPECT_EQ(signs, "--+-+") << chip;
    EXPECT_LT(s["steps"][4]["mean_fractional_change"].get<double>(),
              s["steps"][2]["mean_fractional_change"].get<double>());
    EXPECT_GE(s["min_ratio_to_initial"].get<double>(), 1.0);
  }
}

TEST(CliAnneal, EmptyEventListIsIdentity) {
  const auto events = tmp("no_events.txt");
  write(events, "# nothing scheduled\n");
  const auto out = tmp("identity.csv");
  const auto in = (kData / "measurements_small.csv").string();
  const auto r = run({"anneal", "--preset", "chip1", "--in", in, "--events", events, "--seed", "1", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.summary()["steps"].empty());
  EXPECT_EQ(read_text_file(out), format_measurements(load_measurements(in)));
}

TEST(CliAnneal, UnknownResponseEntry) {
  const auto events = tmp("hot.txt");
  write(events, "event,85,thermal,300,ambient,10\n");
  const auto r = run({"anneal", "--preset", "chip3", "--events", events, "--seed", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("300"), std::string::npos);
}

TEST(CliAnneal, VoltageStepOnMeasuredData) {
  const auto out = tmp("v_ann.csv");
  const auto r = run({"anneal", "--preset", "chip1", "--in", (kData / "chip2_golden.csv").string(), "--seed", "3",
                      "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto step = r.summary()["steps"][0];
  EXPECT_EQ(step["kind"], "voltage");
  EXPECT_EQ(step["n_junctions"], 8);
  EXPECT_NEAR(step["mean_fractional_change"].get<double>(), 0.142, 0.02);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"fit", "--in", "x.csv", "--out", "y.json", "--model", "cubic"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
