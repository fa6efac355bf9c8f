#include "jjage/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <map>
#include <optional>

#include "jjage/core_model.hpp"
#include "jjage/data_io.hpp"
#include "jjage/ensemble.hpp"
#include "jjage/errors.hpp"
#include "jjage/fit.hpp"
#include "jjage/presets.hpp"
#include "jjage/trajectory.hpp"

namespace jjage::cli {

using nlohmann::json;

namespace {

constexpr double kDay = kSecondsPerDay;

// Options shared by the scenario-driven subcommands.
struct ScenarioArgs {
  std::string preset;
  std::string spec_path;
  std::string schedule_path;
  std::string events_path;
};

struct Scenario {
  ChipScenario chip;
  StorageSchedule schedule;
  std::vector<AnnealEvent> events;
  double duration_days = 56.0;
  std::optional<AgingParams> reference;
  std::vector<InputDigest> inputs;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("--preset", a.preset, "Built-in scenario: chip1 .. chip6");
  cmd->add_option("--spec", a.spec_path, "Chip spec JSON layered on the preset");
  cmd->add_option("--schedule", a.schedule_path, "Storage schedule file (may hold event lines)");
  cmd->add_option("--events", a.events_path, "Event file; replaces the preset and schedule events");
}

Scenario load_scenario(const ScenarioArgs& a) {
  Scenario s;
  if (a.preset.empty() && a.spec_path.empty()) throw ValidationError("one of --preset or --spec is required");
  if (!a.preset.empty()) {
    auto p = preset(a.preset);
    s.chip = {p.spec, p.cfg};
    s.schedule = p.schedule;
    s.events = p.events;
    s.duration_days = p.duration_days;
    s.reference = p.reference;
  } else {
    s.chip = {ChipSpec{}, SimConfig::defaults()};
    s.schedule = StorageSchedule::constant(EnvironmentKind::Ambient);
  }
  if (!a.spec_path.empty()) {
    s.chip = load_chip_spec(a.spec_path, s.chip);
    s.inputs.push_back({a.spec_path, file_sha256(a.spec_path)});
  }
  if (!a.schedule_path.empty()) {
    auto file = load_schedule(a.schedule_path);
    if (!file.schedule.segments.empty()) s.schedule = file.schedule;
    if (!file.events.empty()) s.events = file.events;
    s.inputs.push_back({a.schedule_path, file_sha256(a.schedule_path)});
  }
  if (!a.events_path.empty()) {
    auto file = load_schedule(a.events_path);
    if (!file.schedule.segments.empty()) throw ValidationError(a.events_path + ": event files hold event lines only");
    s.events = file.events;
    s.inputs.push_back({a.events_path, file_sha256(a.events_path)});
  }
  s.chip.spec.validate();
  s.chip.cfg.validate();
  s.schedule.validate();
  for (const auto& ev : s.events) ev.validate();
  return s;
}

json spec_json(const ChipSpec& s) {
  return {{"chip_id", s.chip_id},   {"n_junctions", s.n_junctions}, {"r0_mean_ohm", s.r0_mean_ohm},
          {"r0_cv", s.r0_cv},       {"a_mean", s.a_mean},           {"a_sd", s.a_sd},
          {"log_tau_mean", s.log_tau_mean}, {"log_tau_sd", s.log_tau_sd}, {"b_mean", s.b_mean},
          {"b_sd", s.b_sd},         {"open_prob", s.open_prob},     {"noise_sigma", s.noise_sigma}};
}

json config_json(const SimConfig& c) {
  json taus = json::object();
  for (const auto& [kind, tau] : c.env_tau_s) taus[std::string(environment_name(kind))] = tau;
  json thermal = json::array();
  for (const auto& t : c.thermal_response) {
    thermal.push_back({{"temp_c", t.temp_C}, {"environment", environment_name(t.env)}, {"fraction", t.fraction}});
  }
  return {{"fab_a", c.fab_a},
          {"fab_b", c.fab_b},
          {"env_tau_s", taus},
          {"relax_s", {c.relax.gas_gas_s, c.relax.vacuum_to_gas_s, c.relax.gas_to_vacuum_s}},
          {"thermal_response", thermal},
          {"voltage_response",
           {c.voltage_response.mean, c.voltage_response.sd, c.voltage_response.post_a, c.voltage_response.post_tau_s}},
          {"floor_at_r0", c.floor_at_r0},
          {"integration_dt_s", c.integration_dt_s},
          {"session_exposure_s", c.session_exposure_s},
          {"measurement_exposure_s", c.measurement_exposure_s}};
}

std::string digest_of(const json& j) { return sha256_hex(j.dump()); }

json scenario_config(const std::string& command, const Scenario& s, std::uint64_t seed, double days) {
  return {{"command", command},
          {"spec", spec_json(s.chip.spec)},
          {"sim", config_json(s.chip.cfg)},
          {"schedule", format_schedule({s.schedule, s.events})},
          {"seed", seed},
          {"days", days}};
}

void emit(std::ostream& out, const json& summary, const std::string& summary_path) {
  const std::string text = summary.dump(2) + "\n";
  if (!summary_path.empty()) write_text_file(summary_path, text);
  out << text;
}

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::vector<PlotPoint> dataset_plot(const ChipDataset& ds, const std::vector<AggregateRow>& rows) {
  std::vector<PlotPoint> pts;
  for (const auto& r : ds.records) {
    if (r.usable()) pts.push_back({"j" + std::to_string(r.junction_id), r.t_s / kDay, r.r_ohm});
  }
  for (const auto& row : rows) pts.push_back({"mean", row.t_s / kDay, row.mean_r_ohm});
  for (const auto& row : rows) {
    if (row.cv_defined()) pts.push_back({"cv", row.t_s / kDay, row.cv});
  }
  return pts;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  ScenarioArgs scenario;
  std::uint64_t seed = 0;
  double days = 0.0;
  std::string out_path;
  std::string summary_path;
  std::string plot_path;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  Scenario s = load_scenario(a.scenario);
  const double days = a.days > 0.0 ? a.days : s.duration_days;
  const auto times = sample_times(days, s.events);
  const DrawnChip chip = draw_chip(s.chip.spec, a.seed);
  const ChipDataset ds = simulate_chip(chip, s.schedule, s.events, times, s.chip.cfg, a.seed ^ 0x9e3779b97f4a7c15ULL);
  write_measurements(ds, a.out_path);

  json summary;
  summary["command"] = "simulate";
  summary["chip_id"] = s.chip.spec.chip_id;
  summary["n_junctions"] = s.chip.spec.n_junctions;
  summary["n_records"] = ds.records.size();
  summary["days"] = days;
  summary["seed"] = a.seed;
  summary["config_digest"] = digest_of(scenario_config("simulate", s, a.seed, days));
  std::vector<AggregateRow> rows;
  try {
    rows = aggregate_series(ds);
  } catch (const InsufficientDataError&) {
    // every junction open
  }
  if (!rows.empty()) {
    summary["final_t_days"] = rows.back().t_s / kDay;
    summary["final_mean_r_ohm"] = rows.back().mean_r_ohm;
    summary["final_mean_ratio"] = rows.back().mean_r_ohm / rows.front().mean_r_ohm;
    summary["final_mean_over_r0"] = rows.back().mean_r_ohm / s.chip.spec.r0_mean_ohm;
    summary["initial_cv"] = number_or_null(rows.front().cv);
    summary["final_cv"] = number_or_null(rows.back().cv);
  }
  if (!a.plot_path.empty()) export_plot_data(dataset_plot(ds, rows), a.plot_path);
  emit(out, summary, a.summary_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string in_path;
  std::string model = "single-log";
  std::string out_path;
  std::string plot_path;
  bool shared_b = false;
  int bins = 8;
  double open_threshold = 1.0e6;
  int max_iterations = 200;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  const auto model = parse_model(a.model);
  if (!model) throw ValidationError("--model must be single-log or two-log");
  if (a.bins < 1) throw ValidationError("--bins must be >= 1");
  LoadOptions lo;
  lo.open_threshold_ohm = a.open_threshold;
  const ChipDataset ds = load_measurements(a.in_path, lo);
  FitOptions opts;
  opts.model = *model;
  opts.max_iterations = a.max_iterations;
  ChipFitOptions copts;
  copts.shared_b = a.shared_b;
  const ChipFit fit = fit_chip(ds, opts, copts);

  FitReport report = make_report(ds, fit, a.bins);
  report.provenance.inputs.push_back({a.in_path, file_sha256(a.in_path)});
  report.provenance.tool_version = kToolVersion;
  const json cfg = {{"command", "fit"},
                    {"model", a.model},
                    {"shared_b", a.shared_b},
                    {"bins", a.bins},
                    {"open_threshold_ohm", a.open_threshold},
                    {"max_iterations", a.max_iterations}};
  report.provenance.config_digest = digest_of(cfg);
  write_report(report, a.out_path);

  if (!a.plot_path.empty()) {
    auto pts = dataset_plot(ds, fit.aggregates);
    for (const auto& row : fit.aggregates) {
      pts.push_back({"mean_ratio", row.t_s / kDay, row.mean_r_ohm / fit.average_r0_ohm});
      pts.push_back({"fit", row.t_s / kDay, model_value(fit.average.model, fit.average.theta, row.t_s)});
    }
    export_plot_data(pts, a.plot_path);
  }

  bool all_converged = fit.average.converged;
  int n_failed = 0;
  for (const auto& jf : fit.junctions) {
    if (jf.result && !jf.result->converged) {
      all_converged = false;
      ++n_failed;
    }
  }
  json summary;
  summary["command"] = "fit";
  summary["chip_id"] = report.chip.chip_id;
  summary["model"] = a.model;
  summary["average"] = json::parse(format_report(report))["average"];
  summary["n_junction_fits"] = fit.junctions.size();
  summary["n_not_converged"] = n_failed;
  summary["config_digest"] = report.provenance.config_digest;
  summary["report"] = a.out_path;
  emit(out, summary, "");
  return all_converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  ScenarioArgs scenario;
  std::string report_path;
  double target_days = std::numeric_limits<double>::quiet_NaN();
  double from_days = std::numeric_limits<double>::quiet_NaN();
  double delta_uev = 180.0;
  std::string env = "";
  std::optional<double> a, tau, b, r_last;
  std::string fit_env;
  std::string out_path;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  if (!std::isfinite(a.target_days)) throw ValidationError("--target-days is required");
  if (!(a.delta_uev > 0.0)) throw ValidationError("--delta-uev must be > 0");

  AgingParams params;
  double t_last = 0.0, r_last = 0.0;
  EnvironmentKind fit_env = EnvironmentKind::Ambient;
  SimConfig cfg = SimConfig::defaults();
  std::vector<InputDigest> inputs;
  std::optional<StorageSchedule> forward;

  // --schedule is the forward schedule here, not part of the scenario.
  ScenarioArgs scen = a.scenario;
  scen.schedule_path.clear();
  const bool have_scenario = !scen.preset.empty() || !scen.spec_path.empty();
  if (!a.report_path.empty()) {
    const FitReport rep = read_report(a.report_path);
    inputs.push_back({a.report_path, file_sha256(a.report_path)});
    if (rep.average.model != "single-log") throw ValidationError("predict needs a single-log average fit in the report");
    params = {rep.average.params.at("a"), rep.average.params.at("tau"), rep.average.params.at("b"),
              rep.average_r0_ohm};
    t_last = rep.chip.t_last_s;
    r_last = rep.chip.last_mean_r_ohm;
    if (const auto k = parse_environment(rep.chip.last_environment)) fit_env = *k;
    if (have_scenario) cfg = load_scenario(scen).chip.cfg;
  } else if (have_scenario) {
    Scenario s = load_scenario(scen);
    inputs = s.inputs;
    cfg = s.chip.cfg;
    if (s.reference) {
      params = *s.reference;
    } else {
      params = {cfg.fab_a, cfg.tau_for(s.schedule.segments.front().env.kind), cfg.fab_b, s.chip.spec.r0_mean_ohm};
    }
    fit_env = s.schedule.segments.front().env.kind;
    t_last = (std::isfinite(a.from_days) ? a.from_days : s.duration_days) * kDay;
    r_last = params.r0_ohm * eval_single_log(params, t_last);
  } else if (a.a && a.tau && a.b && a.r_last) {
    params = {*a.a, *a.tau, *a.b, 1.0};
    t_last = (std::isfinite(a.from_days) ? a.from_days : 0.0) * kDay;
    r_last = *a.r_last;
  } else {
    throw ValidationError("predict needs --report, --preset/--spec, or all of --a --tau --b --r-last");
  }
  if (a.a) params.a = *a.a;
  if (a.tau) params.tau_s = *a.tau;
  if (a.b) params.b = *a.b;
  if (a.r_last) r_last = *a.r_last;
  if (!a.fit_env.empty()) {
    const auto k = parse_environment(a.fit_env);
    if (!k) throw ValidationError("--fit-env: unknown environment '" + a.fit_env + "'");
    fit_env = *k;
  }
  validate(params);
  if (!(r_last > 0.0)) throw ValidationError("last resistance must be > 0");

  const double t_target = a.target_days * kDay;
  if (t_target < t_last) {
    throw ValidationError("--target-days is earlier than the last measurement (day " + format_double(t_last / kDay) + ")");
  }

  // Forward schedule, offset so its day 0 is the last measurement.
  StorageSchedule sched;
  sched.segments.push_back({0.0, Environment::of(fit_env)});
  if (!a.scenario.schedule_path.empty()) {
    if (!a.env.empty()) throw ValidationError("--env and --schedule are mutually exclusive");
    auto file = load_schedule(a.scenario.schedule_path);
    inputs.push_back({a.scenario.schedule_path, file_sha256(a.scenario.schedule_path)});
    for (const auto& seg : file.schedule.segments) {
      const double t = t_last + seg.start_t_s;
      if (t > sched.segments.back().start_t_s) {
        sched.segments.push_back({t, seg.env});
      } else {
        sched.segments.back().env = seg.env;
      }
    }
  } else if (!a.env.empty()) {
    const auto k = parse_environment(a.env);
    if (!k) throw ValidationError("--env: unknown environment '" + a.env + "'");
    if (t_last > 0.0) {
      sched.segments.push_back({t_last, Environment::of(*k)});
    } else {
      sched.segments.back().env = Environment::of(*k);
    }
  }

  // The fitted curve is the bound of the storage environment; other
  // environments keep their timescale ratios to it.
  const double scale = params.tau_s / cfg.tau_for(fit_env);
  cfg.fab_a = params.a;
  cfg.fab_b = params.b;
  for (auto& [kind, tau] : cfg.env_tau_s) tau *= scale;
  cfg.measurement_exposure_s = 0.0;
  const auto samples = simulate_trajectory(sched, {}, cfg, 1.0, {t_last, t_target});
  const double ratio = samples[1].r_ohm / samples[0].r_ohm;
  const double r_pred = r_last * ratio;

  PhysicalConstants pc;
  pc.gap_delta_J = a.delta_uev * 1.0e-6 * kElectronVoltJ;
  json summary;
  summary["command"] = "predict";
  summary["last_t_days"] = t_last / kDay;
  summary["target_t_days"] = a.target_days;
  summary["last_r_ohm"] = r_last;
  summary["predicted_r_ohm"] = r_pred;
  summary["fractional_change"] = ratio - 1.0;
  summary["critical_current_A"] = critical_current_from_resistance(r_pred, pc);
  summary["frequency_shift"] = qubit_frequency_shift(ratio - 1.0);
  summary["delta_uev"] = a.delta_uev;
  summary["params"] = {{"a", params.a}, {"tau", params.tau_s}, {"b", params.b}};
  json digests = json::array();
  for (const auto& in : inputs) digests.push_back({{"path", in.path}, {"sha256", in.sha256}});
  summary["inputs"] = digests;
  summary["config_digest"] = digest_of({{"command", "predict"},
                                        {"params", summary["params"]},
                                        {"sim", config_json(cfg)},
                                        {"schedule", format_schedule({sched, {}})},
                                        {"last", {t_last, r_last}},
                                        {"target_days", a.target_days},
                                        {"delta_uev", a.delta_uev}});
  emit(out, summary, a.out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// anneal

struct AnnealArgs {
  ScenarioArgs scenario;
  std::string in_path;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string summary_path;
};

int cmd_anneal(const AnnealArgs& a, std::ostream& out) {
  Scenario s = load_scenario(a.scenario);
  std::optional<ChipDataset> measured;
  if (!a.in_path.empty()) {
    measured = load_measurements(a.in_path);
    s.inputs.push_back({a.in_path, file_sha256(a.in_path)});
  }
  auto events = s.events;
  std::stable_sort(events.begin(), events.end(), [](const AnnealEvent& l, const AnnealEvent& r) { return l.t_s < r.t_s; });
  // Fail on missing table entries before simulating.
  for (const auto& ev : events) {
    if (const auto* th = std::get_if<ThermalAnneal>(&ev.kind)) s.chip.cfg.thermal_fraction(th->temp_C, th->env.kind);
  }

  const DrawnChip chip = draw_chip(s.chip.spec, a.seed);
  // One sample before each event and one right after it (the state at the end of the event's hold).
  std::vector<double> times = {0.0};
  for (const auto& ev : events) {
    times.push_back(ev.t_s);
    times.push_back(ev.t_s + 1.0);
  }
  std::sort(times.begin(), times.end());
  ChipSpec noiseless = s.chip.spec;
  noiseless.noise_sigma = 0.0;
  DrawnChip quiet = chip;
  quiet.spec = noiseless;
  const std::uint64_t sim_seed = a.seed ^ 0x9e3779b97f4a7c15ULL;
  const ChipDataset sim = simulate_chip(quiet, s.schedule, events, times, s.chip.cfg, sim_seed);

  // Per junction: simulated resistance at every sample time.
  std::map<int, std::vector<double>> traj;
  for (const auto& r : sim.records) traj[r.junction_id].push_back(r.r_ohm);

  std::map<int, double> meas_first, meas_last;
  double t_offset = 0.0;
  if (measured) {
    for (const auto& r : measured->records) {
      if (!r.usable()) continue;
      if (r.junction_id >= s.chip.spec.n_junctions) {
        throw ValidationError(a.in_path + ": junction " + std::to_string(r.junction_id) + " is not in the chip spec");
      }
      if (!meas_first.count(r.junction_id)) meas_first[r.junction_id] = r.r_ohm;
      meas_last[r.junction_id] = r.r_ohm;
      t_offset = std::max(t_offset, r.t_s);
    }
  }
  // Index of the sample just before event k is 1 + 2k, just after 2 + 2k.
  auto value = [&](int id, std::size_t idx) {
    const double v = traj.at(id)[idx];
    if (!measured) return v;
    const auto it = meas_last.find(id);
    if (it == meas_last.end()) return std::numeric_limits<double>::quiet_NaN();
    double mapped = it->second * v / traj.at(id)[1];
    if (s.chip.cfg.floor_at_r0) {
      bool thermal_seen = false;
      for (std::size_t k = 0; 2 + 2 * k <= idx && k < events.size(); ++k) {
        if (events[k].is_thermal() && events[k].targets_junction(id)) thermal_seen = true;
      }
      if (thermal_seen) mapped = std::max(mapped, meas_first.at(id));
    }
    return mapped;
  };
  auto r0_of = [&](int id) { return measured ? meas_first.count(id) ? meas_first.at(id) : 0.0 : traj.at(id)[0]; };

  ChipDataset result;
  if (measured) result = *measured;
  json steps = json::array();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& ev = events[k];
    double sum = 0.0;
    int n = 0;
    for (const auto& [id, values] : traj) {
      const double before = value(id, 1 + 2 * k), after = value(id, 2 + 2 * k);
      if (!std::isfinite(before) || !std::isfinite(after)) continue;
      min_ratio = std::min(min_ratio, after / r0_of(id));
      const double t_rec = measured ? t_offset + (ev.t_s - events.front().t_s) + 1.0 : ev.t_s + 1.0;
      result.records.push_back({s.chip.spec.chip_id, id, t_rec, after, std::string(environment_name(s.schedule.at(ev.t_s).kind)),
                                RecordFlag::Ok});
      if (!ev.targets_junction(id)) continue;
      sum += after / before - 1.0;
      ++n;
    }
    const double mean = n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
    json step = {{"step", k + 1}, {"t_days", ev.t_s / kDay}, {"n_junctions", n}, {"mean_fractional_change", number_or_null(mean)}};
    step["sign"] = !std::isfinite(mean) ? "" : mean > 0.0 ? "+" : mean < 0.0 ? "-" : "0";
    if (const auto* v = std::get_if<VoltageAnneal>(&ev.kind)) {
      step["kind"] = "voltage";
      step["n_pulses"] = v->n_pulses;
      step["amplitude_V"] = v->amplitude_V;
    } else {
      const auto& th = std::get<ThermalAnneal>(ev.kind);
      step["kind"] = "thermal";
      step["temp_C"] = th.temp_C;
      step["environment"] = environment_name(th.env.kind);
      step["hold_min"] = th.hold_min;
    }
    steps.push_back(std::move(step));
  }
  if (!measured) {
    for (const auto& r : sim.records) {
      if (r.t_s == 0.0) result.records.push_back(r);
    }
  }
  result.sort();
  if (!a.out_path.empty()) write_measurements(result, a.out_path);

  json summary;
  summary["command"] = "anneal";
  summary["chip_id"] = s.chip.spec.chip_id;
  summary["seed"] = a.seed;
  summary["steps"] = steps;
  summary["min_ratio_to_initial"] = number_or_null(min_ratio);
  json cfg = scenario_config("anneal", s, a.seed, 0.0);
  json digests = json::array();
  for (const auto& in : s.inputs) digests.push_back({{"path", in.path}, {"sha256", in.sha256}});
  cfg["inputs"] = digests;
  summary["config_digest"] = digest_of(cfg);
  emit(out, summary, a.summary_path);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Josephson junction aging and annealing toolkit", "jjage"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a chip and write its measurement CSV");
  add_scenario_options(c_sim, sim.scenario);
  c_sim->add_option("--seed", sim.seed, "Random seed")->required();
  c_sim->add_option("--days", sim.days, "Duration in days (default: scenario duration)");
  c_sim->add_option("--out", sim.out_path, "Output measurement CSV")->required();
  c_sim->add_option("--summary", sim.summary_path, "Also write the JSON summary here");
  c_sim->add_option("--plot-out", sim.plot_path, "Tidy plot-data CSV");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit the average and per-junction aging curves");
  c_fit->add_option("--in", fit.in_path, "Measurement CSV")->required();
  c_fit->add_option("--model", fit.model, "single-log or two-log");
  c_fit->add_option("--out", fit.out_path, "Report JSON")->required();
  c_fit->add_option("--plot-out", fit.plot_path, "Tidy plot-data CSV");
  c_fit->add_flag("--shared-b", fit.shared_b, "Fix b at the average-curve value for junction fits");
  c_fit->add_option("--bins", fit.bins, "Histogram bins");
  c_fit->add_option("--open-threshold", fit.open_threshold, "Readings above this many ohms are open");
  c_fit->add_option("--max-iterations", fit.max_iterations, "Iteration cap per fit");

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Predict resistance, critical current and frequency shift");
  add_scenario_options(c_pred, pred.scenario);
  c_pred->add_option("--report", pred.report_path, "Fit report JSON");
  c_pred->add_option("--target-days", pred.target_days, "Target time, days since liftoff")->required();
  c_pred->add_option("--from-days", pred.from_days, "Last measurement time when no report is given");
  c_pred->add_option("--delta-uev", pred.delta_uev, "Superconducting gap in micro-eV");
  c_pred->add_option("--env", pred.env, "Forward storage environment");
  c_pred->add_option("--fit-env", pred.fit_env, "Environment the fitted curve belongs to");
  c_pred->add_option("--a", pred.a, "Override a");
  c_pred->add_option("--tau", pred.tau, "Override tau in seconds");
  c_pred->add_option("--b", pred.b, "Override b");
  c_pred->add_option("--r-last", pred.r_last, "Override the last resistance in ohms");
  c_pred->add_option("--out", pred.out_path, "Also write the JSON summary here");

  AnnealArgs ann;
  auto* c_ann = app.add_subcommand("anneal", "Apply anneal events and report each step");
  add_scenario_options(c_ann, ann.scenario);
  c_ann->add_option("--in", ann.in_path, "Measured dataset; its last readings are the pre-anneal state");
  c_ann->add_option("--seed", ann.seed, "Random seed")->required();
  c_ann->add_option("--out", ann.out_path, "Post-anneal dataset CSV");
  c_ann->add_option("--summary", ann.summary_path, "Also write the JSON summary here");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_fit->parsed()) return cmd_fit(fit, out);
    if (c_pred->parsed()) return cmd_predict(pred, out);
    if (c_ann->parsed()) return cmd_anneal(ann, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace jjage::cli
