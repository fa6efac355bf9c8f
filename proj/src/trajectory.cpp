#include "jjage/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jjage/errors.hpp"
#include "jjage/rng.hpp"

namespace jjage {

namespace {

bool is_gas(EnvironmentKind k) { return k != EnvironmentKind::HighVacuum; }

// Matches table temperatures that were written with a decimal point.
constexpr double kTempMatchC = 0.5;

void apply_floor(TrajectoryState& s) {
  if (!s.floor_armed) return;
  const double base = (1.0 + s.y) * s.drift_factor();
  const double floor_fraction = s.floor_ohm / s.r0_ohm;
  if (base * s.anneal_scale < floor_fraction) s.anneal_scale = floor_fraction / base;
}

void step(TrajectoryState& s, const SimConfig& cfg, double h) {
  const EnvironmentKind kind = s.env.kind;
  const double yb0 = bound_fraction(kind, cfg, s.virtual_age_s);
  const double yb1 = bound_fraction(kind, cfg, s.virtual_age_s + h);
  s.y = yb1 - (yb0 - s.y) * std::exp(-h / s.relax_time_s);
  s.t_s += h;
  s.virtual_age_s += h;
  apply_floor(s);
}

}  // namespace

StorageSchedule StorageSchedule::constant(EnvironmentKind kind) {
  return StorageSchedule{{ScheduleSegment{0.0, Environment::of(kind)}}};
}

void StorageSchedule::validate() const {
  if (segments.empty()) throw ValidationError("schedule has no segments");
  if (segments.front().start_t_s != 0.0) {
    std::ostringstream os;
    os << "schedule must start at t = 0 (first segment starts at " << segments.front().start_t_s / kSecondsPerDay
       << " days)";
    throw ValidationError(os.str());
  }
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (!(segments[i].start_t_s > segments[i - 1].start_t_s)) {
      std::ostringstream os;
      os << "schedule segment " << i << " start time is not strictly increasing";
      throw ValidationError(os.str());
    }
  }
}

const Environment& StorageSchedule::at(double t_s) const {
  const ScheduleSegment* active = &segments.front();
  for (const auto& seg : segments) {
    if (seg.start_t_s <= t_s) active = &seg;
  }
  return active->env;
}

bool AnnealEvent::targets_junction(int junction_id) const {
  return targets.empty() || std::find(targets.begin(), targets.end(), junction_id) != targets.end();
}

void AnnealEvent::validate() const {
  if (!(t_s >= 0.0)) throw ValidationError("anneal event time must be >= 0");
  if (const auto* v = std::get_if<VoltageAnneal>(&kind)) {
    if (v->n_pulses <= 0) throw ValidationError("voltage anneal n_pulses must be > 0");
    if (!(v->amplitude_V > 0.0)) throw ValidationError("voltage anneal amplitude_V must be > 0");
    if (!(v->pulse_duration_s > 0.0)) throw ValidationError("voltage anneal pulse_duration_s must be > 0");
  } else {
    const auto& th = std::get<ThermalAnneal>(kind);
    if (!(th.hold_min > 0.0)) throw ValidationError("thermal anneal hold_min must be > 0");
  }
}

double TrajectoryState::drift_factor() const {
  if (!post_anneal) return 1.0;
  const double dt = std::max(0.0, t_s - post_anneal->origin_t_s);
  const auto& p = post_anneal->params;
  return 1.0 + p.a * std::log(dt / p.tau_s + p.b);
}

double TrajectoryState::fraction() const { return (1.0 + y) * anneal_scale * drift_factor(); }

double RelaxTimes::between(EnvironmentKind from, EnvironmentKind to) const {
  if (!is_gas(from) && is_gas(to)) return vacuum_to_gas_s;
  if (is_gas(from) && !is_gas(to)) return gas_to_vacuum_s;
  return gas_gas_s;
}

SimConfig SimConfig::defaults() {
  SimConfig cfg;
  cfg.env_tau_s = {
      {EnvironmentKind::Ambient, 1.2e4},
      {EnvironmentKind::NitrogenGlovebox, 4.3e4},
      {EnvironmentKind::HighVacuum, 6.9e4},
  };
  // Signs follow the observed ordering; magnitudes are calibration defaults.
  cfg.thermal_response = {
      {200.0, EnvironmentKind::NitrogenGlovebox, -0.08},
      {250.0, EnvironmentKind::NitrogenGlovebox, -0.15},
      {200.0, EnvironmentKind::Ambient, +0.03},
      {250.0, EnvironmentKind::Ambient, -0.06},
  };
  return cfg;
}

void SimConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("sim config: ") + name + " must be > 0");
  };
  positive(relax.gas_gas_s, "relax.gas_gas_s");
  positive(relax.vacuum_to_gas_s, "relax.vacuum_to_gas_s");
  positive(relax.gas_to_vacuum_s, "relax.gas_to_vacuum_s");
  positive(integration_dt_s, "integration_dt_s");
  if (integration_dt_s > 3600.0) throw ValidationError("sim config: integration_dt_s must be <= 3600");
  if (!(fab_a >= 0.0)) throw ValidationError("sim config: fab_a must be >= 0");
  positive(fab_b, "fab_b");
  for (const auto& [kind, tau] : env_tau_s) positive(tau, "env_tau_s");
  if (!(session_exposure_s >= 0.0)) throw ValidationError("sim config: session_exposure_s must be >= 0");
  if (!(measurement_exposure_s >= 0.0)) throw ValidationError("sim config: measurement_exposure_s must be >= 0");
  if (!(voltage_response.sd >= 0.0)) throw ValidationError("sim config: voltage_response.sd must be >= 0");
  if (!(voltage_response.post_a >= 0.0)) throw ValidationError("sim config: voltage_response.post_a must be >= 0");
  positive(voltage_response.post_tau_s, "voltage_response.post_tau_s");
}

double SimConfig::tau_for(EnvironmentKind kind) const {
  const auto it = env_tau_s.find(kind);
  if (it == env_tau_s.end()) {
    throw ConfigError("no aging timescale configured for environment '" + std::string(environment_name(kind)) + "'");
  }
  return it->second;
}

double SimConfig::thermal_fraction(double temp_C, EnvironmentKind env) const {
  for (const auto& s : thermal_response) {
    if (s.env == env && std::abs(s.temp_C - temp_C) < kTempMatchC) return s.fraction;
  }
  std::ostringstream os;
  os << "no thermal response configured for " << temp_C << " C in " << environment_name(env);
  throw ConfigError(os.str());
}

AgingParams bound_curve(const Environment& env, const SimConfig& cfg, double r0_ohm) {
  return AgingParams{cfg.fab_a, cfg.tau_for(env.kind), cfg.fab_b, r0_ohm};
}

double bound_fraction(EnvironmentKind kind, const SimConfig& cfg, double age_s) {
  return cfg.fab_a * std::log(age_s / cfg.tau_for(kind) + cfg.fab_b);
}

TrajectoryState initial_state(const StorageSchedule& schedule, const SimConfig& cfg, double r0_ohm) {
  schedule.validate();
  if (!(r0_ohm > 0.0)) throw DomainError("r0 must be positive");
  TrajectoryState s;
  s.env = schedule.segments.front().env;
  s.y = bound_fraction(s.env.kind, cfg, 0.0);
  s.r0_ohm = r0_ohm;
  s.floor_ohm = r0_ohm * (1.0 + s.y);
  s.relax_time_s = cfg.relax.gas_gas_s;
  return s;
}

TrajectoryState advance(TrajectoryState state, const SimConfig& cfg, double target_t_s) {
  while (state.t_s < target_t_s) {
    const double h = std::min(cfg.integration_dt_s, target_t_s - state.t_s);
    step(state, cfg, h);
  }
  return state;
}

TrajectoryState enter_environment(TrajectoryState state, const Environment& env, const SimConfig& cfg) {
  if (env.kind != state.env.kind) state.relax_time_s = cfg.relax.between(state.env.kind, env.kind);
  state.env = env;
  return state;
}

TrajectoryState apply_voltage_anneal(TrajectoryState state, const AnnealEvent& ev, const SimConfig& cfg,
                                     std::uint64_t rng_seed) {
  const auto* v = std::get_if<VoltageAnneal>(&ev.kind);
  if (v == nullptr) throw ValidationError("apply_voltage_anneal called with a non-voltage event");
  const auto& resp = cfg.voltage_response;
  Rng rng(rng_seed);
  double jump = rng.normal(resp.mean, resp.sd);
  for (int tries = 0; jump <= -1.0 && tries < 64; ++tries) jump = rng.normal(resp.mean, resp.sd);
  if (jump <= -1.0) throw ConfigError("voltage response distribution yields jumps <= -100%");

  // Fold any previous drift into the scale before installing the new one.
  state.anneal_scale *= state.drift_factor() * (1.0 + jump);
  PostAnnealDrift drift;
  drift.params = AgingParams{resp.post_a, resp.post_tau_s, 1.0, state.resistance_ohm()};
  drift.origin_t_s = state.t_s;
  state.post_anneal = drift;
  ++state.voltage_anneals;
  return state;
}

TrajectoryState apply_thermal_anneal(TrajectoryState state, const AnnealEvent& ev, const SimConfig& cfg) {
  const auto* th = std::get_if<ThermalAnneal>(&ev.kind);
  if (th == nullptr) throw ValidationError("apply_thermal_anneal called with a non-thermal event");
  const double f = cfg.thermal_fraction(th->temp_C, th->env.kind);
  state.anneal_scale *= 1.0 + f;
  if (cfg.floor_at_r0) state.floor_armed = true;
  apply_floor(state);
  ++state.thermal_anneals;
  return state;
}

TrajectoryState hold_in_environment(TrajectoryState state, const Environment& env, double duration_s,
                                    const SimConfig& cfg) {
  if (!(duration_s > 0.0)) return state;
  const Environment restore = state.env;
  const double restore_relax = state.relax_time_s;
  state = enter_environment(std::move(state), env, cfg);
  state = advance(std::move(state), cfg, state.t_s + duration_s);
  state.env = restore;
  state.relax_time_s = restore_relax;
  return state;
}

TrajectoryState measurement_exposure(TrajectoryState state, double duration_s, const SimConfig& cfg) {
  if (!(duration_s >= 0.0)) throw ValidationError("exposure duration must be >= 0");
  return hold_in_environment(std::move(state), Environment::of(EnvironmentKind::Ambient), duration_s, cfg);
}

TrajectoryState process_event(TrajectoryState state, const AnnealEvent& ev, const SimConfig& cfg, int junction_id,
                              std::uint64_t rng_seed) {
  if (ev.is_voltage()) {
    if (ev.targets_junction(junction_id)) state = apply_voltage_anneal(std::move(state), ev, cfg, rng_seed);
    return measurement_exposure(std::move(state), cfg.session_exposure_s, cfg);
  }
  if (!ev.targets_junction(junction_id)) return state;
  const auto& th = std::get<ThermalAnneal>(ev.kind);
  state = apply_thermal_anneal(std::move(state), ev, cfg);
  return hold_in_environment(std::move(state), th.env, th.hold_min * 60.0, cfg);
}

std::vector<TrajectorySample> simulate_trajectory(const StorageSchedule& schedule,
                                                  const std::vector<AnnealEvent>& events, const SimConfig& cfg,
                                                  double r0_ohm, const std::vector<double>& sample_t_s,
                                                  const TrajectoryOptions& opts) {
  cfg.validate();
  schedule.validate();
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].validate();
    if (i > 0 && events[i].t_s < events[i - 1].t_s) throw ValidationError("anneal events are not sorted by time");
  }
  for (std::size_t i = 0; i < sample_t_s.size(); ++i) {
    if (!(sample_t_s[i] >= 0.0)) throw ValidationError("sample times must be >= 0");
    if (i > 0 && sample_t_s[i] < sample_t_s[i - 1]) throw ValidationError("sample times are not nondecreasing");
  }

  // Per-event seeds derived up front so they do not depend on sampling.
  Rng seeder(opts.seed);
  std::vector<std::uint64_t> event_seeds(events.size());
  for (auto& s : event_seeds) s = static_cast<std::uint64_t>(seeder.uniform() * 0x1.0p53);

  TrajectoryState state = initial_state(schedule, cfg, r0_ohm);
  std::vector<TrajectorySample> out;
  out.reserve(sample_t_s.size());

  std::size_t next_seg = 1, next_ev = 0, next_sample = 0;
  const auto& segs = schedule.segments;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  while (next_sample < sample_t_s.size()) {
    const double t_seg = next_seg < segs.size() ? segs[next_seg].start_t_s : kInf;
    const double t_ev = next_ev < events.size() ? events[next_ev].t_s : kInf;
    const double t_smp = sample_t_s[next_sample];
    const double t_next = std::min({t_seg, t_ev, t_smp});

    state = advance(std::move(state), cfg, t_next);
    if (t_seg == t_next) {
      state = enter_environment(std::move(state), segs[next_seg].env, cfg);
      ++next_seg;
    } else if (t_smp == t_next) {
      out.push_back({t_smp, state.resistance_ohm()});
      ++next_sample;
      if (cfg.measurement_exposure_s > 0.0) state = measurement_exposure(std::move(state), cfg.measurement_exposure_s, cfg);
    } else {
      state = process_event(std::move(state), events[next_ev], cfg, opts.junction_id, event_seeds[next_ev]);
      ++next_ev;
    }
  }
  return out;
}

}  // namespace jjage
