#pragma once

// Single-junction resistance trajectories through a storage schedule.
//
// The environment-driven fractional aging y relaxes toward the active
// environment's bound curve y_b(age) = a ln(age/tau_env + b):
//
//   dy/dt = y_b'(age) + (y_b(age) - y) / T_relax
//
// where the age is the wall-clock time since liftoff and T_relax depends on
// the last environment transition. Within a segment the update is the exact
// solution of this linear equation over each fixed step, so a junction that
// starts on its bound stays on it. Anneals act on a persistent multiplicative
// scale and an optional post-anneal log drift:
//
//   R / R0 = (1 + y) * scale * (1 + a_pa ln(1 + (t - t_anneal)/tau_pa))

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "jjage/core_model.hpp"

namespace jjage {

struct ScheduleSegment {
  double start_t_s = 0.0;
  Environment env;
};

struct StorageSchedule {
  std::vector<ScheduleSegment> segments;

  static StorageSchedule constant(EnvironmentKind kind);

  /// Start times strictly increasing, first at t = 0. Throws ValidationError.
  void validate() const;
  const Environment& at(double t_s) const;
};

struct VoltageAnneal {
  int n_pulses = 30;
  double amplitude_V = 0.9;
  double pulse_duration_s = 1.0;
};

struct ThermalAnneal {
  double temp_C = 200.0;
  Environment env;
  // Time spent in the oven environment after the step before the junction is measured.
  double hold_min = 10.0;
};

struct AnnealEvent {
  double t_s = 0.0;
  std::variant<VoltageAnneal, ThermalAnneal> kind;
  // Junction ids the event acts on; empty means every junction.
  std::vector<int> targets;

  bool is_voltage() const { return std::holds_alternative<VoltageAnneal>(kind); }
  bool is_thermal() const { return std::holds_alternative<ThermalAnneal>(kind); }
  bool targets_junction(int junction_id) const;
  void validate() const;
};

struct PostAnnealDrift {
  AgingParams params;  // r0_ohm is the resistance right after the jump
  double origin_t_s = 0.0;
};

struct TrajectoryState {
  double t_s = 0.0;
  double y = 0.0;
  double virtual_age_s = 0.0;
  std::optional<PostAnnealDrift> post_anneal;

  // Bookkeeping beyond the environment channel.
  double anneal_scale = 1.0;
  double r0_ohm = 1.0;
  double floor_ohm = 0.0;     // R at t = 0
  bool floor_armed = false;   // set once a thermal anneal ran with floor_at_r0
  Environment env;
  double relax_time_s = 3.0 * kSecondsPerDay;
  int voltage_anneals = 0;
  int thermal_anneals = 0;

  double drift_factor() const;
  /// R / r0 including anneal scale and post-anneal drift.
  double fraction() const;
  double resistance_ohm() const { return r0_ohm * fraction(); }
};

struct RelaxTimes {
  double gas_gas_s = 3.0 * kSecondsPerDay;
  double vacuum_to_gas_s = 0.5 * kSecondsPerDay;
  double gas_to_vacuum_s = 3.0 * kSecondsPerDay;

  double between(EnvironmentKind from, EnvironmentKind to) const;
};

struct ThermalStep {
  double temp_C = 0.0;
  EnvironmentKind env = EnvironmentKind::Ambient;
  double fraction = 0.0;
};

/// Jump j ~ Normal(mean, sd), truncated to j > -1, followed by a fresh log drift.
struct VoltageResponse {
  double mean = 0.16;
  double sd = 0.02;
  double post_a = 0.03;
  double post_tau_s = 5.0e4;
};

struct SimConfig {
  RelaxTimes relax;
  std::map<EnvironmentKind, double> env_tau_s;
  double fab_a = 0.21;
  double fab_b = 1.0;
  std::vector<ThermalStep> thermal_response;
  VoltageResponse voltage_response;
  bool floor_at_r0 = true;
  double integration_dt_s = 600.0;
  // Time out of storage at a voltage-anneal session, applied to every junction on the chip.
  double session_exposure_s = 90.0 * 60.0;
  // Ambient exposure applied right after every sample (0 disables).
  double measurement_exposure_s = 0.0;

  /// Fabrication-1 kinetics (Chips 1 and 2) with the default anneal tables.
  static SimConfig defaults();
  void validate() const;
  double tau_for(EnvironmentKind kind) const;
  /// Throws ConfigError when (temp, env) has no table entry.
  double thermal_fraction(double temp_C, EnvironmentKind env) const;
};

struct TrajectorySample {
  double t_s = 0.0;
  double r_ohm = 0.0;
};

struct TrajectoryOptions {
  int junction_id = 0;
  std::uint64_t seed = 0;
};

/// Bound curve (a = fab_a, tau = env tau, b = fab_b) for one environment.
AgingParams bound_curve(const Environment& env, const SimConfig& cfg, double r0_ohm);

/// y_b(age) for an environment, i.e. eval_single_log(bound) - 1.
double bound_fraction(EnvironmentKind kind, const SimConfig& cfg, double age_s);

/// State at t = 0, on the bound of the first segment.
TrajectoryState initial_state(const StorageSchedule& schedule, const SimConfig& cfg, double r0_ohm);

/// Integrates in the current environment up to target_t_s (no-op if already there).
TrajectoryState advance(TrajectoryState state, const SimConfig& cfg, double target_t_s);

/// Switches the active environment and picks the relaxation time for the transition.
TrajectoryState enter_environment(TrajectoryState state, const Environment& env, const SimConfig& cfg);

TrajectoryState apply_voltage_anneal(TrajectoryState state, const AnnealEvent& ev, const SimConfig& cfg,
                                     std::uint64_t rng_seed);

/// Applies the tabulated step only; the oven hold is handled by the caller (see hold_in_environment).
TrajectoryState apply_thermal_anneal(TrajectoryState state, const AnnealEvent& ev, const SimConfig& cfg);

/// Spends duration_s in env, then returns to the previous environment.
TrajectoryState hold_in_environment(TrajectoryState state, const Environment& env, double duration_s,
                                    const SimConfig& cfg);

/// Ambient exposure while out of storage for a measurement.
TrajectoryState measurement_exposure(TrajectoryState state, double duration_s, const SimConfig& cfg);

/// Applies one event exactly as simulate_trajectory does, including the
/// session exposure after voltage anneals and the oven hold after thermal ones.
TrajectoryState process_event(TrajectoryState state, const AnnealEvent& ev, const SimConfig& cfg,
                              int junction_id, std::uint64_t rng_seed);

/// Samples taken at an event's timestamp are recorded before the event is applied.
/// Samples that fall inside an oven hold or session exposure report the state at
/// the end of that interval.
std::vector<TrajectorySample> simulate_trajectory(const StorageSchedule& schedule,
                                                  const std::vector<AnnealEvent>& events,
                                                  const SimConfig& cfg, double r0_ohm,
                                                  const std::vector<double>& sample_t_s,
                                                  const TrajectoryOptions& opts = {});

}  // namespace jjage
