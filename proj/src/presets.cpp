#include "jjage/presets.hpp"

#include <algorithm>
#include <cmath>

#include "jjage/errors.hpp"

namespace jjage {

namespace {

constexpr double kDay = kSecondsPerDay;
constexpr double kHour = 3600.0;

StorageSchedule alternating(EnvironmentKind first, EnvironmentKind second) {
  // Swaps at days 1, 4, 5 and 12.
  StorageSchedule s;
  const double starts[] = {0.0, 1.0, 4.0, 5.0, 12.0};
  for (int i = 0; i < 5; ++i) s.segments.push_back({starts[i] * kDay, Environment::of(i % 2 == 0 ? first : second)});
  return s;
}

std::vector<AnnealEvent> thermal_sequence(double start_days) {
  struct Step {
    double temp;
    EnvironmentKind env;
    double hold;
  };
  const Step steps[] = {{200.0, EnvironmentKind::NitrogenGlovebox, 10.0},
                        {250.0, EnvironmentKind::NitrogenGlovebox, 10.0},
                        {200.0, EnvironmentKind::Ambient, 40.0},
                        {250.0, EnvironmentKind::Ambient, 10.0},
                        {200.0, EnvironmentKind::Ambient, 10.0}};
  std::vector<AnnealEvent> out;
  for (int i = 0; i < 5; ++i) {
    AnnealEvent ev;
    ev.t_s = start_days * kDay + i * kHour;
    ev.kind = ThermalAnneal{steps[i].temp, Environment::of(steps[i].env), steps[i].hold};
    out.push_back(ev);
  }
  return out;
}

AnnealEvent half_chip_voltage_anneal(double t_days) {
  AnnealEvent ev;
  ev.t_s = t_days * kDay;
  ev.kind = VoltageAnneal{30, 0.9, 1.0};
  for (int i = 0; i < 8; ++i) ev.targets.push_back(i);
  return ev;
}

SimConfig fabrication3() {
  SimConfig cfg = SimConfig::defaults();
  cfg.env_tau_s[EnvironmentKind::NitrogenGlovebox] = 3.9e4;
  return cfg;
}

Preset chip1() {
  Preset p;
  p.name = "chip1";
  p.description = "fabrication 1, ambient storage, half the junctions voltage annealed at day 56";
  p.spec = {"chip1", 16, 22.8e3, 0.048, 0.21, 0.015, std::log(1.2e4), 0.35, 1.01, 0.05, 0.0, 0.003};
  p.cfg = SimConfig::defaults();
  p.cfg.fab_a = 0.21;
  p.cfg.fab_b = 1.01;
  p.cfg.voltage_response = {0.142, 0.010, 0.03, 5.0e4};
  p.schedule = StorageSchedule::constant(EnvironmentKind::Ambient);
  p.events = {half_chip_voltage_anneal(56.0)};
  p.duration_days = 62.0;
  p.reference = AgingParams{0.21, 1.2e4, 1.01, 22.8e3};
  return p;
}

Preset chip2() {
  Preset p;
  p.name = "chip2";
  p.description = "fabrication 1, glovebox storage, half the junctions voltage annealed at day 56";
  p.spec = {"chip2", 16, 24.3e3, 0.059, 0.15, 0.005, std::log(4.3e4), 0.15, 1.06, 0.05, 0.0, 0.003};
  p.cfg = SimConfig::defaults();
  p.cfg.fab_a = 0.15;
  p.cfg.fab_b = 1.06;
  p.cfg.voltage_response = {0.181, 0.014, 0.03, 1.6e4};
  p.schedule = StorageSchedule::constant(EnvironmentKind::NitrogenGlovebox);
  p.events = {half_chip_voltage_anneal(56.0)};
  p.duration_days = 62.0;
  p.reference = AgingParams{0.15, 4.3e4, 1.06, 24.3e3};
  return p;
}

Preset alternating_chip(int which) {
  Preset p;
  const bool three = which == 3;
  p.name = three ? "chip3" : "chip4";
  p.description = three ? "fabrication 2, ambient first, swapped with chip4 at days 1, 4, 5, 12; thermal anneals at day 85"
                        : "fabrication 2, glovebox first, swapped with chip3 at days 1, 4, 5, 12; thermal anneals at day 85";
  const auto first = three ? EnvironmentKind::Ambient : EnvironmentKind::NitrogenGlovebox;
  const auto second = three ? EnvironmentKind::NitrogenGlovebox : EnvironmentKind::Ambient;
  p.cfg = SimConfig::defaults();
  p.cfg.fab_a = 0.08;
  p.cfg.fab_b = 1.0;
  p.spec = {p.name, 16, three ? 7.5e3 : 8.7e3, three ? 0.039 : 0.051, 0.08, 0.005,
            std::log(p.cfg.tau_for(first)), 0.1, 1.0, 0.02, 0.0, 0.003};
  p.schedule = alternating(first, second);
  p.events = thermal_sequence(85.0);
  p.duration_days = 86.0;
  return p;
}

Preset chip5() {
  Preset p;
  p.name = "chip5";
  p.description = "fabrication 3, vacuum for 7 days then glovebox";
  p.cfg = fabrication3();
  p.cfg.fab_a = 0.12;
  p.cfg.fab_b = 0.97;
  p.spec = {"chip5", 16, 11.1e3, 0.033, 0.12, 0.005, std::log(6.9e4), 0.15, 0.97, 0.03, 0.0, 0.003};
  p.schedule.segments = {{0.0, Environment::of(EnvironmentKind::HighVacuum)},
                         {7.0 * kDay, Environment::of(EnvironmentKind::NitrogenGlovebox)}};
  p.duration_days = 30.0;
  p.reference = AgingParams{0.12, 6.9e4, 0.97, 11.1e3};
  return p;
}

Preset chip6() {
  Preset p;
  p.name = "chip6";
  p.description = "fabrication 3, glovebox storage, reduced yield";
  p.cfg = fabrication3();
  p.cfg.fab_a = 0.11;
  p.cfg.fab_b = 0.98;
  p.spec = {"chip6", 16, 11.1e3, 0.121, 0.11, 0.005, std::log(3.9e4), 0.15, 0.98, 0.03, 0.2, 0.003};
  p.schedule = StorageSchedule::constant(EnvironmentKind::NitrogenGlovebox);
  p.duration_days = 46.0;
  p.reference = AgingParams{0.11, 3.9e4, 0.98, 11.1e3};
  return p;
}

}  // namespace

std::vector<std::string> preset_names() { return {"chip1", "chip2", "chip3", "chip4", "chip5", "chip6"}; }

Preset preset(std::string_view name) {
  if (name == "chip1") return chip1();
  if (name == "chip2") return chip2();
  if (name == "chip3") return alternating_chip(3);
  if (name == "chip4") return alternating_chip(4);
  if (name == "chip5") return chip5();
  if (name == "chip6") return chip6();
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected chip1 .. chip6)");
}

std::vector<double> sample_times(double duration_days, const std::vector<AnnealEvent>& events) {
  if (!(duration_days > 0.0)) throw ValidationError("duration must be > 0 days");
  const double end = duration_days * kDay;
  std::vector<double> t = {0.0, 1.0 * kHour, 3.0 * kHour, 6.0 * kHour, 12.0 * kHour};
  for (double d = 1.0; d * kDay <= end; d += 1.0) t.push_back(d * kDay);
  for (const auto& ev : events) {
    t.push_back(ev.t_s);
    if (ev.is_thermal()) {
      t.push_back(ev.t_s + 50.0 * 60.0);
    } else {
      for (double h : {2.0, 6.0, 12.0}) t.push_back(ev.t_s + h * kHour);
    }
  }
  std::erase_if(t, [&](double v) { return v > end; });
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace jjage
