#pragma once

// Built-in chip scenarios (chip1 .. chip6).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jjage/core_model.hpp"
#include "jjage/ensemble.hpp"
#include "jjage/trajectory.hpp"

namespace jjage {

struct Preset {
  std::string name;
  std::string description;
  ChipSpec spec;
  SimConfig cfg;
  StorageSchedule schedule;
  std::vector<AnnealEvent> events;
  double duration_days = 56.0;
  // Average-curve parameters the scenario is built around (absent for the alternating chips).
  std::optional<AgingParams> reference;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
Preset preset(std::string_view name);

/// Measurement times: t = 0, a few early points, then daily, plus a dense
/// follow-up after every event. Sorted, unique, all <= duration.
std::vector<double> sample_times(double duration_days, const std::vector<AnnealEvent>& events = {});

}  // namespace jjage
