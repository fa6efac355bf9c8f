#pragma once

// Chip-level Monte Carlo over junction-to-junction variability.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jjage/core_model.hpp"
#include "jjage/trajectory.hpp"

namespace jjage {

struct ChipSpec {
  std::string chip_id = "chip";
  int n_junctions = 16;
  double r0_mean_ohm = 22.8e3;
  double r0_cv = 0.048;
  double a_mean = 0.21;
  double a_sd = 0.0;
  double log_tau_mean = 9.392661928770137;  // ln(1.2e4 s)
  double log_tau_sd = 0.0;
  double b_mean = 1.0;
  double b_sd = 0.0;
  double open_prob = 0.0;
  double noise_sigma = 0.003;

  void validate() const;
};

enum class RecordFlag { Ok, Open, Excluded };

std::string_view flag_name(RecordFlag f);
std::optional<RecordFlag> parse_flag(std::string_view name);

struct MeasurementRecord {
  std::string chip_id;
  int junction_id = 0;
  double t_s = 0.0;
  double r_ohm = 0.0;  // NaN for open junctions without a reading
  std::string env_label;
  RecordFlag flag = RecordFlag::Ok;

  bool usable() const { return flag == RecordFlag::Ok; }
  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

struct ChipDataset {
  std::vector<MeasurementRecord> records;
  std::optional<ChipSpec> spec;
  std::optional<StorageSchedule> schedule;

  /// Orders records by (junction_id, t_s).
  void sort();
  std::vector<int> junction_ids() const;
  /// Records of one junction in time order (dataset must be sorted).
  std::vector<MeasurementRecord> junction(int junction_id) const;
};

struct DrawnJunction {
  int junction_id = 0;
  AgingParams params;
  bool open = false;
  // tau_j / exp(log_tau_mean); scales every environment timescale of this junction.
  double tau_scale = 1.0;
};

struct DrawnChip {
  ChipSpec spec;
  std::vector<DrawnJunction> junctions;
};

/// R0 ~ Normal(mean, cv * mean), a and b ~ Normal truncated to > 0,
/// ln tau ~ Normal(log_tau_mean, log_tau_sd), open ~ Bernoulli(open_prob).
DrawnChip draw_chip(const ChipSpec& spec, std::uint64_t seed);

/// SimConfig for one junction: its a and b replace the fabrication values and
/// every environment timescale is multiplied by its tau_scale.
SimConfig junction_config(const SimConfig& cfg, const DrawnJunction& j);

/// Simulates every junction and applies (1 + eta) measurement noise,
/// eta ~ Normal(0, noise_sigma), independently per record.
ChipDataset simulate_chip(const DrawnChip& chip, const StorageSchedule& schedule,
                          const std::vector<AnnealEvent>& events, const std::vector<double>& sample_t_s,
                          const SimConfig& cfg, std::uint64_t seed);

/// Sample sd / mean; non-finite entries are skipped. Throws InsufficientDataError with < 2 values.
double coefficient_of_variation(std::span<const double> values);
/// Same, over usable (flag ok) records only.
double coefficient_of_variation(std::span<const MeasurementRecord> records);

struct AggregateRow {
  double t_s = 0.0;
  double mean_r_ohm = 0.0;
  double cv = 0.0;  // NaN when n_used < 2
  int n_used = 0;
  bool cv_defined() const { return n_used >= 2; }
};

/// Groups usable records whose times lie within tolerance_s of the group's first time.
std::vector<AggregateRow> aggregate_series(const ChipDataset& ds, double tolerance_s = 600.0);

}  // namespace jjage
