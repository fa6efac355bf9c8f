#pragma once

// File formats: measurement CSV, schedule files, chip spec JSON, fit reports
// and tidy plot data. All writers produce UTF-8 text with '\n' line endings
// and shortest round-trip number formatting, so identical inputs give
// byte-identical files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jjage/ensemble.hpp"
#include "jjage/fit.hpp"
#include "jjage/trajectory.hpp"

namespace jjage {

// ---------------------------------------------------------------------------
// I-V sweeps

struct IVPoint {
  double current_A = 0.0;
  double voltage_V = 0.0;
};

struct IVSweep {
  std::vector<IVPoint> points;
  double compliance_A = 1.0e-6;

  void validate() const;
};

struct IVFit {
  double r_ohm = 0.0;
  double offset_V = 0.0;
  bool suspect = false;  // negative slope
};

/// Ordinary least-squares slope of V against I.
IVFit resistance_from_iv(const IVSweep& sweep);

// ---------------------------------------------------------------------------
// Measurement CSV: chip_id,junction_id,t_seconds,resistance_ohms,environment[,flag]

struct LoadOptions {
  // Readings above this (or non-finite) are flagged open.
  double open_threshold_ohm = 1.0e6;
};

ChipDataset parse_measurements(std::istream& in, const std::string& source = "<stream>",
                               const LoadOptions& opts = {});
ChipDataset load_measurements(const std::filesystem::path& path, const LoadOptions& opts = {});
std::string format_measurements(const ChipDataset& ds);
void write_measurements(const ChipDataset& ds, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Schedule file
//
//   # comment
//   start_days,environment
//   0,ambient
//   4,glovebox
//   event,56,voltage,<n_pulses>,<amplitude_V>,<pulse_duration_s>[,<targets>]
//   event,85,thermal,<temp_C>,<environment>,<hold_min>[,<targets>]
//
// targets: junction ids separated by ';', ranges as lo-hi (e.g. 0-7;12).

struct ScheduleFile {
  StorageSchedule schedule;
  std::vector<AnnealEvent> events;
};

ScheduleFile parse_schedule(std::istream& in, const std::string& source = "<stream>");
ScheduleFile load_schedule(const std::filesystem::path& path);
std::string format_schedule(const ScheduleFile& file);

// ---------------------------------------------------------------------------
// Chip spec JSON ({"chip": {...}, "sim": {...}}), applied on top of a base.

struct ChipScenario {
  ChipSpec spec;
  SimConfig cfg;
};

ChipScenario parse_chip_spec(const std::string& json_text, ChipScenario base, const std::string& source = "<spec>");
ChipScenario load_chip_spec(const std::filesystem::path& path, ChipScenario base);

// ---------------------------------------------------------------------------
// Fit report

struct FitSummary {
  std::string model;
  std::map<std::string, double> params;
  std::map<std::string, std::optional<double>> stderr_values;
  std::map<std::string, bool> at_bound;
  double rss = 0.0;
  bool converged = false;
  int n_points = 0;
  int iterations = 0;
  bool degenerate_timescales = false;
  std::vector<std::string> warnings;
  friend bool operator==(const FitSummary&, const FitSummary&) = default;
};

FitSummary summarize(const FitResult& r);

struct JunctionSummary {
  int junction_id = 0;
  double r0_ohm = 0.0;
  std::optional<FitSummary> fit;
  std::string error;
  friend bool operator==(const JunctionSummary&, const JunctionSummary&) = default;
};

struct ChipMetadata {
  std::string chip_id;
  int n_junctions = 0;
  int n_records = 0;
  int n_open = 0;
  double t_first_s = 0.0;
  double t_last_s = 0.0;
  std::string last_environment;
  double last_mean_r_ohm = 0.0;
  friend bool operator==(const ChipMetadata&, const ChipMetadata&) = default;
};

struct ReportAggregate {
  double t_s = 0.0;
  double mean_r_ohm = 0.0;
  std::optional<double> cv;
  int n_used = 0;
  friend bool operator==(const ReportAggregate&, const ReportAggregate&) = default;
};

struct InputDigest {
  std::string path;
  std::string sha256;
  friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

struct Provenance {
  std::vector<InputDigest> inputs;
  std::string tool_version;
  std::optional<std::uint64_t> seed;
  std::string config_digest;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

inline constexpr int kReportSchemaVersion = 1;

struct FitReport {
  int schema_version = kReportSchemaVersion;
  ChipMetadata chip;
  std::vector<JunctionSummary> junctions;
  FitSummary average;
  double average_r0_ohm = 0.0;
  std::vector<ReportAggregate> aggregates;
  std::map<std::string, std::vector<HistogramBin>> histograms;
  Provenance provenance;
  friend bool operator==(const FitReport&, const FitReport&) = default;
};

/// Assembles a report from a chip fit (histograms use the converged per-junction fits).
FitReport make_report(const ChipDataset& ds, const ChipFit& fit, int histogram_bins = 8);

std::string format_report(const FitReport& report);
FitReport parse_report(const std::string& json_text, const std::string& source = "<report>");
void write_report(const FitReport& report, const std::filesystem::path& path);
FitReport read_report(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Plot data: series_id,t_days,value

struct PlotPoint {
  std::string series_id;
  double t_days = 0.0;
  double value = 0.0;
};

std::string format_plot_data(const std::vector<PlotPoint>& points);
void export_plot_data(const std::vector<PlotPoint>& points, const std::filesystem::path& path);

// ---------------------------------------------------------------------------

/// Shortest decimal text that parses back to the same double; empty for NaN.
std::string format_double(double v);
std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace jjage
