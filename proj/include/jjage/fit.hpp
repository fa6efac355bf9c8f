#pragma once

// Least-squares estimation of the logarithmic aging models.
//
// Parameters are optimized in an internal vector ("theta") with timescales in
// natural log:
//   SingleLog: (a, ln tau, b)
//   TwoLog:    (a_int, ln tau_int, a_ext, ln tau_ext)

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jjage/core_model.hpp"
#include "jjage/ensemble.hpp"

namespace jjage {

enum class FitModel { SingleLog, TwoLog };

std::string_view model_name(FitModel m);
std::optional<FitModel> parse_model(std::string_view name);
std::vector<std::string> theta_names(FitModel m);

struct SeriesPoint {
  double t_s = 0.0;
  double y = 0.0;  // R / R0
};
using Series = std::vector<SeriesPoint>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct FitOptions {
  FitModel model = FitModel::SingleLog;
  Interval a{0.0, 1.0};
  Interval log_tau{4.605170185988092, 18.420680743952367};  // ln 1e2 .. ln 1e8
  // b must stay positive; the lower edge stands in for the open end of (0, 10].
  Interval b{1.0e-9, 10.0};
  int max_iterations = 200;
  double step_tolerance = 1.0e-10;
  double residual_tolerance = 1.0e-12;
  std::optional<std::vector<double>> init;  // theta
  std::vector<double> weights;              // optional, one per point
  // Extra starting points spread over the timescale bounds. Ignored when init is set.
  bool multi_start = true;

  void validate() const;
  /// Per-theta bounds in model order. An interval with lo == hi fixes that parameter.
  std::vector<Interval> theta_bounds() const;
};

struct FitResult {
  FitModel model = FitModel::SingleLog;
  std::vector<double> theta;
  std::vector<double> theta_stderr;  // NaN when the covariance is unavailable
  std::vector<bool> at_bound;
  double rss = 0.0;
  double init_rss = 0.0;
  bool converged = false;
  int n_points = 0;
  int iterations = 0;
  bool degenerate_timescales = false;  // TwoLog: channels within a factor 2
  std::vector<std::string> warnings;

  AgingParams single_log(double r0_ohm = 1.0) const;
  TwoLogParams two_log(double r0_ohm = 1.0) const;
  /// Reported parameter by name (a, tau, log_tau, b, a_int, tau_int, a_ext, tau_ext).
  double value(std::string_view name) const;
  /// Standard error in the reported parameter's own units (tau via the delta method).
  double stderr_of(std::string_view name) const;
};

/// Model value at t for a theta vector.
double model_value(FitModel m, std::span<const double> theta, double t_s);
/// Analytic partial derivatives with respect to theta.
void model_gradient(FitModel m, std::span<const double> theta, double t_s, std::span<double> grad);
double residual_sum_of_squares(FitModel m, std::span<const double> theta, const Series& series,
                               std::span<const double> weights = {});

/// Start point from the log asymptotics: a0 = rise / ln(t_max/t_min), b0 = 1, tau0 = earliest positive time.
std::vector<double> initial_guess(FitModel m, const Series& series, const FitOptions& opts);

/// Damped Gauss-Newton (Levenberg-Marquardt) from one start; steps are only
/// accepted when they lower the rss.
FitResult fit_from(const Series& series, const FitOptions& opts, std::vector<double> start);

FitResult fit_single_log(const Series& series, const FitOptions& opts = {});
/// Output channels are ordered so tau_int >= tau_ext.
FitResult fit_two_log(const Series& series, FitOptions opts = {});
FitResult fit_series(const Series& series, const FitOptions& opts);

// ---------------------------------------------------------------------------
// Chip fits

struct ChipFitOptions {
  // Normalization reference per junction; the earliest usable reading otherwise.
  std::optional<double> r0_override_ohm;
  // Fix b on the chip-average value for the per-junction fits.
  bool shared_b = false;
  int min_points = 4;
  double group_tolerance_s = 600.0;
};

struct JunctionFit {
  int junction_id = 0;
  double r0_ohm = 0.0;
  std::optional<FitResult> result;
  std::string error;  // set when the junction failed prechecks or fitting
};

struct ChipFit {
  std::vector<JunctionFit> junctions;
  FitResult average;
  double average_r0_ohm = 0.0;
  std::vector<AggregateRow> aggregates;
};

/// Normalizes one junction's usable records by its reference resistance.
Series junction_series(const std::vector<MeasurementRecord>& records, std::optional<double> r0_override,
                       double* r0_used = nullptr);

ChipFit fit_chip(const ChipDataset& ds, const FitOptions& opts, const ChipFitOptions& chip_opts = {});

// ---------------------------------------------------------------------------
// Brute-force oracle

/// Values for one parameter in reported units (tau axes in seconds).
struct GridAxis {
  std::vector<double> values;
  static GridAxis linear(double lo, double hi, int n);
  static GridAxis logarithmic(double lo, double hi, int n);
  static GridAxis single(double v) { return GridAxis{{v}}; }
};

struct GridSpec {
  FitModel model = FitModel::SingleLog;
  std::vector<GridAxis> axes;  // SingleLog: a, tau, b. TwoLog: a_int, tau_int, a_ext, tau_ext.
};

struct GridResult {
  std::vector<double> theta;
  double rss = 0.0;
  std::size_t nodes = 0;
};

inline constexpr double kMaxGridNodes = 1.0e8;

/// Exhaustive evaluation; refuses grids above kMaxGridNodes.
GridResult grid_search_oracle(const Series& series, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Histograms

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Equal-width bins over the observed range of a, tau, log_tau or b.
std::vector<HistogramBin> parameter_histogram(const std::vector<FitResult>& results, std::string_view field,
                                              int n_bins);

}  // namespace jjage
