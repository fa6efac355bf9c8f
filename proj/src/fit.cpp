#include "jjage/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jjage/errors.hpp"

namespace jjage {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t theta_size(FitModel m) { return m == FitModel::SingleLog ? 3 : 4; }

void check_series(const Series& series, std::size_t min_points, std::span<const double> weights) {
  if (series.size() < min_points) {
    std::ostringstream os;
    os << "fit needs at least " << min_points << " points (got " << series.size() << ")";
    throw InsufficientDataError(os.str());
  }
  for (const auto& p : series) {
    if (!std::isfinite(p.t_s) || !std::isfinite(p.y)) throw ValidationError("fit series contains non-finite values");
    if (p.t_s < 0.0) throw ValidationError("fit series contains negative times");
  }
  if (!weights.empty()) {
    if (weights.size() != series.size()) throw ValidationError("fit weights must match the number of points");
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("fit weights must be finite and >= 0");
    }
  }
}

double clamp_to(double v, const Interval& iv) { return std::min(std::max(v, iv.lo), iv.hi); }

void clamp_theta(std::vector<double>& theta, const std::vector<Interval>& bounds) {
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = clamp_to(theta[j], bounds[j]);
}

bool on_bound(double v, const Interval& iv) {
  const double tol = 1e-12 * std::max(1.0, std::abs(v));
  return std::abs(v - iv.lo) <= tol || std::abs(v - iv.hi) <= tol;
}

struct Linearization {
  Eigen::MatrixXd jac;
  Eigen::VectorXd res;
};

Linearization linearize(FitModel m, const std::vector<double>& theta, const Series& series,
                        std::span<const double> weights) {
  const std::size_t p = theta.size();
  Linearization lin{Eigen::MatrixXd(series.size(), p), Eigen::VectorXd(series.size())};
  std::vector<double> grad(p);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double sw = weights.empty() ? 1.0 : std::sqrt(weights[i]);
    model_gradient(m, theta, series[i].t_s, grad);
    for (std::size_t j = 0; j < p; ++j) lin.jac(i, j) = sw * grad[j];
    lin.res(i) = sw * (model_value(m, theta, series[i].t_s) - series[i].y);
  }
  return lin;
}

void fill_stderr(FitResult& result, const Series& series, std::span<const double> weights,
                 const std::vector<Interval>& bounds) {
  const std::size_t p = result.theta.size();
  result.theta_stderr.assign(p, kNaN);
  std::vector<std::size_t> free_idx;
  for (std::size_t j = 0; j < p; ++j) {
    if (bounds[j].lo < bounds[j].hi) free_idx.push_back(j);
  }
  const std::size_t n = series.size();
  if (free_idx.empty() || n <= free_idx.size()) return;
  const auto lin = linearize(result.model, result.theta, series, weights);
  Eigen::MatrixXd jf(n, free_idx.size());
  for (std::size_t k = 0; k < free_idx.size(); ++k) jf.col(static_cast<Eigen::Index>(k)) = lin.jac.col(free_idx[k]);
  const Eigen::MatrixXd normal = jf.transpose() * jf;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (!lu.isInvertible()) return;
  const double sigma2 = result.rss / static_cast<double>(n - free_idx.size());
  const Eigen::MatrixXd cov = lu.inverse() * sigma2;
  for (std::size_t k = 0; k < free_idx.size(); ++k) {
    const double v = cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    result.theta_stderr[free_idx[k]] = v >= 0.0 ? std::sqrt(v) : kNaN;
  }
}

void canonicalize_two_log(FitResult& r) {
  if (r.theta[1] < r.theta[3]) {
    std::swap(r.theta[0], r.theta[2]);
    std::swap(r.theta[1], r.theta[3]);
    if (r.theta_stderr.size() == 4) {
      std::swap(r.theta_stderr[0], r.theta_stderr[2]);
      std::swap(r.theta_stderr[1], r.theta_stderr[3]);
    }
    if (r.at_bound.size() == 4) {
      std::swap(r.at_bound[0], r.at_bound[2]);
      std::swap(r.at_bound[1], r.at_bound[3]);
    }
  }
  // Timescales within a factor 2 of each other (|ln ratio| < ln 2).
  r.degenerate_timescales = std::abs(r.theta[1] - r.theta[3]) < std::log(2.0);
  if (r.degenerate_timescales) r.warnings.push_back("two-log timescales within a factor 2: channels not identifiable");
}

double decade_log(int k) { return static_cast<double>(k) * std::log(10.0); }

}  // namespace

std::string_view model_name(FitModel m) { return m == FitModel::SingleLog ? "single-log" : "two-log"; }

std::optional<FitModel> parse_model(std::string_view name) {
  if (name == "single-log" || name == "single") return FitModel::SingleLog;
  if (name == "two-log" || name == "two") return FitModel::TwoLog;
  return std::nullopt;
}

std::vector<std::string> theta_names(FitModel m) {
  if (m == FitModel::SingleLog) return {"a", "log_tau", "b"};
  return {"a_int", "log_tau_int", "a_ext", "log_tau_ext"};
}

void FitOptions::validate() const {
  for (const auto& [iv, name] : {std::pair{a, "a"}, std::pair{log_tau, "log_tau"}, std::pair{b, "b"}}) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw ValidationError(std::string("fit bounds for ") + name + " are empty");
    }
  }
  if (!(b.lo > 0.0)) throw ValidationError("fit bounds for b must stay above 0");
  if (!(a.lo >= 0.0)) throw ValidationError("fit bounds for a must stay >= 0");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(step_tolerance > 0.0) || !(residual_tolerance > 0.0)) throw ValidationError("fit tolerances must be > 0");
  if (init && init->size() != theta_size(model)) throw ValidationError("fit init has the wrong number of parameters");
}

std::vector<Interval> FitOptions::theta_bounds() const {
  if (model == FitModel::SingleLog) return {a, log_tau, b};
  return {a, log_tau, a, log_tau};
}

AgingParams FitResult::single_log(double r0_ohm) const {
  if (model != FitModel::SingleLog) throw ValidationError("fit result is not a single-log fit");
  return AgingParams{theta[0], std::exp(theta[1]), theta[2], r0_ohm};
}

TwoLogParams FitResult::two_log(double r0_ohm) const {
  if (model != FitModel::TwoLog) throw ValidationError("fit result is not a two-log fit");
  return TwoLogParams{theta[0], std::exp(theta[1]), theta[2], std::exp(theta[3]), r0_ohm};
}

double FitResult::value(std::string_view name) const {
  if (model == FitModel::SingleLog) {
    if (name == "a") return theta[0];
    if (name == "log_tau") return theta[1];
    if (name == "tau") return std::exp(theta[1]);
    if (name == "b") return theta[2];
  } else {
    if (name == "a_int") return theta[0];
    if (name == "log_tau_int") return theta[1];
    if (name == "tau_int") return std::exp(theta[1]);
    if (name == "a_ext") return theta[2];
    if (name == "log_tau_ext") return theta[3];
    if (name == "tau_ext") return std::exp(theta[3]);
    if (name == "a") return theta[0] + theta[2];
    if (name == "tau") return effective_tau(two_log());
    if (name == "log_tau") return std::log(effective_tau(two_log()));
  }
  throw ValidationError("unknown fit parameter '" + std::string(name) + "' for " + std::string(model_name(model)));
}

double FitResult::stderr_of(std::string_view name) const {
  if (theta_stderr.size() != theta.size()) return kNaN;
  if (model == FitModel::SingleLog) {
    if (name == "a") return theta_stderr[0];
    if (name == "log_tau") return theta_stderr[1];
    if (name == "tau") return std::exp(theta[1]) * theta_stderr[1];
    if (name == "b") return theta_stderr[2];
  } else {
    if (name == "a_int") return theta_stderr[0];
    if (name == "log_tau_int") return theta_stderr[1];
    if (name == "tau_int") return std::exp(theta[1]) * theta_stderr[1];
    if (name == "a_ext") return theta_stderr[2];
    if (name == "log_tau_ext") return theta_stderr[3];
    if (name == "tau_ext") return std::exp(theta[3]) * theta_stderr[3];
  }
  throw ValidationError("no standard error for '" + std::string(name) + "'");
}

double model_value(FitModel m, std::span<const double> theta, double t_s) {
  if (m == FitModel::SingleLog) {
    return 1.0 + theta[0] * std::log(t_s * std::exp(-theta[1]) + theta[2]);
  }
  return 1.0 + theta[0] * std::log1p(t_s * std::exp(-theta[1])) + theta[2] * std::log1p(t_s * std::exp(-theta[3]));
}

void model_gradient(FitModel m, std::span<const double> theta, double t_s, std::span<double> grad) {
  if (m == FitModel::SingleLog) {
    const double x = t_s * std::exp(-theta[1]);
    const double u = x + theta[2];
    grad[0] = std::log(u);
    grad[1] = -theta[0] * x / u;
    grad[2] = theta[0] / u;
    return;
  }
  const double x1 = t_s * std::exp(-theta[1]);
  const double x2 = t_s * std::exp(-theta[3]);
  grad[0] = std::log1p(x1);
  grad[1] = -theta[0] * x1 / (1.0 + x1);
  grad[2] = std::log1p(x2);
  grad[3] = -theta[2] * x2 / (1.0 + x2);
}

double residual_sum_of_squares(FitModel m, std::span<const double> theta, const Series& series,
                               std::span<const double> weights) {
  double rss = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double r = model_value(m, theta, series[i].t_s) - series[i].y;
    rss += (weights.empty() ? 1.0 : weights[i]) * r * r;
  }
  return rss;
}

std::vector<double> initial_guess(FitModel m, const Series& series, const FitOptions& opts) {
  Series sorted = series;
  std::sort(sorted.begin(), sorted.end(), [](const SeriesPoint& l, const SeriesPoint& r) { return l.t_s < r.t_s; });
  double t_min = 0.0;
  for (const auto& p : sorted) {
    if (p.t_s > 0.0) {
      t_min = p.t_s;
      break;
    }
  }
  const double t_max = sorted.back().t_s;
  const double rise = sorted.back().y - sorted.front().y;
  double a0 = 0.0;
  if (t_min > 0.0 && t_max > t_min) a0 = rise / std::log(t_max / t_min);
  a0 = clamp_to(a0, opts.a);
  const double lt0 = clamp_to(t_min > 0.0 ? std::log(t_min) : opts.log_tau.lo, opts.log_tau);
  if (m == FitModel::SingleLog) return {a0, lt0, clamp_to(1.0, opts.b)};
  const double half = clamp_to(0.5 * a0, opts.a);
  return {half, clamp_to(lt0 + std::log(10.0), opts.log_tau), half, lt0};
}

FitResult fit_from(const Series& series, const FitOptions& opts, std::vector<double> start) {
  const FitModel m = opts.model;
  const auto bounds = opts.theta_bounds();
  const std::span<const double> w(opts.weights);
  const std::size_t p = theta_size(m);
  if (start.size() != p) throw ValidationError("fit start has the wrong number of parameters");
  clamp_theta(start, bounds);

  FitResult result;
  result.model = m;
  result.n_points = static_cast<int>(series.size());
  result.theta = start;
  result.rss = residual_sum_of_squares(m, start, series, w);
  result.init_rss = result.rss;
  if (!std::isfinite(result.rss)) throw DomainError("fit start point gives a non-finite residual");

  const double exact_rss = 1e-30 * static_cast<double>(series.size());
  double lambda = 1e-3;
  std::vector<double> trial(p);

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (result.rss <= exact_rss) {
      result.converged = true;
      break;
    }
    result.iterations = iter + 1;
    const auto lin = linearize(m, result.theta, series, w);
    const Eigen::MatrixXd normal = lin.jac.transpose() * lin.jac;
    const Eigen::VectorXd grad = lin.jac.transpose() * lin.res;

    // Active set: fixed parameters and those pinned at a bound by the descent direction.
    std::vector<std::size_t> free_idx;
    for (std::size_t j = 0; j < p; ++j) {
      const auto& iv = bounds[j];
      if (!(iv.lo < iv.hi)) continue;
      const double v = result.theta[j];
      const auto jj = static_cast<Eigen::Index>(j);
      if (v <= iv.lo && grad(jj) > 0.0) continue;
      if (v >= iv.hi && grad(jj) < 0.0) continue;
      free_idx.push_back(j);
    }
    if (free_idx.empty()) {
      result.converged = true;
      break;
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    Eigen::MatrixXd nf_mat(nf, nf);
    Eigen::VectorXd nf_grad(nf);
    double max_diag = 0.0;
    for (Eigen::Index r = 0; r < nf; ++r) {
      nf_grad(r) = grad(static_cast<Eigen::Index>(free_idx[r]));
      for (Eigen::Index c = 0; c < nf; ++c) {
        nf_mat(r, c) = normal(static_cast<Eigen::Index>(free_idx[r]), static_cast<Eigen::Index>(free_idx[c]));
      }
      max_diag = std::max(max_diag, nf_mat(r, r));
    }
    if (!(max_diag > 0.0)) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    double new_rss = result.rss;
    while (lambda < 1e20) {
      Eigen::MatrixXd damped = nf_mat;
      for (Eigen::Index r = 0; r < nf; ++r) damped(r, r) += lambda * std::max(nf_mat(r, r), 1e-12 * max_diag);
      const Eigen::VectorXd delta = damped.ldlt().solve(-nf_grad);
      trial = result.theta;
      for (Eigen::Index r = 0; r < nf; ++r) trial[free_idx[r]] += delta(r);
      clamp_theta(trial, bounds);
      new_rss = residual_sum_of_squares(m, trial, series, w);
      if (std::isfinite(new_rss) && new_rss < result.rss) {
        accepted = true;
        lambda = std::max(lambda / 3.0, 1e-12);
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      // No damped step lowers the rss: numerically stationary.
      result.converged = true;
      break;
    }

    double step = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      step = std::max(step, std::abs(trial[j] - result.theta[j]));
      scale = std::max(scale, std::abs(result.theta[j]));
    }
    const double drop = result.rss - new_rss;
    const double old_rss = result.rss;
    result.theta = trial;
    result.rss = new_rss;
    if (step <= opts.step_tolerance * (1.0 + scale) || drop <= opts.residual_tolerance * old_rss) {
      result.converged = true;
      break;
    }
  }

  result.at_bound.resize(p);
  for (std::size_t j = 0; j < p; ++j) result.at_bound[j] = on_bound(result.theta[j], bounds[j]);
  fill_stderr(result, series, w, bounds);
  return result;
}

FitResult fit_single_log(const Series& series, const FitOptions& opts_in) {
  FitOptions opts = opts_in;
  opts.model = FitModel::SingleLog;
  opts.validate();
  check_series(series, 4, opts.weights);

  std::vector<std::vector<double>> starts;
  if (opts.init) {
    starts.push_back(*opts.init);
  } else {
    const auto g = initial_guess(FitModel::SingleLog, series, opts);
    starts.push_back(g);
    if (opts.multi_start) {
      for (int k = 2; k <= 8; ++k) {
        const double lt = decade_log(k);
        if (opts.log_tau.contains(lt)) starts.push_back({g[0], lt, g[2]});
      }
    }
  }
  std::optional<FitResult> best;
  for (auto& s : starts) {
    FitResult r = fit_from(series, opts, s);
    if (!best || r.rss < best->rss) best = std::move(r);
  }
  FitResult out = std::move(*best);
  out.init_rss = residual_sum_of_squares(FitModel::SingleLog, starts.front(), series, opts.weights);

  double t_min = std::numeric_limits<double>::infinity(), t_max = 0.0;
  for (const auto& p : series) {
    if (p.t_s > 0.0) t_min = std::min(t_min, p.t_s);
    t_max = std::max(t_max, p.t_s);
  }
  if (!(t_max >= 10.0 * t_min)) out.warnings.push_back("sample times span less than one decade; tau is poorly constrained");
  return out;
}

FitResult fit_two_log(const Series& series, FitOptions opts) {
  opts.model = FitModel::TwoLog;
  opts.validate();
  check_series(series, 6, opts.weights);

  std::vector<std::vector<double>> starts;
  if (opts.init) {
    starts.push_back(*opts.init);
  } else {
    const auto g = initial_guess(FitModel::TwoLog, series, opts);
    starts.push_back(g);
    if (opts.multi_start) {
      for (int hi = 3; hi <= 8; ++hi) {
        for (int lo = 2; lo < hi; ++lo) {
          const double lhi = decade_log(hi), llo = decade_log(lo);
          if (opts.log_tau.contains(lhi) && opts.log_tau.contains(llo)) starts.push_back({g[0], lhi, g[2], llo});
        }
      }
    }
  }
  std::optional<FitResult> best;
  for (auto& s : starts) {
    FitResult r = fit_from(series, opts, s);
    if (!best || r.rss < best->rss) best = std::move(r);
  }
  FitResult out = std::move(*best);
  out.init_rss = residual_sum_of_squares(FitModel::TwoLog, starts.front(), series, opts.weights);
  canonicalize_two_log(out);
  return out;
}

FitResult fit_series(const Series& series, const FitOptions& opts) {
  return opts.model == FitModel::SingleLog ? fit_single_log(series, opts) : fit_two_log(series, opts);
}

// ---------------------------------------------------------------------------

Series junction_series(const std::vector<MeasurementRecord>& records, std::optional<double> r0_override,
                       double* r0_used) {
  std::vector<const MeasurementRecord*> usable;
  for (const auto& r : records) {
    if (r.usable() && std::isfinite(r.r_ohm)) usable.push_back(&r);
  }
  std::sort(usable.begin(), usable.end(),
            [](const MeasurementRecord* l, const MeasurementRecord* r) { return l->t_s < r->t_s; });
  Series s;
  if (usable.empty()) return s;
  const double r0 = r0_override ? *r0_override : usable.front()->r_ohm;
  if (!(r0 > 0.0)) throw DomainError("normalization resistance must be positive");
  if (r0_used) *r0_used = r0;
  for (const auto* r : usable) s.push_back({r->t_s, r->r_ohm / r0});
  return s;
}

ChipFit fit_chip(const ChipDataset& ds, const FitOptions& opts, const ChipFitOptions& chip_opts) {
  ChipFit out;
  out.aggregates = aggregate_series(ds, chip_opts.group_tolerance_s);
  if (static_cast<int>(out.aggregates.size()) < chip_opts.min_points) {
    std::ostringstream os;
    os << "dataset has " << out.aggregates.size() << " distinct time points; at least " << chip_opts.min_points
       << " are needed";
    throw InsufficientDataError(os.str());
  }
  const double r0_avg = chip_opts.r0_override_ohm ? *chip_opts.r0_override_ohm : out.aggregates.front().mean_r_ohm;
  out.average_r0_ohm = r0_avg;
  Series avg;
  for (const auto& row : out.aggregates) avg.push_back({row.t_s, row.mean_r_ohm / r0_avg});
  out.average = fit_series(avg, opts);

  FitOptions jopts = opts;
  if (chip_opts.shared_b && opts.model == FitModel::SingleLog) {
    const double b = out.average.theta[2];
    jopts.b = {b, b};
  }

  for (int id : ds.junction_ids()) {
    const auto records = ds.junction(id);
    JunctionFit jf;
    jf.junction_id = id;
    Series s;
    try {
      s = junction_series(records, chip_opts.r0_override_ohm, &jf.r0_ohm);
    } catch (const std::exception& e) {
      jf.error = e.what();
      out.junctions.push_back(std::move(jf));
      continue;
    }
    if (s.empty()) continue;  // open or excluded throughout
    if (static_cast<int>(s.size()) < chip_opts.min_points) {
      std::ostringstream os;
      os << "junction " << id << " has " << s.size() << " usable points; at least " << chip_opts.min_points
         << " are needed";
      jf.error = os.str();
    } else {
      try {
        jf.result = fit_series(s, jopts);
      } catch (const std::exception& e) {
        jf.error = e.what();
      }
    }
    out.junctions.push_back(std::move(jf));
  }
  return out;
}

// ---------------------------------------------------------------------------

GridAxis GridAxis::linear(double lo, double hi, int n) {
  if (n < 2) throw ValidationError("grid axes need at least 2 nodes");
  GridAxis axis;
  for (int i = 0; i < n; ++i) axis.values.push_back(lo + (hi - lo) * i / (n - 1));
  return axis;
}

GridAxis GridAxis::logarithmic(double lo, double hi, int n) {
  if (n < 2) throw ValidationError("grid axes need at least 2 nodes");
  if (!(lo > 0.0 && hi > 0.0)) throw ValidationError("logarithmic grid axes need positive bounds");
  GridAxis axis;
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < n; ++i) axis.values.push_back(std::exp(l0 + (l1 - l0) * i / (n - 1)));
  return axis;
}

GridResult grid_search_oracle(const Series& series, const GridSpec& grid) {
  const std::size_t p = theta_size(grid.model);
  if (grid.axes.size() != p) throw ValidationError("grid needs one axis per model parameter");
  double nodes = 1.0;
  for (const auto& ax : grid.axes) {
    if (ax.values.empty()) throw ValidationError("grid axis is empty");
    nodes *= static_cast<double>(ax.values.size());
  }
  if (nodes > kMaxGridNodes) {
    std::ostringstream os;
    os << "grid has " << nodes << " nodes (limit " << kMaxGridNodes
       << "); coarsen the axes or refine around a fitted optimum instead";
    throw ValidationError(os.str());
  }
  if (series.empty()) throw InsufficientDataError("grid search needs at least one point");

  // Axes in theta units: timescale axes enter as logarithms.
  std::vector<std::vector<double>> axes(p);
  for (std::size_t j = 0; j < p; ++j) {
    const bool is_tau = (j % 2) == 1;
    for (double v : grid.axes[j].values) {
      if (is_tau && !(v > 0.0)) throw ValidationError("timescale grid values must be positive");
      axes[j].push_back(is_tau ? std::log(v) : v);
    }
  }

  GridResult best;
  best.rss = std::numeric_limits<double>::infinity();
  best.nodes = static_cast<std::size_t>(nodes);
  std::vector<std::size_t> idx(p, 0);
  std::vector<double> theta(p);
  for (;;) {
    for (std::size_t j = 0; j < p; ++j) theta[j] = axes[j][idx[j]];
    const double rss = residual_sum_of_squares(grid.model, theta, series);
    if (rss < best.rss) {
      best.rss = rss;
      best.theta = theta;
    }
    std::size_t j = 0;
    while (j < p && ++idx[j] == axes[j].size()) idx[j++] = 0;
    if (j == p) break;
  }
  return best;
}

// ---------------------------------------------------------------------------

std::vector<HistogramBin> parameter_histogram(const std::vector<FitResult>& results, std::string_view field,
                                              int n_bins) {
  if (results.empty()) throw InsufficientDataError("histogram needs at least one fit result");
  if (n_bins < 1) throw ValidationError("histogram needs at least one bin");
  if (field != "a" && field != "tau" && field != "log_tau" && field != "b") {
    throw ValidationError("unknown histogram field '" + std::string(field) + "' (expected a, tau, log_tau or b)");
  }
  std::vector<double> v;
  v.reserve(results.size());
  for (const auto& r : results) v.push_back(r.value(field));
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  double lo = *mn, hi = *mx;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / n_bins;
  std::vector<HistogramBin> bins(static_cast<std::size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) {
    bins[static_cast<std::size_t>(k)].lo = lo + width * k;
    bins[static_cast<std::size_t>(k)].hi = k + 1 == n_bins ? hi : lo + width * (k + 1);
  }
  for (double x : v) {
    int k = static_cast<int>((x - lo) / width);
    k = std::clamp(k, 0, n_bins - 1);
    ++bins[static_cast<std::size_t>(k)].count;
  }
  return bins;
}

}  // namespace jjage
