#include "jjage/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jjage/errors.hpp"
#include "jjage/rng.hpp"

namespace jjage {

namespace {

double truncated_positive(Rng& rng, double mean, double sd) {
  if (sd == 0.0) return mean;
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal(mean, sd);
    if (v > 0.0) return v;
  }
  throw ValidationError("truncated normal draw failed: mean is too many sd below zero");
}

}  // namespace

void ChipSpec::validate() const {
  auto fail = [&](const std::string& field, const std::string& rule) {
    throw ValidationError("chip spec '" + chip_id + "': " + field + " " + rule);
  };
  if (n_junctions < 1) fail("n_junctions", "must be >= 1");
  if (!(r0_mean_ohm > 0.0)) fail("r0_mean_ohm", "must be > 0");
  if (!(r0_cv >= 0.0)) fail("r0_cv", "must be >= 0");
  if (!(a_mean >= 0.0)) fail("a_mean", "must be >= 0");
  if (!(a_sd >= 0.0)) fail("a_sd", "must be >= 0");
  if (!std::isfinite(log_tau_mean)) fail("log_tau_mean", "must be finite");
  if (!(log_tau_sd >= 0.0)) fail("log_tau_sd", "must be >= 0");
  if (!(b_mean > 0.0)) fail("b_mean", "must be > 0");
  if (!(b_sd >= 0.0)) fail("b_sd", "must be >= 0");
  if (!(open_prob >= 0.0 && open_prob < 1.0)) fail("open_prob", "must lie in [0, 1)");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma", "must be >= 0");
}

std::string_view flag_name(RecordFlag f) {
  switch (f) {
    case RecordFlag::Ok:
      return "ok";
    case RecordFlag::Open:
      return "open";
    case RecordFlag::Excluded:
      return "excluded";
  }
  return "ok";
}

std::optional<RecordFlag> parse_flag(std::string_view name) {
  if (name.empty() || name == "ok") return RecordFlag::Ok;
  if (name == "open") return RecordFlag::Open;
  if (name == "excluded") return RecordFlag::Excluded;
  return std::nullopt;
}

void ChipDataset::sort() {
  std::stable_sort(records.begin(), records.end(), [](const MeasurementRecord& l, const MeasurementRecord& r) {
    if (l.junction_id != r.junction_id) return l.junction_id < r.junction_id;
    return l.t_s < r.t_s;
  });
}

std::vector<int> ChipDataset::junction_ids() const {
  std::vector<int> ids;
  for (const auto& r : records) ids.push_back(r.junction_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<MeasurementRecord> ChipDataset::junction(int junction_id) const {
  std::vector<MeasurementRecord> out;
  for (const auto& r : records) {
    if (r.junction_id == junction_id) out.push_back(r);
  }
  return out;
}

DrawnChip draw_chip(const ChipSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  DrawnChip chip;
  chip.spec = spec;
  chip.junctions.reserve(static_cast<std::size_t>(spec.n_junctions));
  for (int id = 0; id < spec.n_junctions; ++id) {
    DrawnJunction j;
    j.junction_id = id;
    j.params.r0_ohm = truncated_positive(rng, spec.r0_mean_ohm, spec.r0_cv * spec.r0_mean_ohm);
    j.params.a = truncated_positive(rng, spec.a_mean, spec.a_sd);
    const double log_tau = rng.normal(spec.log_tau_mean, spec.log_tau_sd);
    j.params.tau_s = std::exp(log_tau);
    j.tau_scale = std::exp(log_tau - spec.log_tau_mean);
    j.params.b = truncated_positive(rng, spec.b_mean, spec.b_sd);
    j.open = spec.open_prob > 0.0 && rng.bernoulli(spec.open_prob);
    chip.junctions.push_back(j);
  }
  return chip;
}

SimConfig junction_config(const SimConfig& cfg, const DrawnJunction& j) {
  SimConfig out = cfg;
  out.fab_a = j.params.a;
  out.fab_b = j.params.b;
  for (auto& [kind, tau] : out.env_tau_s) tau *= j.tau_scale;
  return out;
}

ChipDataset simulate_chip(const DrawnChip& chip, const StorageSchedule& schedule,
                          const std::vector<AnnealEvent>& events, const std::vector<double>& sample_t_s,
                          const SimConfig& cfg, std::uint64_t seed) {
  chip.spec.validate();
  schedule.validate();
  Rng master(seed);
  ChipDataset ds;
  ds.spec = chip.spec;
  ds.schedule = schedule;
  ds.records.reserve(chip.junctions.size() * sample_t_s.size());

  for (const auto& j : chip.junctions) {
    // Streams are drawn for every junction, open or not, so that toggling one
    // junction's yield leaves the others' realizations unchanged.
    const std::uint64_t traj_seed = static_cast<std::uint64_t>(master.uniform() * 0x1.0p53);
    Rng noise = master.split();

    if (j.open) {
      for (double t : sample_t_s) {
        ds.records.push_back({chip.spec.chip_id, j.junction_id, t, std::numeric_limits<double>::quiet_NaN(),
                              schedule.at(t).label, RecordFlag::Open});
      }
      continue;
    }
    const SimConfig jcfg = junction_config(cfg, j);
    const auto samples =
        simulate_trajectory(schedule, events, jcfg, j.params.r0_ohm, sample_t_s, {j.junction_id, traj_seed});
    for (const auto& s : samples) {
      const double eta = chip.spec.noise_sigma > 0.0 ? noise.normal(0.0, chip.spec.noise_sigma) : 0.0;
      ds.records.push_back(
          {chip.spec.chip_id, j.junction_id, s.t_s, s.r_ohm * (1.0 + eta), schedule.at(s.t_s).label, RecordFlag::Ok});
    }
  }
  ds.sort();
  return ds;
}

double coefficient_of_variation(std::span<const double> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    sum += v;
    ++n;
  }
  if (n < 2) throw InsufficientDataError("coefficient of variation needs at least 2 usable values");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / static_cast<double>(n - 1)) / mean;
}

double coefficient_of_variation(std::span<const MeasurementRecord> records) {
  std::vector<double> values;
  for (const auto& r : records) {
    if (r.usable()) values.push_back(r.r_ohm);
  }
  return coefficient_of_variation(std::span<const double>(values));
}

std::vector<AggregateRow> aggregate_series(const ChipDataset& ds, double tolerance_s) {
  std::vector<const MeasurementRecord*> usable;
  for (const auto& r : ds.records) {
    if (r.usable() && std::isfinite(r.r_ohm)) usable.push_back(&r);
  }
  if (usable.empty()) throw InsufficientDataError("aggregate_series: dataset has no usable records");
  // Stable on (t, junction) so the reduction order does not depend on input order.
  std::sort(usable.begin(), usable.end(), [](const MeasurementRecord* l, const MeasurementRecord* r) {
    if (l->t_s != r->t_s) return l->t_s < r->t_s;
    return l->junction_id < r->junction_id;
  });

  std::vector<AggregateRow> rows;
  std::size_t i = 0;
  while (i < usable.size()) {
    const double anchor = usable[i]->t_s;
    std::size_t k = i;
    std::vector<double> values;
    double t_sum = 0.0;
    while (k < usable.size() && usable[k]->t_s - anchor <= tolerance_s) {
      values.push_back(usable[k]->r_ohm);
      t_sum += usable[k]->t_s;
      ++k;
    }
    // Sorted values make the sums independent of junction labelling.
    std::sort(values.begin(), values.end());
    AggregateRow row;
    row.n_used = static_cast<int>(values.size());
    row.t_s = t_sum / static_cast<double>(values.size());
    row.mean_r_ohm = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    row.cv = row.n_used >= 2 ? coefficient_of_variation(std::span<const double>(values))
                             : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
    i = k;
  }
  return rows;
}

}  // namespace jjage
