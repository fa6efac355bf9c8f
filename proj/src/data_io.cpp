#include "jjage/data_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <sstream>

#include "jjage/errors.hpp"

namespace jjage {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string line_error(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  return os.str();
}

[[noreturn]] void throw_parse_errors(const std::string& header, const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << header << " (" << errors.size() << " error" << (errors.size() == 1 ? "" : "s") << ")";
  for (const auto& e : errors) os << "\n  " << e;
  throw ParseError(os.str());
}

bool is_known_env_label(const std::string& s) {
  return s == "ambient" || s == "glovebox" || s == "vacuum" || s == "unknown";
}

std::vector<int> parse_targets(const std::string& text) {
  std::vector<int> ids;
  for (const auto& part : split(text, ';')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      const auto v = to_integer(part);
      if (!v || *v < 0) throw ValidationError("bad junction id '" + part + "' in targets");
      ids.push_back(static_cast<int>(*v));
    } else {
      const auto lo = to_integer(trim(part.substr(0, dash)));
      const auto hi = to_integer(trim(part.substr(dash + 1)));
      if (!lo || !hi || *lo < 0 || *hi < *lo) throw ValidationError("bad junction range '" + part + "' in targets");
      for (long long k = *lo; k <= *hi; ++k) ids.push_back(static_cast<int>(k));
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::string format_targets(const std::vector<int>& ids) {
  std::string out;
  std::size_t i = 0;
  while (i < ids.size()) {
    std::size_t k = i;
    while (k + 1 < ids.size() && ids[k + 1] == ids[k] + 1) ++k;
    if (!out.empty()) out += ';';
    out += std::to_string(ids[i]);
    if (k > i) out += "-" + std::to_string(ids[k]);
    i = k + 1;
  }
  return out;
}

// JSON helpers that turn type errors into ParseError naming the field.
template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(where + ": unknown field '" + key + "'");
    }
  }
}

EnvironmentKind env_from_json(const json& obj, const std::string& key, const std::string& where) {
  const auto name = get_field<std::string>(obj, key, where);
  const auto kind = parse_environment(name);
  if (!kind) throw ParseError(where + "." + key + ": unknown environment '" + name + "'");
  return *kind;
}

json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

std::optional<double> read_optional_number(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json summary_to_json(const FitSummary& s) {
  json j;
  j["model"] = s.model;
  j["params"] = s.params;
  json se = json::object();
  for (const auto& [k, v] : s.stderr_values) se[k] = optional_number(v);
  j["stderr"] = se;
  j["at_bound"] = s.at_bound;
  j["rss"] = s.rss;
  j["converged"] = s.converged;
  j["n_points"] = s.n_points;
  j["iterations"] = s.iterations;
  j["degenerate_timescales"] = s.degenerate_timescales;
  j["warnings"] = s.warnings;
  return j;
}

FitSummary summary_from_json(const json& j) {
  FitSummary s;
  s.model = j.at("model").get<std::string>();
  s.params = j.at("params").get<std::map<std::string, double>>();
  for (const auto& [k, v] : j.at("stderr").items()) s.stderr_values[k] = read_optional_number(v);
  s.at_bound = j.at("at_bound").get<std::map<std::string, bool>>();
  s.rss = j.at("rss").get<double>();
  s.converged = j.at("converged").get<bool>();
  s.n_points = j.at("n_points").get<int>();
  s.iterations = j.at("iterations").get<int>();
  s.degenerate_timescales = j.at("degenerate_timescales").get<bool>();
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_double(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

// ---------------------------------------------------------------------------

void IVSweep::validate() const {
  if (points.size() < 2) throw InsufficientDataError("I-V sweep needs at least 2 points");
  for (const auto& p : points) {
    if (!std::isfinite(p.current_A) || !std::isfinite(p.voltage_V)) throw ValidationError("I-V sweep has non-finite values");
    if (std::abs(p.current_A) > compliance_A) {
      std::ostringstream os;
      os << "I-V sweep current " << p.current_A << " A exceeds the compliance window of " << compliance_A << " A";
      throw ValidationError(os.str());
    }
  }
}

IVFit resistance_from_iv(const IVSweep& sweep) {
  sweep.validate();
  // Sorted so the sums do not depend on acquisition order.
  auto pts = sweep.points;
  std::sort(pts.begin(), pts.end(), [](const IVPoint& l, const IVPoint& r) {
    return l.current_A != r.current_A ? l.current_A < r.current_A : l.voltage_V < r.voltage_V;
  });
  const double n = static_cast<double>(pts.size());
  double mi = 0.0, mv = 0.0;
  for (const auto& p : pts) {
    mi += p.current_A;
    mv += p.voltage_V;
  }
  mi /= n;
  mv /= n;
  double sii = 0.0, siv = 0.0;
  for (const auto& p : pts) {
    sii += (p.current_A - mi) * (p.current_A - mi);
    siv += (p.current_A - mi) * (p.voltage_V - mv);
  }
  if (!(sii > 0.0)) throw InsufficientDataError("I-V sweep needs at least 2 distinct currents");
  IVFit fit;
  fit.r_ohm = siv / sii;
  fit.offset_V = mv - fit.r_ohm * mi;
  fit.suspect = fit.r_ohm < 0.0;
  return fit;
}

// ---------------------------------------------------------------------------

ChipDataset parse_measurements(std::istream& in, const std::string& source, const LoadOptions& opts) {
  static const std::vector<std::string> kColumns = {"chip_id",         "junction_id", "t_seconds",
                                                    "resistance_ohms", "environment", "flag"};
  ChipDataset ds;
  std::vector<std::string> errors;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_flag = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto cols = split(stripped, ',');
    if (!have_header) {
      const bool five = cols.size() == 5 && std::equal(cols.begin(), cols.end(), kColumns.begin());
      const bool six = cols.size() == 6 && std::equal(cols.begin(), cols.end(), kColumns.begin());
      if (!five && !six) {
        errors.push_back(line_error(source, line_no,
                                    "header must be chip_id,junction_id,t_seconds,resistance_ohms,environment[,flag]"));
        break;
      }
      have_header = true;
      have_flag = six;
      continue;
    }
    const std::size_t expected = have_flag ? 6 : 5;
    if (cols.size() != expected) {
      std::ostringstream os;
      os << "expected " << expected << " columns, got " << cols.size();
      errors.push_back(line_error(source, line_no, os.str()));
      continue;
    }
    MeasurementRecord rec;
    rec.chip_id = cols[0];
    const auto jid = to_integer(cols[1]);
    if (!jid || *jid < 0) {
      errors.push_back(line_error(source, line_no, "junction_id must be a non-negative integer"));
      continue;
    }
    rec.junction_id = static_cast<int>(*jid);
    const auto t = to_double(cols[2]);
    if (!t || !std::isfinite(*t) || *t < 0.0) {
      errors.push_back(line_error(source, line_no, "t_seconds must be a finite number >= 0"));
      continue;
    }
    rec.t_s = *t;
    if (!is_known_env_label(cols[4])) {
      errors.push_back(line_error(source, line_no, "environment must be ambient, glovebox, vacuum or unknown"));
      continue;
    }
    rec.env_label = cols[4];
    const auto flag = parse_flag(have_flag ? cols[5] : std::string());
    if (!flag) {
      errors.push_back(line_error(source, line_no, "flag must be ok, open or excluded"));
      continue;
    }
    rec.flag = *flag;
    if (cols[3].empty()) {
      rec.r_ohm = kNaN;
    } else {
      const auto r = to_double(cols[3]);
      if (!r) {
        errors.push_back(line_error(source, line_no, "resistance_ohms is not a number"));
        continue;
      }
      rec.r_ohm = *r;
    }
    if (!std::isfinite(rec.r_ohm) || rec.r_ohm > opts.open_threshold_ohm) {
      rec.flag = RecordFlag::Open;
    } else if (!(rec.r_ohm > 0.0) && rec.flag != RecordFlag::Open) {
      errors.push_back(line_error(source, line_no, "resistance_ohms must be > 0 unless flagged open"));
      continue;
    }
    ds.records.push_back(std::move(rec));
  }
  if (!have_header && errors.empty()) {
    errors.push_back(line_error(source, line_no == 0 ? 1 : line_no, "missing header line"));
  }
  if (!errors.empty()) throw_parse_errors("malformed measurement file " + source, errors);
  ds.sort();
  return ds;
}

ChipDataset load_measurements(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open measurement file '" + path.string() + "'");
  return parse_measurements(in, path.string(), opts);
}

std::string format_measurements(const ChipDataset& ds) {
  std::string out = "chip_id,junction_id,t_seconds,resistance_ohms,environment,flag\n";
  for (const auto& r : ds.records) {
    out += r.chip_id;
    out += ',';
    out += std::to_string(r.junction_id);
    out += ',';
    out += format_double(r.t_s);
    out += ',';
    out += format_double(r.r_ohm);
    out += ',';
    out += r.env_label;
    out += ',';
    out += flag_name(r.flag);
    out += '\n';
  }
  return out;
}

void write_measurements(const ChipDataset& ds, const std::filesystem::path& path) {
  write_text_file(path, format_measurements(ds));
}

// ---------------------------------------------------------------------------

ScheduleFile parse_schedule(std::istream& in, const std::string& source) {
  ScheduleFile file;
  std::vector<std::string> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (const auto hash = stripped.find('#'); hash != std::string::npos) stripped = trim(stripped.substr(0, hash));
    if (stripped.empty()) continue;
    const auto cols = split(stripped, ',');
    if (cols.size() == 2 && cols[0] == "start_days") continue;  // optional header

    if (cols[0] == "event") {
      if (cols.size() != 6 && cols.size() != 7) {
        errors.push_back(line_error(source, line_no, "event lines are event,t_days,kind,arg1,arg2,arg3[,targets]"));
        continue;
      }
      const auto t_days = to_double(cols[1]);
      if (!t_days || *t_days < 0.0) {
        errors.push_back(line_error(source, line_no, "event t_days must be a number >= 0"));
        continue;
      }
      AnnealEvent ev;
      ev.t_s = *t_days * kSecondsPerDay;
      try {
        if (cols[2] == "voltage") {
          const auto n = to_integer(cols[3]);
          const auto amp = to_double(cols[4]);
          const auto dur = to_double(cols[5]);
          if (!n || !amp || !dur) throw ValidationError("voltage args are n_pulses,amplitude_V,pulse_duration_s");
          ev.kind = VoltageAnneal{static_cast<int>(*n), *amp, *dur};
        } else if (cols[2] == "thermal") {
          const auto temp = to_double(cols[3]);
          const auto env = parse_environment(cols[4]);
          const auto hold = to_double(cols[5]);
          if (!temp || !env || !hold) throw ValidationError("thermal args are temp_C,environment,hold_min");
          ev.kind = ThermalAnneal{*temp, Environment::of(*env), *hold};
        } else {
          throw ValidationError("unknown event kind '" + cols[2] + "' (expected voltage or thermal)");
        }
        if (cols.size() == 7) ev.targets = parse_targets(cols[6]);
        ev.validate();
      } catch (const ValidationError& e) {
        errors.push_back(line_error(source, line_no, e.what()));
        continue;
      }
      file.events.push_back(std::move(ev));
      continue;
    }

    if (cols.size() != 2) {
      errors.push_back(line_error(source, line_no, "segment lines are start_days,environment"));
      continue;
    }
    const auto start = to_double(cols[0]);
    const auto env = parse_environment(cols[1]);
    if (!start || !std::isfinite(*start)) {
      errors.push_back(line_error(source, line_no, "start_days must be a number"));
      continue;
    }
    if (!env) {
      errors.push_back(line_error(source, line_no, "unknown environment '" + cols[1] + "'"));
      continue;
    }
    const double start_s = *start * kSecondsPerDay;
    if (file.schedule.segments.empty() && start_s != 0.0) {
      errors.push_back(line_error(source, line_no, "first segment must start at day 0"));
      continue;
    }
    if (!file.schedule.segments.empty() && !(start_s > file.schedule.segments.back().start_t_s)) {
      errors.push_back(line_error(source, line_no, "segment start times must be strictly increasing"));
      continue;
    }
    file.schedule.segments.push_back({start_s, Environment::of(*env)});
  }
  if (!errors.empty()) throw_parse_errors("malformed schedule file " + source, errors);
  std::stable_sort(file.events.begin(), file.events.end(),
                   [](const AnnealEvent& l, const AnnealEvent& r) { return l.t_s < r.t_s; });
  return file;
}

ScheduleFile load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schedule file '" + path.string() + "'");
  return parse_schedule(in, path.string());
}

std::string format_schedule(const ScheduleFile& file) {
  std::string out = "start_days,environment\n";
  for (const auto& seg : file.schedule.segments) {
    out += format_double(seg.start_t_s / kSecondsPerDay) + "," + std::string(environment_name(seg.env.kind)) + "\n";
  }
  for (const auto& ev : file.events) {
    out += "event," + format_double(ev.t_s / kSecondsPerDay) + ",";
    if (const auto* v = std::get_if<VoltageAnneal>(&ev.kind)) {
      out += "voltage," + std::to_string(v->n_pulses) + "," + format_double(v->amplitude_V) + "," +
             format_double(v->pulse_duration_s);
    } else {
      const auto& th = std::get<ThermalAnneal>(ev.kind);
      out += "thermal," + format_double(th.temp_C) + "," + std::string(environment_name(th.env.kind)) + "," +
             format_double(th.hold_min);
    }
    if (!ev.targets.empty()) out += "," + format_targets(ev.targets);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

ChipScenario parse_chip_spec(const std::string& json_text, ChipScenario base, const std::string& source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  check_keys(root, {"chip", "sim"}, source);

  if (root.contains("chip")) {
    const auto& c = root["chip"];
    const std::string where = source + ": chip";
    check_keys(c,
               {"chip_id", "n_junctions", "r0_mean_ohm", "r0_cv", "a_mean", "a_sd", "log_tau_mean", "tau_median_s",
                "log_tau_sd", "b_mean", "b_sd", "open_prob", "noise_sigma"},
               where);
    auto& s = base.spec;
    if (c.contains("chip_id")) s.chip_id = get_field<std::string>(c, "chip_id", where);
    if (c.contains("n_junctions")) s.n_junctions = get_field<int>(c, "n_junctions", where);
    if (c.contains("r0_mean_ohm")) s.r0_mean_ohm = get_field<double>(c, "r0_mean_ohm", where);
    if (c.contains("r0_cv")) s.r0_cv = get_field<double>(c, "r0_cv", where);
    if (c.contains("a_mean")) s.a_mean = get_field<double>(c, "a_mean", where);
    if (c.contains("a_sd")) s.a_sd = get_field<double>(c, "a_sd", where);
    if (c.contains("log_tau_mean")) s.log_tau_mean = get_field<double>(c, "log_tau_mean", where);
    if (c.contains("tau_median_s")) {
      const double tau = get_field<double>(c, "tau_median_s", where);
      if (!(tau > 0.0)) throw ParseError(where + ".tau_median_s: must be > 0");
      s.log_tau_mean = std::log(tau);
    }
    if (c.contains("log_tau_sd")) s.log_tau_sd = get_field<double>(c, "log_tau_sd", where);
    if (c.contains("b_mean")) s.b_mean = get_field<double>(c, "b_mean", where);
    if (c.contains("b_sd")) s.b_sd = get_field<double>(c, "b_sd", where);
    if (c.contains("open_prob")) s.open_prob = get_field<double>(c, "open_prob", where);
    if (c.contains("noise_sigma")) s.noise_sigma = get_field<double>(c, "noise_sigma", where);
  }

  if (root.contains("sim")) {
    const auto& m = root["sim"];
    const std::string where = source + ": sim";
    check_keys(m,
               {"fab_a", "fab_b", "env_tau_s", "relax_gas_gas_days", "relax_vacuum_to_gas_days",
                "relax_gas_to_vacuum_days", "thermal_response", "voltage_response", "floor_at_r0", "integration_dt_s",
                "session_exposure_min", "measurement_exposure_min"},
               where);
    auto& cfg = base.cfg;
    if (m.contains("fab_a")) cfg.fab_a = get_field<double>(m, "fab_a", where);
    if (m.contains("fab_b")) cfg.fab_b = get_field<double>(m, "fab_b", where);
    if (m.contains("env_tau_s")) {
      const auto& taus = m["env_tau_s"];
      if (!taus.is_object()) throw ParseError(where + ".env_tau_s: expected an object");
      for (const auto& [name, value] : taus.items()) {
        const auto kind = parse_environment(name);
        if (!kind) throw ParseError(where + ".env_tau_s: unknown environment '" + name + "'");
        cfg.env_tau_s[*kind] = get_field<double>(taus, name, where + ".env_tau_s");
      }
    }
    if (m.contains("relax_gas_gas_days"))
      cfg.relax.gas_gas_s = get_field<double>(m, "relax_gas_gas_days", where) * kSecondsPerDay;
    if (m.contains("relax_vacuum_to_gas_days"))
      cfg.relax.vacuum_to_gas_s = get_field<double>(m, "relax_vacuum_to_gas_days", where) * kSecondsPerDay;
    if (m.contains("relax_gas_to_vacuum_days"))
      cfg.relax.gas_to_vacuum_s = get_field<double>(m, "relax_gas_to_vacuum_days", where) * kSecondsPerDay;
    if (m.contains("thermal_response")) {
      const auto& arr = m["thermal_response"];
      if (!arr.is_array()) throw ParseError(where + ".thermal_response: expected an array");
      cfg.thermal_response.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = where + ".thermal_response[" + std::to_string(i) + "]";
        check_keys(arr[i], {"temp_c", "environment", "fraction"}, w);
        cfg.thermal_response.push_back({get_field<double>(arr[i], "temp_c", w), env_from_json(arr[i], "environment", w),
                                        get_field<double>(arr[i], "fraction", w)});
      }
    }
    if (m.contains("voltage_response")) {
      const auto& v = m["voltage_response"];
      const std::string w = where + ".voltage_response";
      check_keys(v, {"mean", "sd", "post_a", "post_tau_s"}, w);
      if (v.contains("mean")) cfg.voltage_response.mean = get_field<double>(v, "mean", w);
      if (v.contains("sd")) cfg.voltage_response.sd = get_field<double>(v, "sd", w);
      if (v.contains("post_a")) cfg.voltage_response.post_a = get_field<double>(v, "post_a", w);
      if (v.contains("post_tau_s")) cfg.voltage_response.post_tau_s = get_field<double>(v, "post_tau_s", w);
    }
    if (m.contains("floor_at_r0")) cfg.floor_at_r0 = get_field<bool>(m, "floor_at_r0", where);
    if (m.contains("integration_dt_s")) cfg.integration_dt_s = get_field<double>(m, "integration_dt_s", where);
    if (m.contains("session_exposure_min"))
      cfg.session_exposure_s = get_field<double>(m, "session_exposure_min", where) * 60.0;
    if (m.contains("measurement_exposure_min"))
      cfg.measurement_exposure_s = get_field<double>(m, "measurement_exposure_min", where) * 60.0;
  }
  return base;
}

ChipScenario load_chip_spec(const std::filesystem::path& path, ChipScenario base) {
  return parse_chip_spec(read_text_file(path), std::move(base), path.string());
}

// ---------------------------------------------------------------------------

FitSummary summarize(const FitResult& r) {
  FitSummary s;
  s.model = std::string(model_name(r.model));
  const std::vector<std::string> reported =
      r.model == FitModel::SingleLog ? std::vector<std::string>{"a", "tau", "log_tau", "b"}
                                     : std::vector<std::string>{"a_int", "tau_int", "a_ext", "tau_ext"};
  for (const auto& name : reported) {
    s.params[name] = r.value(name);
    const double se = r.stderr_of(name);
    s.stderr_values[name] = std::isfinite(se) ? std::optional<double>(se) : std::nullopt;
  }
  if (r.model == FitModel::TwoLog) s.params["tau_eff"] = r.value("tau");
  const auto names = theta_names(r.model);
  for (std::size_t j = 0; j < names.size() && j < r.at_bound.size(); ++j) s.at_bound[names[j]] = r.at_bound[j];
  s.rss = r.rss;
  s.converged = r.converged;
  s.n_points = r.n_points;
  s.iterations = r.iterations;
  s.degenerate_timescales = r.degenerate_timescales;
  s.warnings = r.warnings;
  return s;
}

FitReport make_report(const ChipDataset& ds, const ChipFit& fit, int histogram_bins) {
  FitReport rep;
  const auto ids = ds.junction_ids();
  rep.chip.chip_id = ds.records.empty() ? std::string() : ds.records.front().chip_id;
  rep.chip.n_junctions = static_cast<int>(ids.size());
  rep.chip.n_records = static_cast<int>(ds.records.size());
  rep.chip.t_first_s = std::numeric_limits<double>::infinity();
  rep.chip.t_last_s = -std::numeric_limits<double>::infinity();
  for (int id : ids) {
    bool any = false;
    for (const auto& r : ds.records) {
      if (r.junction_id == id && r.usable()) any = true;
    }
    if (!any) ++rep.chip.n_open;
  }
  for (const auto& r : ds.records) {
    if (!r.usable()) continue;
    rep.chip.t_first_s = std::min(rep.chip.t_first_s, r.t_s);
    if (r.t_s >= rep.chip.t_last_s) {
      rep.chip.t_last_s = r.t_s;
      rep.chip.last_environment = r.env_label;
    }
  }
  if (!fit.aggregates.empty()) rep.chip.last_mean_r_ohm = fit.aggregates.back().mean_r_ohm;

  std::vector<FitResult> converged;
  for (const auto& jf : fit.junctions) {
    JunctionSummary js;
    js.junction_id = jf.junction_id;
    js.r0_ohm = jf.r0_ohm;
    js.error = jf.error;
    if (jf.result) {
      js.fit = summarize(*jf.result);
      if (jf.result->converged) converged.push_back(*jf.result);
    }
    rep.junctions.push_back(std::move(js));
  }
  rep.average = summarize(fit.average);
  rep.average_r0_ohm = fit.average_r0_ohm;
  for (const auto& row : fit.aggregates) {
    rep.aggregates.push_back(
        {row.t_s, row.mean_r_ohm, row.cv_defined() ? std::optional<double>(row.cv) : std::nullopt, row.n_used});
  }
  if (!converged.empty()) {
    std::vector<std::string> fields = {"a", "tau", "log_tau"};
    if (fit.average.model == FitModel::SingleLog) fields.push_back("b");
    for (const auto& f : fields) rep.histograms[f] = parameter_histogram(converged, f, histogram_bins);
  }
  return rep;
}

std::string format_report(const FitReport& report) {
  json j;
  j["schema_version"] = report.schema_version;
  const auto& c = report.chip;
  j["chip"] = {{"chip_id", c.chip_id},
               {"n_junctions", c.n_junctions},
               {"n_records", c.n_records},
               {"n_open", c.n_open},
               {"t_first_s", c.t_first_s},
               {"t_last_s", c.t_last_s},
               {"last_environment", c.last_environment},
               {"last_mean_r_ohm", c.last_mean_r_ohm}};
  json juncs = json::array();
  for (const auto& js : report.junctions) {
    json e = {{"junction_id", js.junction_id}, {"r0_ohm", js.r0_ohm}, {"error", js.error}};
    e["fit"] = js.fit ? summary_to_json(*js.fit) : json(nullptr);
    juncs.push_back(std::move(e));
  }
  j["junctions"] = std::move(juncs);
  j["average"] = summary_to_json(report.average);
  j["average_r0_ohm"] = report.average_r0_ohm;
  json aggs = json::array();
  for (const auto& a : report.aggregates) {
    aggs.push_back({{"t_s", a.t_s}, {"mean_r_ohm", a.mean_r_ohm}, {"cv", optional_number(a.cv)}, {"n_used", a.n_used}});
  }
  j["aggregates"] = std::move(aggs);
  json hists = json::object();
  for (const auto& [field, bins] : report.histograms) {
    json arr = json::array();
    for (const auto& b : bins) arr.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    hists[field] = std::move(arr);
  }
  j["histograms"] = std::move(hists);
  json inputs = json::array();
  for (const auto& in : report.provenance.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
  j["provenance"] = {{"inputs", inputs},
                     {"tool_version", report.provenance.tool_version},
                     {"config_digest", report.provenance.config_digest}};
  j["provenance"]["seed"] = report.provenance.seed ? json(*report.provenance.seed) : json(nullptr);
  return j.dump(2) + "\n";
}

FitReport parse_report(const std::string& json_text, const std::string& source) {
  try {
    const json j = json::parse(json_text);
    FitReport rep;
    rep.schema_version = j.at("schema_version").get<int>();
    if (rep.schema_version != kReportSchemaVersion) {
      throw ParseError(source + ": unsupported schema_version " + std::to_string(rep.schema_version));
    }
    const auto& c = j.at("chip");
    rep.chip.chip_id = c.at("chip_id").get<std::string>();
    rep.chip.n_junctions = c.at("n_junctions").get<int>();
    rep.chip.n_records = c.at("n_records").get<int>();
    rep.chip.n_open = c.at("n_open").get<int>();
    rep.chip.t_first_s = c.at("t_first_s").get<double>();
    rep.chip.t_last_s = c.at("t_last_s").get<double>();
    rep.chip.last_environment = c.at("last_environment").get<std::string>();
    rep.chip.last_mean_r_ohm = c.at("last_mean_r_ohm").get<double>();
    for (const auto& e : j.at("junctions")) {
      JunctionSummary js;
      js.junction_id = e.at("junction_id").get<int>();
      js.r0_ohm = e.at("r0_ohm").get<double>();
      js.error = e.at("error").get<std::string>();
      if (!e.at("fit").is_null()) js.fit = summary_from_json(e.at("fit"));
      rep.junctions.push_back(std::move(js));
    }
    rep.average = summary_from_json(j.at("average"));
    rep.average_r0_ohm = j.at("average_r0_ohm").get<double>();
    for (const auto& a : j.at("aggregates")) {
      rep.aggregates.push_back({a.at("t_s").get<double>(), a.at("mean_r_ohm").get<double>(),
                                read_optional_number(a.at("cv")), a.at("n_used").get<int>()});
    }
    for (const auto& [field, arr] : j.at("histograms").items()) {
      auto& bins = rep.histograms[field];
      for (const auto& b : arr) bins.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("count").get<int>()});
    }
    const auto& p = j.at("provenance");
    for (const auto& in : p.at("inputs")) {
      rep.provenance.inputs.push_back({in.at("path").get<std::string>(), in.at("sha256").get<std::string>()});
    }
    rep.provenance.tool_version = p.at("tool_version").get<std::string>();
    rep.provenance.config_digest = p.at("config_digest").get<std::string>();
    if (!p.at("seed").is_null()) rep.provenance.seed = p.at("seed").get<std::uint64_t>();
    return rep;
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
}

void write_report(const FitReport& report, const std::filesystem::path& path) {
  write_text_file(path, format_report(report));
}

FitReport read_report(const std::filesystem::path& path) { return parse_report(read_text_file(path), path.string()); }

// ---------------------------------------------------------------------------

std::string format_plot_data(const std::vector<PlotPoint>& points) {
  std::string out = "series_id,t_days,value\n";
  for (const auto& p : points) out += p.series_id + "," + format_double(p.t_days) + "," + format_double(p.value) + "\n";
  return out;
}

void export_plot_data(const std::vector<PlotPoint>& points, const std::filesystem::path& path) {
  write_text_file(path, format_plot_data(points));
}

}  // namespace jjage
