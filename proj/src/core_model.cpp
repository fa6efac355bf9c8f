#include "jjage/core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "jjage/errors.hpp"

namespace jjage {

namespace {

[[noreturn]] void domain_fail(const std::string& what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  throw DomainError(os.str());
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) domain_fail(std::string(name) + " must be positive and finite", v);
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) domain_fail(std::string(name) + " must be non-negative and finite", v);
}

void require_time(double t_s) {
  if (!(t_s >= 0.0) || !std::isfinite(t_s)) domain_fail("time must be non-negative", t_s);
}

}  // namespace

Environment Environment::of(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::Ambient:
      return {kind, 0.21, 0.60, "ambient"};
    case EnvironmentKind::NitrogenGlovebox:
      return {kind, 0.0, 0.01, "glovebox"};
    case EnvironmentKind::HighVacuum:
      return {kind, 0.0, 0.0, "vacuum"};
  }
  return {};
}

std::string_view environment_name(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::Ambient:
      return "ambient";
    case EnvironmentKind::NitrogenGlovebox:
      return "glovebox";
    case EnvironmentKind::HighVacuum:
      return "vacuum";
  }
  return "unknown";
}

std::optional<EnvironmentKind> parse_environment(std::string_view name) {
  if (name == "ambient" || name == "atmosphere" || name == "air") return EnvironmentKind::Ambient;
  if (name == "glovebox" || name == "n2" || name == "nitrogen") return EnvironmentKind::NitrogenGlovebox;
  if (name == "vacuum") return EnvironmentKind::HighVacuum;
  return std::nullopt;
}

void validate(const AgingParams& p) {
  require_nonnegative(p.a, "a");
  require_positive(p.tau_s, "tau_s");
  require_positive(p.b, "b");
  require_positive(p.r0_ohm, "r0_ohm");
}

void validate(const TwoLogParams& p) {
  require_nonnegative(p.a_int, "a_int");
  require_nonnegative(p.a_ext, "a_ext");
  require_positive(p.tau_int_s, "tau_int_s");
  require_positive(p.tau_ext_s, "tau_ext_s");
  require_positive(p.r0_ohm, "r0_ohm");
}

void validate(const BarrierParams& bp) {
  require_positive(bp.thickness_d_m, "thickness_d_m");
  require_positive(bp.height_U_J, "height_U_J");
  require_positive(bp.mass_m_kg, "mass_m_kg");
}

void validate(const PhysicalConstants& c) {
  require_positive(c.hbar_Js, "hbar_Js");
  require_positive(c.electron_charge_C, "electron_charge_C");
  require_positive(c.gap_delta_J, "gap_delta_J");
}

double eval_single_log(const AgingParams& p, double t_s) {
  validate(p);
  require_time(t_s);
  return 1.0 + p.a * std::log(t_s / p.tau_s + p.b);
}

double eval_two_log(const TwoLogParams& p, double t_s) {
  validate(p);
  require_time(t_s);
  return 1.0 + p.a_int * std::log1p(t_s / p.tau_int_s) + p.a_ext * std::log1p(t_s / p.tau_ext_s);
}

double effective_tau(const TwoLogParams& p) {
  validate(p);
  const double total = p.a_int + p.a_ext;
  if (!(total > 0.0)) domain_fail("effective_tau needs a_int + a_ext > 0", total);
  if (p.a_int == 0.0) return p.tau_ext_s;
  if (p.a_ext == 0.0) return p.tau_int_s;
  const double w_int = p.a_int / total;
  const double w_ext = p.a_ext / total;
  return std::exp(w_int * std::log(p.tau_int_s) + w_ext * std::log(p.tau_ext_s));
}

double barrier_kappa(const BarrierParams& bp, const PhysicalConstants& c) {
  validate(bp);
  validate(c);
  return std::sqrt(2.0 * bp.mass_m_kg * bp.height_U_J) / c.hbar_Js;
}

double resistance_ratio_from_barrier(const BarrierParams& b1, const BarrierParams& b2,
                                     const PhysicalConstants& c) {
  const double x1 = barrier_kappa(b1, c) * b1.thickness_d_m;
  const double x2 = barrier_kappa(b2, c) * b2.thickness_d_m;
  return std::exp(2.0 * (x2 - x1));
}

double critical_current_from_resistance(double r_ohm, const PhysicalConstants& c) {
  require_positive(r_ohm, "resistance");
  validate(c);
  return std::numbers::pi * c.gap_delta_J / (2.0 * c.electron_charge_C * r_ohm);
}

double qubit_frequency_shift(double dr_over_r) {
  if (!(dr_over_r > -1.0) || !std::isfinite(dr_over_r)) domain_fail("dR/R must exceed -1", dr_over_r);
  return 1.0 / std::sqrt(1.0 + dr_over_r) - 1.0;
}

}  // namespace jjage
