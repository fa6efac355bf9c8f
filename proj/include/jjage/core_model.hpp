#pragma once

// Closed-form junction aging models and the resistance -> critical current ->
// qubit frequency chain. Everything here is pure; times are seconds since the
// end of liftoff.

#include <optional>
#include <string>
#include <string_view>

namespace jjage {

inline constexpr double kSecondsPerDay = 86400.0;

/// Single logarithm aging law: R(t)/R0 = 1 + a ln(t/tau + b).
struct AgingParams {
  double a = 0.0;
  double tau_s = 1.0;
  double b = 1.0;
  double r0_ohm = 1.0;
};

/// Intrinsic plus environment-coupled logarithmic channels.
struct TwoLogParams {
  double a_int = 0.0;
  double tau_int_s = 1.0;
  double a_ext = 0.0;
  double tau_ext_s = 1.0;
  double r0_ohm = 1.0;
};

enum class EnvironmentKind { Ambient, NitrogenGlovebox, HighVacuum };

struct Environment {
  EnvironmentKind kind = EnvironmentKind::Ambient;
  double o2_fraction = 0.21;
  double rel_humidity = 0.60;
  std::string label = "ambient";

  /// Storage conditions with the lab defaults for each kind.
  static Environment of(EnvironmentKind kind);

  friend bool operator==(const Environment&, const Environment&) = default;
};

/// Canonical lower-case name used in files: ambient, glovebox, vacuum.
std::string_view environment_name(EnvironmentKind kind);
/// Accepts canonical names plus the aliases n2/nitrogen (glovebox) and atmosphere/air (ambient).
std::optional<EnvironmentKind> parse_environment(std::string_view name);

struct BarrierParams {
  double thickness_d_m = 1.0e-9;
  double height_U_J = 0.0;
  double mass_m_kg = 0.0;
};

struct PhysicalConstants {
  double hbar_Js = 1.054571817e-34;
  double electron_charge_C = 1.602176634e-19;
  // Aluminium gap; a configuration input.
  double gap_delta_J = 180.0e-6 * 1.602176634e-19;
};

inline constexpr double kElectronMassKg = 9.1093837015e-31;
inline constexpr double kElectronVoltJ = 1.602176634e-19;

void validate(const AgingParams& p);
void validate(const TwoLogParams& p);
void validate(const BarrierParams& bp);
void validate(const PhysicalConstants& c);

/// 1 + a ln(t/tau + b). Throws DomainError on invalid params or t < 0.
double eval_single_log(const AgingParams& p, double t_s);

/// 1 + a_int ln(1 + t/tau_int) + a_ext ln(1 + t/tau_ext).
double eval_two_log(const TwoLogParams& p, double t_s);

/// Amplitude-weighted geometric mean of the two timescales, evaluated in log space.
double effective_tau(const TwoLogParams& p);

/// sqrt(2 m U) / hbar in inverse meters.
double barrier_kappa(const BarrierParams& bp, const PhysicalConstants& c);

/// R2/R1 = exp(2 (kappa2 d2 - kappa1 d1)). Only ratios are meaningful since the
/// tunneling prefactor is unknown.
double resistance_ratio_from_barrier(const BarrierParams& b1, const BarrierParams& b2,
                                     const PhysicalConstants& c);

/// Zero-temperature Ambegaokar-Baratoff: Ic = pi Delta / (2 e R).
double critical_current_from_resistance(double r_ohm, const PhysicalConstants& c);

/// delta f / f = (1 + dR/R)^(-1/2) - 1 for a transmon (f ~ sqrt(Ic)).
double qubit_frequency_shift(double dr_over_r);

}  // namespace jjage
