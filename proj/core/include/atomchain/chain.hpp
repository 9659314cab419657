#pragma once

#include <numbers>

namespace atomchain {

// Units throughout: rates in Gamma0 (= 1), lengths in lambda0, times in 1/Gamma0.
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTransitionWavenumber = 2.0 * std::numbers::pi;

/// Geometry and atomic constants of an open chain with sites z_n = n a.
struct ChainParams {
  int N = 200;
  double a = 1.0 / 6.0;
  double gamma0 = 1.0;
  double k0 = kTransitionWavenumber;

  /// Throws Error(InvalidParams) on N < 1, a <= 0, or non-unit gamma0/k0 that
  /// are not finite and positive.
  void validate() const;

  double position(int n) const noexcept { return n * a; }
  double zone_edge() const noexcept { return kPi / a; }
  double reciprocal_period() const noexcept { return 2.0 * kPi / a; }
  /// Guided (subradiant) modes exist only for a < lambda0 / 2.
  bool subradiant_regime() const noexcept { return a < 0.5; }

  bool operator==(const ChainParams&) const = default;
};

/// Far-detuned elliptically polarized control field.
struct ControlField {
  double delta = 6.0;   // light shift |Omega|^2 / (2 Delta)
  double theta = 0.0;   // mixing angle, 0 circular, pi/2 linear
  double k_c = kTransitionWavenumber;
  double Delta = 0.0;   // detuning; only enters the omega_shift bookkeeping

  void validate() const;

  /// theta = 2 arctan(E+ / E-).
  static double theta_from_amplitudes(double e_plus, double e_minus);

  /// omega_shift - omega0 = (2 Delta + delta) / 4.
  double shift_frequency() const noexcept { return 0.25 * (2.0 * Delta + delta); }

  bool operator==(const ControlField&) const = default;
};

}  // namespace atomchain
