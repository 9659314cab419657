#include "atomchain/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "atomchain/error.hpp"

namespace atomchain::specfun {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kZeta3 = 1.2020569031595942853997;
constexpr int kTerms = 40;

double zeta_even(int n) {
  // zeta(2n); exact for small n, direct sum with a negligible tail otherwise.
  switch (n) {
    case 1: return kPi * kPi / 6.0;
    case 2: return std::pow(kPi, 4) / 90.0;
    case 3: return std::pow(kPi, 6) / 945.0;
    case 4: return std::pow(kPi, 8) / 9450.0;
    case 5: return std::pow(kPi, 10) / 93555.0;
    default: break;
  }
  double sum = 0.0;
  for (int j = 60; j >= 1; --j) sum += std::pow(static_cast<double>(j), -2.0 * n);
  return sum;
}

// c_n = |B_2n| / (2n (2n+1)!) = 2 zeta(2n) / ((2 pi)^{2n} 2n (2n+1)).
const std::array<double, kTerms + 1>& clausen_coefficients() {
  static const std::array<double, kTerms + 1> table = [] {
    std::array<double, kTerms + 1> c{};
    for (int n = 1; n <= kTerms; ++n) {
      c[n] = 2.0 * zeta_even(n) /
             (std::pow(kTwoPi, 2 * n) * (2.0 * n) * (2.0 * n + 1.0));
    }
    return c;
  }();
  return table;
}

// Cl_2 on [0, pi].
double clausen2_folded(double phi) {
  if (phi == 0.0) return 0.0;
  const auto& c = clausen_coefficients();
  const double phi2 = phi * phi;
  double power = phi * phi2;  // phi^{2n+1}
  double tail = 0.0;
  for (int n = 1; n <= kTerms; ++n) {
    const double term = c[n] * power;
    tail += term;
    if (term < 1e-17 * std::abs(tail)) break;
    power *= phi2;
  }
  return phi - phi * std::log(phi) + tail;
}

// sum cos(k phi)/k^3 on [0, pi]: zeta(3) minus the integral of Cl_2.
double cosine_sum3_folded(double phi) {
  if (phi == 0.0) return kZeta3;
  const auto& c = clausen_coefficients();
  const double phi2 = phi * phi;
  double power = phi2 * phi2;  // phi^{2n+2}
  double tail = 0.0;
  for (int n = 1; n <= kTerms; ++n) {
    const double term = c[n] * power / (2.0 * n + 2.0);
    tail += term;
    if (term < 1e-17 * std::abs(tail)) break;
    power *= phi2;
  }
  return kZeta3 - 0.75 * phi2 + 0.5 * phi2 * std::log(phi) - tail;
}

void check_order(int m, int lo) {
  if (m < lo || m > 3) {
    throw Error(ErrorKind::InvalidOrder,
                "polylog order " + std::to_string(m) + " outside supported range");
  }
}

void check_singular(const PhaseAngle& phi, const char* what) {
  if (phi.distance_to_origin() < kSingularityGuard) {
    throw Error(ErrorKind::SingularPoint,
                std::string(what) + " diverges at phi = 0 (mod 2 pi)");
  }
}

}  // namespace

PhaseAngle::PhaseAngle(double phi) {
  if (!std::isfinite(phi)) {
    throw Error(ErrorKind::InvalidParams, "phase angle must be finite");
  }
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  phi_ = r;
}

double PhaseAngle::distance_to_origin() const noexcept {
  return std::min(phi_, kTwoPi - phi_);
}

double clausen2(double phi) {
  const double r = PhaseAngle(phi).value();
  return r <= kPi ? clausen2_folded(r) : -clausen2_folded(kTwoPi - r);
}

double cosine_sum3(double phi) {
  const double r = PhaseAngle(phi).value();
  return r <= kPi ? cosine_sum3_folded(r) : cosine_sum3_folded(kTwoPi - r);
}

cplx polylog_unit_circle(int m, PhaseAngle phi) {
  check_order(m, 1);
  const double p = phi.value();
  switch (m) {
    case 1: {
      check_singular(phi, "Li_1");
      return {-std::log(2.0 * std::sin(0.5 * p)), 0.5 * (kPi - p)};
    }
    case 2: {
      const double re = kPi * kPi / 6.0 - 0.25 * p * (kTwoPi - p);
      return {re, clausen2(p)};
    }
    default: {
      const double im = kPi * kPi * p / 6.0 - 0.25 * kPi * p * p + p * p * p / 12.0;
      return {cosine_sum3(p), im};
    }
  }
}

cplx polylog_phase_derivative(int m, PhaseAngle phi) {
  check_order(m, 1);
  const cplx i{0.0, 1.0};
  if (m == 1) {
    check_singular(phi, "Li_0");
    const double half = 0.5 * phi.value();
    return i * cplx{-0.5, 0.5 * std::cos(half) / std::sin(half)};
  }
  return i * polylog_unit_circle(m - 1, phi);
}

}  // namespace atomchain::specfun
