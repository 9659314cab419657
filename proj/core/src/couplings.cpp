#include "atomchain/couplings.hpp"

#include <cmath>
#include <string>

#include "atomchain/error.hpp"
#include "atomchain/specfun.hpp"

namespace atomchain {

void ChainParams::validate() const {
  if (N < 1) throw Error(ErrorKind::InvalidParams, "chain.N must be >= 1");
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::InvalidParams, "chain.a must be > 0");
  }
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw Error(ErrorKind::InvalidParams, "gamma0 must be > 0");
  }
  if (!(k0 > 0.0) || !std::isfinite(k0)) {
    throw Error(ErrorKind::InvalidParams, "k0 must be > 0");
  }
}

void ControlField::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::InvalidParams, "field.delta must be >= 0");
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw Error(ErrorKind::InvalidParams, "field.theta must lie in [0, pi]");
  }
  if (!std::isfinite(k_c) || !std::isfinite(Delta)) {
    throw Error(ErrorKind::InvalidParams, "field.k_c and field.Delta must be finite");
  }
}

double ControlField::theta_from_amplitudes(double e_plus, double e_minus) {
  return 2.0 * std::atan2(e_plus, e_minus);
}

cplx transverse_green_coupling(double r, const ChainParams& params) {
  if (!(r > 0.0)) {
    throw Error(ErrorKind::NonPositiveSeparation,
                "coupling separation must be > 0, got " + std::to_string(r));
  }
  const double x = params.k0 * r;
  const cplx radial{1.0 / x - 1.0 / (x * x * x), 1.0 / (x * x)};
  return 0.75 * params.gamma0 * std::polar(1.0, x) * radial;
}

double fold_to_zone(double q, const ChainParams& params) {
  const double period = params.reciprocal_period();
  double r = std::fmod(q + params.zone_edge(), period);
  if (r < 0.0) r += period;
  return r - params.zone_edge();
}

bool inside_light_line(double q, const ChainParams& params) {
  return std::abs(fold_to_zone(q, params)) < params.k0;
}

double light_line_distance(double q, const ChainParams& params) {
  return std::abs(std::abs(fold_to_zone(q, params)) - params.k0);
}

MomentumKernel::MomentumKernel(ChainParams params, bool hermitian_limit)
    : params_(params), hermitian_limit_(hermitian_limit) {
  params_.validate();
}

namespace {

template <typename Fn>
cplx polylog_sum(const ChainParams& p, double k, Fn&& term) {
  const cplx i{0.0, 1.0};
  const double ak0 = p.a * p.k0;
  const specfun::PhaseAngle plus((p.k0 + k) * p.a);
  const specfun::PhaseAngle minus((p.k0 - k) * p.a);
  if (plus.distance_to_origin() < specfun::kSingularityGuard ||
      minus.distance_to_origin() < specfun::kSingularityGuard) {
    throw Error(ErrorKind::LightLineSingularity,
                "k = " + std::to_string(k) + " sits on the light line");
  }
  cplx sum{0.0, 0.0};
  cplx prefactor{1.0, 0.0};
  for (int m = 1; m <= 3; ++m) {
    prefactor *= i / ak0;
    sum += prefactor * term(m, plus, minus);
  }
  return 0.75 * p.gamma0 / i * sum;
}

}  // namespace

cplx MomentumKernel::value(double k) const {
  const cplx v = polylog_sum(params_, k, [](int m, auto plus, auto minus) {
    return specfun::polylog_unit_circle(m, plus) + specfun::polylog_unit_circle(m, minus);
  });
  return hermitian_limit_ ? cplx{v.real(), 0.0} : v;
}

cplx MomentumKernel::derivative(double k) const {
  // d/dk Li_m(e^{i(k0 +- k)a}) = +-a d/dphi Li_m.
  const double a = params_.a;
  const cplx v = polylog_sum(params_, k, [a](int m, auto plus, auto minus) {
    return a * (specfun::polylog_phase_derivative(m, plus) -
                specfun::polylog_phase_derivative(m, minus));
  });
  return hermitian_limit_ ? cplx{v.real(), 0.0} : v;
}

}  // namespace atomchain
