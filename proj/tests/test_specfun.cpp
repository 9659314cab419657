#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "atomchain/error.hpp"
#include "atomchain/oracles.hpp"
#include "atomchain/specfun.hpp"

using namespace atomchain;
using specfun::cplx;
using specfun::PhaseAngle;
using specfun::polylog_phase_derivative;
using specfun::polylog_unit_circle;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double zeta3 = 1.2020569031595942854;
constexpr double catalan = 0.91596559417721901505;

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("closed-form values at symmetric points") {
  const cplx li1 = polylog_unit_circle(1, PhaseAngle(pi));
  CHECK(li1.real() == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(std::abs(li1.imag()) < 1e-15);

  const cplx li2 = polylog_unit_circle(2, PhaseAngle(0.0));
  CHECK(li2.real() == doctest::Approx(pi * pi / 6.0).epsilon(1e-15));
  CHECK(std::abs(li2.imag()) < 1e-15);

  const cplx li3 = polylog_unit_circle(3, PhaseAngle(pi));
  CHECK(li3.real() == doctest::Approx(-0.75 * zeta3).epsilon(1e-14));
  CHECK(std::abs(li3.imag()) < 1e-14);

  // Li_2(i) = -pi^2/48 + i G with G Catalan's constant.
  const cplx li2i = polylog_unit_circle(2, PhaseAngle(pi / 2));
  CHECK(std::abs(li2i - cplx(-pi * pi / 48.0, catalan)) < 1e-14);
  CHECK(std::abs(li2i - oracles::polylog_series(2, pi / 2)) < 1e-13);

  // Li_3(1) = zeta(3); Li_3(i) = -3 zeta(3)/32 + i pi^3/32.
  CHECK(std::abs(polylog_unit_circle(3, PhaseAngle(0.0)) - zeta3) < 1e-14);
  CHECK(std::abs(polylog_unit_circle(3, PhaseAngle(pi / 2)) -
                 cplx(-3.0 * zeta3 / 32.0, std::pow(pi, 3) / 32.0)) < 1e-14);
}

TEST_CASE("Clausen and cosine sums") {
  CHECK(specfun::clausen2(pi / 2) == doctest::Approx(catalan).epsilon(1e-15));
  CHECK(std::abs(specfun::clausen2(pi)) < 1e-15);
  CHECK(specfun::clausen2(pi / 3) == doctest::Approx(1.0149416064096536250).epsilon(1e-14));
  CHECK(specfun::cosine_sum3(0.0) == doctest::Approx(zeta3).epsilon(1e-15));
  CHECK(specfun::cosine_sum3(pi) == doctest::Approx(-0.75 * zeta3).epsilon(1e-14));
}

TEST_CASE("phase derivative lowers the order") {
  CHECK(std::abs(polylog_phase_derivative(2, PhaseAngle(pi)) - cplx(0.0, -std::log(2.0))) < 1e-15);
  CHECK(std::abs(polylog_phase_derivative(3, PhaseAngle(pi)) - cplx(0.0, -pi * pi / 12.0)) < 1e-14);

  const double h = 1e-6;
  for (int m = 1; m <= 3; ++m) {
    for (double phi : {0.3, 2.0, 4.5}) {
      const cplx fd = (polylog_unit_circle(m, PhaseAngle(phi + h)) -
                       polylog_unit_circle(m, PhaseAngle(phi - h))) /
                      (2.0 * h);
      const cplx exact = polylog_phase_derivative(m, PhaseAngle(phi));
      CHECK(std::abs(fd - exact) <= 1e-8 * std::abs(exact));
    }
  }
}

TEST_CASE("errors") {
  CHECK(throws_kind(ErrorKind::SingularPoint, [] { polylog_unit_circle(1, PhaseAngle(0.0)); }));
  CHECK(throws_kind(ErrorKind::SingularPoint,
                    [] { polylog_unit_circle(1, PhaseAngle(2.0 * pi - 1e-12)); }));
  CHECK(throws_kind(ErrorKind::SingularPoint, [] { polylog_phase_derivative(2, PhaseAngle(1e-10)); }));
  CHECK(throws_kind(ErrorKind::InvalidOrder, [] { polylog_unit_circle(0, PhaseAngle(1.0)); }));
  CHECK(throws_kind(ErrorKind::InvalidOrder, [] { polylog_unit_circle(4, PhaseAngle(1.0)); }));
  CHECK(throws_kind(ErrorKind::InvalidOrder, [] { polylog_phase_derivative(4, PhaseAngle(1.0)); }));
  CHECK(throws_kind(ErrorKind::InvalidParams, [] { PhaseAngle(std::nan("")); }));
  // Just outside the guard the closed form is still usable.
  CHECK(std::isfinite(polylog_unit_circle(1, PhaseAngle(1e-8)).real()));
}

TEST_CASE("phase reduction") {
  CHECK(PhaseAngle(-pi / 2).value() == doctest::Approx(1.5 * pi));
  CHECK(PhaseAngle(7.0 * pi).value() == doctest::Approx(pi));
  CHECK(PhaseAngle(0.1).distance_to_origin() == doctest::Approx(0.1));
  CHECK(PhaseAngle(2.0 * pi - 0.1).distance_to_origin() == doctest::Approx(0.1));
}

TEST_CASE("conjugation symmetry and periodicity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1e-6, 2.0 * pi - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double phi = u(rng);
    for (int m = 1; m <= 3; ++m) {
      const cplx v = polylog_unit_circle(m, PhaseAngle(phi));
      const cplx w = polylog_unit_circle(m, PhaseAngle(-phi));
      CHECK(std::abs(w - std::conj(v)) <= 1e-13 * std::max(1.0, std::abs(v)));
      const cplx shifted = polylog_unit_circle(m, PhaseAngle(phi + 2.0 * pi));
      CHECK(std::abs(shifted - v) <= 1e-12 * std::max(1.0, std::abs(v)));
    }
  }
}

TEST_CASE("closed forms agree with the accelerated series") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-3, 2.0 * pi - 1e-3);
  double worst = 0.0;
  for (int m = 1; m <= 3; ++m) {
    for (int i = 0; i < 200; ++i) {
      const double phi = u(rng);
      worst = std::max(worst, std::abs(polylog_unit_circle(m, PhaseAngle(phi)) -
                                       oracles::polylog_series(m, phi)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("small angles approach the z = 1 limits") {
  // Li_2 and Li_3 are continuous at z = 1.
  CHECK(std::abs(polylog_unit_circle(2, PhaseAngle(1e-12)) - pi * pi / 6.0) < 1e-10);
  CHECK(std::abs(polylog_unit_circle(3, PhaseAngle(1e-12)) - zeta3) < 1e-11);
  // Li_1 diverges like -ln(phi).
  const double phi = 1e-6;
  CHECK(polylog_unit_circle(1, PhaseAngle(phi)).real() ==
        doctest::Approx(-std::log(phi)).epsilon(1e-9));
}
