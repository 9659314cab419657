#pragma once

#include <complex>

namespace atomchain::specfun {

using cplx = std::complex<double>;

// Half-width of the excluded neighborhood around phi = 0 (mod 2 pi) where
// Li_1 and Li_0 diverge.
inline constexpr double kSingularityGuard = 1e-9;

/// Angle on the unit circle, reduced to [0, 2 pi).
class PhaseAngle {
 public:
  explicit PhaseAngle(double phi);

  double value() const noexcept { return phi_; }
  /// Distance to the nearest multiple of 2 pi.
  double distance_to_origin() const noexcept;

 private:
  double phi_;
};

/// Li_m(e^{i phi}) for m in {1, 2, 3}.
///
/// Li_1 is the closed form -ln(2 sin(phi/2)) + i(pi - phi)/2. Re Li_2 and
/// Im Li_3 are Bernoulli polynomials in phi; Im Li_2 = Cl_2(phi) and
/// Re Li_3 = sum cos(k phi)/k^3 come from their small-angle expansions with
/// Bernoulli-number coefficients, folded onto [0, pi] by symmetry so the
/// series ratio never exceeds 1/4.
///
/// Throws Error(InvalidOrder) for m outside {1,2,3} and Error(SingularPoint)
/// for m = 1 within kSingularityGuard of phi = 0.
cplx polylog_unit_circle(int m, PhaseAngle phi);

/// d/dphi Li_m(e^{i phi}) = i Li_{m-1}(e^{i phi}) for m in {1, 2, 3}.
/// The m = 1 case uses Li_0(z) = z / (1 - z).
cplx polylog_phase_derivative(int m, PhaseAngle phi);

/// Clausen function Cl_2(phi) = sum sin(k phi) / k^2.
double clausen2(double phi);

/// sum_{k>=1} cos(k phi) / k^3.
double cosine_sum3(double phi);

}  // namespace atomchain::specfun
