#pragma once

#include <complex>

#include "atomchain/chain.hpp"

namespace atomchain {

using cplx = std::complex<double>;

/// (3 pi Gamma0 / k0) e_s^* . G(r) . e_s for circular polarization transverse
/// to the chain: (3 Gamma0 / 4) e^{ix} (1/x + i/x^2 - 1/x^3), x = k0 r.
/// Polarization-changing components vanish along the chain axis.
/// Throws Error(NonPositiveSeparation) for r <= 0.
cplx transverse_green_coupling(double r, const ChainParams& params);

/// Wraps q into the first Brillouin zone [-pi/a, pi/a).
double fold_to_zone(double q, const ChainParams& params);

/// True when the folded quasimomentum lies inside the light line (|q| < k0).
bool inside_light_line(double q, const ChainParams& params);

/// Distance of the folded |q| from the light line.
double light_line_distance(double q, const ChainParams& params);

/// Lattice Fourier transform of the dipole-dipole kernel,
///
///   K~(k) = sum_{m != 0} K(|m| a) e^{i k m a}
///         = (3 Gamma0 / 4i) sum_{m=1}^{3} (i/(a k0))^m
///             [Li_m(e^{i(k0+k)a}) + Li_m(e^{i(k0-k)a})],
///
/// and its analytic k-derivative. Im K~ = -Gamma0/2 outside the light line.
///
/// The Hermitian-limit mode drops Im K~ entirely; it exists only to sanity
/// check the band algebra.
class MomentumKernel {
 public:
  explicit MomentumKernel(ChainParams params, bool hermitian_limit = false);

  /// Throws Error(LightLineSingularity) when (k0 +- k) a is within the
  /// singularity guard of 0 mod 2 pi.
  cplx value(double k) const;
  cplx derivative(double k) const;

  const ChainParams& params() const noexcept { return params_; }
  bool hermitian_limit() const noexcept { return hermitian_limit_; }

 private:
  ChainParams params_;
  bool hermitian_limit_;
};

}  // namespace atomchain
