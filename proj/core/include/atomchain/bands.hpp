#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "atomchain/chain.hpp"
#include "atomchain/couplings.hpp"

namespace atomchain {

enum class Band { Upper, Lower };

// Energies are complex, E = omega - i Gamma / 2, in units of Gamma0 and
// measured from omega_shift = omega0 + (2 Delta + delta) / 4.
struct BandPair {
  cplx upper;
  cplx lower;
  cplx splitting;  // Omega_k, branch with Re >= 0 unless continued
};

struct BandPoint {
  double k = 0.0;
  cplx E_upper;
  cplx E_lower;
  cplx alpha;  // NaN when the bands are degenerate
  double v_upper = 0.0;
  double v_lower = 0.0;
  bool radiative_plus = false;   // k + k_c inside the light line
  bool radiative_minus = false;  // k - k_c inside the light line

  bool radiative() const noexcept { return radiative_plus || radiative_minus; }
  double decay_upper() const noexcept { return -2.0 * E_upper.imag(); }
  double decay_lower() const noexcept { return -2.0 * E_lower.imag(); }
};

struct GridSpec {
  int nodes = 2048;
  // Exclusion radius around light-line singularities, as a fraction of pi/a.
  double exclusion = 1e-3;
  int threads = 1;

  bool operator==(const GridSpec&) const = default;
};

struct BandStructure {
  ChainParams params;
  ControlField field;
  std::vector<BandPoint> points;
  std::vector<double> dropped;  // grid nodes removed next to the light line
};

/// A = [[d cos t - 4K~(k - k_c), d sin t], [d sin t, -d cos t - 4K~(k + k_c)]].
Eigen::Matrix2cd coupling_matrix_A(double k, const ControlField& field,
                                   const MomentumKernel& kernel);

/// Closed-form eigenvalues -i Gamma0/2 - (K~(k+k_c) + K~(k-k_c))/2 +- Omega_k/4
/// using the principal root for Omega_k, so Re E_upper >= Re E_lower.
BandPair band_eigenvalues(double k, const ControlField& field, const MomentumKernel& kernel);

/// Complex mixing angle with (cos(a/2), sin(a/2)) the upper and
/// (-sin(a/2), cos(a/2)) the lower eigenvector of A in the (c+, c-) basis.
/// Throws Error(DegenerateBands) when |Omega_k| < 1e-10 Gamma0.
cplx mixing_angle_alpha(double k, const ControlField& field, const MomentumKernel& kernel);

/// Polarization spinor (c+, c-) of a band at k.
Eigen::Vector2cd band_spinor(double k, Band band, const ControlField& field,
                             const MomentumKernel& kernel);

/// d Re(omega_band) / dk from the analytic kernel derivative.
double group_velocity(double k, Band band, const ControlField& field,
                      const MomentumKernel& kernel);

/// d v_band / dt = (d v_band / d theta) * theta_dot.
double group_velocity_theta_rate(double k, const ControlField& field, double theta_dot,
                                 const MomentumKernel& kernel, Band band = Band::Lower);

BandStructure band_sweep(const ChainParams& params, const ControlField& field,
                         const GridSpec& grid = {});

/// Both k + k_c and k - k_c (folded) outside the light line.
bool is_subradiant(double k, const ControlField& field, const ChainParams& params);

/// Subradiant interval of k containing the zone edge pi/a (the interval may
/// extend past pi/a into the next zone). Throws InvalidParams if pi/a is not
/// subradiant.
std::pair<double, double> subradiant_window(const ControlField& field, const ChainParams& params);

/// Spread of Re E over the central `fraction` of the subradiant window that
/// contains the zone edge. Requires a < 1/2 and a nonempty window.
double interior_bandwidth(const ControlField& field, const ChainParams& params, Band band,
                          double fraction = 0.5, int samples = 401);

/// |Re E(pi/a)| of the undriven band: the detuning of the zone-edge guided mode
/// from the bare resonance, which carries the near-field 1/(k0 a)^3 scale.
double zone_edge_bandwidth(const ChainParams& params);

void write_bands_csv(std::ostream& out, const BandStructure& structure);

}  // namespace atomchain
