#pragma once

#include <complex>
#include <vector>

#include "atomchain/bands.hpp"
#include "atomchain/chain.hpp"

// Reference computations that avoid the closed forms used in the library.
namespace atomchain::oracles {

using cplx = std::complex<double>;

/// Li_m(e^{i phi}) by direct summation of the first M terms plus an Euler
/// transformed tail. Forward differences of 1/n^m are built with the product
/// rule so every term has the same sign and nothing cancels.
cplx polylog_series(int m, double phi);

/// sum_{m != 0} K(|m| a) e^{i k m a}, Cesaro-averaged over `terms` partial sums.
cplx lattice_sum_cesaro(const ChainParams& params, double k, long terms = 1'000'000);

struct BandMatch {
  int matched = 0;        // subradiant eigenstates compared
  double max_deviation = 0.0;
  double worst_k = 0.0;
};

/// Diagonalizes the dense open-chain Hamiltonian, assigns each long-lived
/// eigenstate (Gamma < gamma_cut) its dominant quasimomentum from a Fourier
/// transform with the control-frame phases removed, and compares Re E with
/// the nearest analytic band. States whose k lies within
/// margin_fraction * pi/a of a light line are skipped.
BandMatch finite_chain_band_match(const ChainParams& params, const ControlField& field,
                                  double gamma_cut = 1e-3, double margin_fraction = 0.05,
                                  int k_samples = 4000);

/// Smallest eigenvalue of i (H - H^dagger) for the open chain.
double decay_min_eigenvalue(const ChainParams& params);

}  // namespace atomchain::oracles
