#include "atomchain/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "atomchain/couplings.hpp"
#include "atomchain/error.hpp"
#include "atomchain/lattice.hpp"

namespace atomchain::oracles {
namespace {

constexpr int kMaxDiff = 60;

// D[m][j] = Delta^j (1/x^m) evaluated at x = n + shift for shifts 0..kMaxDiff.
// Delta^j (1/x)(n) = (-1)^j j! / (n (n+1) ... (n+j)).
double diff_inverse(int j, double n) {
  double v = 1.0 / n;
  for (int l = 1; l <= j; ++l) v *= -static_cast<double>(l) / (n + l);
  return v;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Delta^j (1/x^m)(n) by the forward-difference product rule
// Delta^j (f g)(n) = sum_i C(j, i) Delta^i f(n) Delta^{j-i} g(n + i).
double diff_power(int m, int j, double n) {
  if (m == 1) return diff_inverse(j, n);
  double s = 0.0;
  for (int i = 0; i <= j; ++i) {
    s += binomial(j, i) * diff_inverse(i, n) * diff_power(m - 1, j - i, n + i);
  }
  return s;
}

}  // namespace

cplx polylog_series(int m, double phi) {
  if (m < 1 || m > 3) throw Error(ErrorKind::InvalidOrder, "polylog_series supports m = 1..3");
  const cplx z = std::polar(1.0, phi);
  const double gap = std::abs(1.0 - z);
  if (gap < 1e-9) throw Error(ErrorKind::SingularPoint, "polylog_series at z = 1");
  const long M = std::max(20L, static_cast<long>(std::ceil(40.0 / gap)));

  cplx head{0.0, 0.0};
  for (long k = M; k >= 1; --k) {
    head += std::polar(1.0, std::fmod(k * phi, 2.0 * kPi)) / std::pow(static_cast<double>(k), m);
  }
  const cplx ratio = z / (1.0 - z);
  cplx weight = std::polar(1.0, std::fmod((M + 1) * phi, 2.0 * kPi)) / (1.0 - z);
  cplx tail{0.0, 0.0};
  for (int j = 0; j <= kMaxDiff; ++j) {
    const cplx term = weight * diff_power(m, j, static_cast<double>(M + 1));
    tail += term;
    if (std::abs(term) < 1e-18) break;
    weight *= ratio;
  }
  return head + tail;
}

cplx lattice_sum_cesaro(const ChainParams& params, double k, long terms) {
  // Fejer weights (T - m + 1) / T applied to a_m = K(m a) 2 cos(k m a).
  cplx sum{0.0, 0.0};
  const double T = static_cast<double>(terms);
  for (long m = terms; m >= 1; --m) {
    const double r = m * params.a;
    const double c = 2.0 * std::cos(std::fmod(k * r, 2.0 * kPi));
    sum += ((T - m + 1.0) / T) * c * transverse_green_coupling(r, params);
  }
  return sum;
}

BandMatch finite_chain_band_match(const ChainParams& params, const ControlField& field,
                                  double gamma_cut, double margin_fraction, int k_samples) {
  const HamiltonianAssembly h = build_hamiltonian(params, field, field.theta);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.matrix);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonFiniteState, "dense diagonalization failed");
  }
  const int n = params.N;
  const MomentumKernel kernel(params);
  const double edge = params.zone_edge();
  const double margin = margin_fraction * edge;

  // Fourier matrix e^{-i k z_n} on k in [-pi/a, pi/a).
  Eigen::MatrixXcd fourier(k_samples, n);
  std::vector<double> kgrid(k_samples);
  for (int q = 0; q < k_samples; ++q) {
    kgrid[q] = -edge + 2.0 * edge * q / k_samples;
    for (int i = 0; i < n; ++i) fourier(q, i) = std::polar(1.0, -kgrid[q] * params.position(i));
  }

  BandMatch match;
  Eigen::VectorXcd cp(n), cm(n);
  for (int e = 0; e < 2 * n; ++e) {
    const cplx E = solver.eigenvalues()(e);
    if (-2.0 * E.imag() > gamma_cut) continue;
    const auto v = solver.eigenvectors().col(e);
    for (int i = 0; i < n; ++i) {
      const double z = params.position(i);
      cp(i) = v(2 * i) * std::polar(1.0, field.k_c * z);
      cm(i) = v(2 * i + 1) * std::polar(1.0, -field.k_c * z);
    }
    const Eigen::VectorXd power =
        (fourier * cp).cwiseAbs2() + (fourier * cm).cwiseAbs2();
    Eigen::Index peak = 0;
    power.maxCoeff(&peak);
    const double k = kgrid[peak];
    if (!is_subradiant(k, field, params)) continue;
    if (light_line_distance(k + field.k_c, params) < margin ||
        light_line_distance(k - field.k_c, params) < margin) {
      continue;
    }
    const BandPair b = band_eigenvalues(k, field, kernel);
    const double dev = std::min(std::abs(E.real() - b.upper.real()),
                                std::abs(E.real() - b.lower.real()));
    ++match.matched;
    if (dev > match.max_deviation) {
      match.max_deviation = dev;
      match.worst_k = k;
    }
  }
  return match;
}

double decay_min_eigenvalue(const ChainParams& params) {
  return decay_matrix(params).min_eigenvalue;
}

}  // namespace atomchain::oracles
