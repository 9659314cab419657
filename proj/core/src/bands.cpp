#include "atomchain/bands.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <tuple>

#include "atomchain/csv.hpp"
#include "atomchain/error.hpp"
#include "parallel.hpp"

namespace atomchain {
namespace {

constexpr double kDegenerateTol = 1e-10;
const cplx kI{0.0, 1.0};

// Everything the closed form needs at one k.
struct KernelSample {
  cplx k_plus;   // K~(k + k_c)
  cplx k_minus;  // K~(k - k_c)
  cplx x;        // delta cos(theta) + 2 (K~+ - K~-)
  cplx omega;    // principal sqrt((delta sin theta)^2 + x^2)
};

KernelSample sample(double k, const ControlField& f, const MomentumKernel& kernel) {
  KernelSample s;
  s.k_plus = kernel.value(k + f.k_c);
  s.k_minus = kernel.value(k - f.k_c);
  s.x = f.delta * std::cos(f.theta) + 2.0 * (s.k_plus - s.k_minus);
  const double off = f.delta * std::sin(f.theta);
  s.omega = std::sqrt(off * off + s.x * s.x);
  return s;
}

cplx centre(const KernelSample& s, const MomentumKernel& kernel) {
  return -0.5 * kernel.params().gamma0 * kI - 0.5 * (s.k_plus + s.k_minus);
}

cplx alpha_from(const KernelSample& s, const ControlField& f, cplx omega) {
  if (std::abs(omega) < kDegenerateTol) {
    throw Error(ErrorKind::DegenerateBands, "|Omega_k| below tolerance");
  }
  const cplx z = (s.x + kI * (f.delta * std::sin(f.theta))) / omega;
  cplx alpha = -kI * std::log(z);
  if (alpha.real() < -0.5 * kPi) alpha += 2.0 * kPi;
  return alpha;
}

// Velocities for a given sign convention of Omega (upper gets +omega/4).
std::pair<double, double> velocities(double k, const ControlField& f,
                                     const MomentumKernel& kernel, const KernelSample& s,
                                     cplx omega) {
  if (std::abs(omega) < kDegenerateTol) {
    throw Error(ErrorKind::DegenerateBands, "|Omega_k| below tolerance");
  }
  const cplx dp = kernel.derivative(k + f.k_c);
  const cplx dm = kernel.derivative(k - f.k_c);
  const cplx mean = -0.5 * (dp + dm);
  const cplx domega = s.x * 2.0 * (dp - dm) / omega;
  return {(mean + 0.25 * domega).real(), (mean - 0.25 * domega).real()};
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

BandPoint make_point(double k, const ControlField& f, const MomentumKernel& kernel,
                     const KernelSample& s, cplx omega) {
  BandPoint p;
  p.k = k;
  const cplx c = centre(s, kernel);
  p.E_upper = c + 0.25 * omega;
  p.E_lower = c - 0.25 * omega;
  if (std::abs(omega) < kDegenerateTol) {
    p.alpha = {kNaN, kNaN};
    p.v_upper = p.v_lower = kNaN;
  } else {
    p.alpha = alpha_from(s, f, omega);
    std::tie(p.v_upper, p.v_lower) = velocities(k, f, kernel, s, omega);
  }
  p.radiative_plus = inside_light_line(k + f.k_c, kernel.params());
  p.radiative_minus = inside_light_line(k - f.k_c, kernel.params());
  return p;
}

}  // namespace

Eigen::Matrix2cd coupling_matrix_A(double k, const ControlField& field,
                                   const MomentumKernel& kernel) {
  const double c = field.delta * std::cos(field.theta);
  const double s = field.delta * std::sin(field.theta);
  Eigen::Matrix2cd A;
  A(0, 0) = c - 4.0 * kernel.value(k - field.k_c);
  A(0, 1) = s;
  A(1, 0) = s;
  A(1, 1) = -c - 4.0 * kernel.value(k + field.k_c);
  return A;
}

BandPair band_eigenvalues(double k, const ControlField& field, const MomentumKernel& kernel) {
  const KernelSample s = sample(k, field, kernel);
  const cplx c = centre(s, kernel);
  return {c + 0.25 * s.omega, c - 0.25 * s.omega, s.omega};
}

cplx mixing_angle_alpha(double k, const ControlField& field, const MomentumKernel& kernel) {
  const KernelSample s = sample(k, field, kernel);
  return alpha_from(s, field, s.omega);
}

Eigen::Vector2cd band_spinor(double k, Band band, const ControlField& field,
                             const MomentumKernel& kernel) {
  const cplx half = 0.5 * mixing_angle_alpha(k, field, kernel);
  if (band == Band::Upper) return {std::cos(half), std::sin(half)};
  return {-std::sin(half), std::cos(half)};
}

double group_velocity(double k, Band band, const ControlField& field,
                      const MomentumKernel& kernel) {
  const KernelSample s = sample(k, field, kernel);
  const auto [vu, vl] = velocities(k, field, kernel, s, s.omega);
  return band == Band::Upper ? vu : vl;
}

double group_velocity_theta_rate(double k, const ControlField& field, double theta_dot,
                                 const MomentumKernel& kernel, Band band) {
  if (theta_dot == 0.0) return 0.0;
  const KernelSample s = sample(k, field, kernel);
  if (std::abs(s.omega) < kDegenerateTol) {
    throw Error(ErrorKind::DegenerateBands, "|Omega_k| below tolerance");
  }
  // d_theta E_lower = (delta/2) sin(theta) D / Omega with D = K~+ - K~-.
  const cplx d = s.k_plus - s.k_minus;
  const cplx dd = kernel.derivative(k + field.k_c) - kernel.derivative(k - field.k_c);
  const cplx om = s.omega;
  const cplx dk_ratio = dd / om - 2.0 * d * s.x * dd / (om * om * om);
  const double rate = (0.5 * field.delta * std::sin(field.theta) * dk_ratio).real();
  return theta_dot * (band == Band::Lower ? rate : -rate);
}

bool is_subradiant(double k, const ControlField& field, const ChainParams& params) {
  return !inside_light_line(k + field.k_c, params) && !inside_light_line(k - field.k_c, params);
}

BandStructure band_sweep(const ChainParams& params, const ControlField& field,
                         const GridSpec& grid) {
  params.validate();
  field.validate();
  if (grid.nodes < 2) throw Error(ErrorKind::InvalidParams, "grid.nodes must be >= 2");
  const MomentumKernel kernel(params);
  const double radius = grid.exclusion * params.zone_edge();
  const double step = params.reciprocal_period() / grid.nodes;

  std::vector<double> ks;
  BandStructure out{params, field, {}, {}};
  for (int j = 0; j < grid.nodes; ++j) {
    const double k = -params.zone_edge() + j * step;
    if (light_line_distance(k + field.k_c, params) < radius ||
        light_line_distance(k - field.k_c, params) < radius) {
      out.dropped.push_back(k);
    } else {
      ks.push_back(k);
    }
  }

  std::vector<KernelSample> samples(ks.size());
  detail::parallel_for(static_cast<int>(ks.size()), grid.threads,
                       [&](int i) { samples[i] = sample(ks[i], field, kernel); });

  // Principal root keeps Re E_upper >= Re E_lower. Where Re Omega vanishes the
  // labels are ambiguous, so follow the root nearest the previous node.
  std::vector<cplx> omegas(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    cplx om = samples[i].omega;
    const bool tie = std::abs(om.real()) <= 1e-9 * std::max(1.0, std::abs(om));
    if (tie && i > 0 && std::abs(-om - omegas[i - 1]) < std::abs(om - omegas[i - 1])) om = -om;
    omegas[i] = om;
  }

  out.points.resize(ks.size());
  detail::parallel_for(static_cast<int>(ks.size()), grid.threads, [&](int i) {
    out.points[i] = make_point(ks[i], field, kernel, samples[i], omegas[i]);
  });
  return out;
}

std::pair<double, double> subradiant_window(const ControlField& field, const ChainParams& params) {
  const double edge = params.zone_edge();
  if (!is_subradiant(edge, field, params)) {
    throw Error(ErrorKind::InvalidParams, "zone edge is not subradiant for this field");
  }
  auto inside = [&](double k) {
    return is_subradiant(k, field, params) &&
           light_line_distance(k + field.k_c, params) > 1e-12 &&
           light_line_distance(k - field.k_c, params) > 1e-12;
  };
  // Scan outwards from pi/a, then bisect the first exit.
  auto boundary = [&](double direction) {
    constexpr int kScan = 4096;
    const double step = edge / kScan;
    double in = 0.0;
    for (int j = 1; j <= kScan; ++j) {
      const double out = j * step;
      if (inside(edge + direction * out)) {
        in = out;
        continue;
      }
      double lo = in, hi = out;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(edge + direction * mid) ? lo : hi) = mid;
      }
      return lo;
    }
    return in;
  };
  return {edge - boundary(-1.0), edge + boundary(+1.0)};
}

double interior_bandwidth(const ControlField& field, const ChainParams& params, Band band,
                          double fraction, int samples) {
  const auto [left, right] = subradiant_window(field, params);
  const double mid = 0.5 * (left + right);
  const double half = 0.5 * fraction * (right - left);

  const MomentumKernel kernel(params);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < samples; ++i) {
    const double k = mid - half + 2.0 * half * i / (samples - 1);
    const BandPair e = band_eigenvalues(k, field, kernel);
    const double value = (band == Band::Upper ? e.upper : e.lower).real();
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  return hi - lo;
}

double zone_edge_bandwidth(const ChainParams& params) {
  const MomentumKernel kernel(params);
  return std::abs(kernel.value(params.zone_edge()).real());
}

void write_bands_csv(std::ostream& out, const BandStructure& structure) {
  out << "k,re_E_upper,im_E_upper,re_E_lower,im_E_lower,re_alpha_k,im_alpha_k,"
         "v_upper,v_lower,radiative_flag\n";
  for (const BandPoint& p : structure.points) {
    out << format_double(p.k) << ',' << format_double(p.E_upper.real()) << ','
        << format_double(p.E_upper.imag()) << ',' << format_double(p.E_lower.real()) << ','
        << format_double(p.E_lower.imag()) << ',' << format_double(p.alpha.real()) << ','
        << format_double(p.alpha.imag()) << ',' << format_double(p.v_upper) << ','
        << format_double(p.v_lower) << ',' << (p.radiative() ? 1 : 0) << '\n';
  }
}

}  // namespace atomchain
