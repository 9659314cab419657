#include "atomchain/lattice.hpp"

#include <cmath>
#include <string>

#include "atomchain/error.hpp"

namespace atomchain {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using SiteMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, 2, Eigen::RowMajor>;

constexpr double kThetaTol = 1e-12;

double segment_theta(const Segment& s, double local) {
  return std::visit(
      overloaded{
          [](const Hold& h) { return h.theta; },
          [local](const CosineRamp& r) {
            const double u = r.duration > 0.0 ? local / r.duration : 1.0;
            return r.from + (r.to - r.from) * 0.5 * (1.0 - std::cos(kPi * u));
          },
          [local](const Oscillate& o) {
            return o.center + o.amplitude * std::sin(2.0 * kPi * local / o.period);
          },
      },
      s);
}

double segment_rate(const Segment& s, double local) {
  return std::visit(
      overloaded{
          [](const Hold&) { return 0.0; },
          [local](const CosineRamp& r) {
            if (r.duration <= 0.0) return 0.0;
            return (r.to - r.from) * 0.5 * kPi * std::sin(kPi * local / r.duration) / r.duration;
          },
          [local](const Oscillate& o) {
            const double w = 2.0 * kPi / o.period;
            return o.amplitude * w * std::cos(w * local);
          },
      },
      s);
}

bool theta_in_range(double theta) {
  return theta >= -kThetaTol && theta <= kPi + kThetaTol;
}

}  // namespace

double segment_duration(const Segment& s) {
  return std::visit(overloaded{
                        [](const Hold& h) { return h.duration; },
                        [](const CosineRamp& r) { return r.duration; },
                        [](const Oscillate& o) { return o.period * o.cycles; },
                    },
                    s);
}

double segment_start_theta(const Segment& s) { return segment_theta(s, 0.0); }

double segment_end_theta(const Segment& s) {
  if (const auto* o = std::get_if<Oscillate>(&s)) return o->center;
  return segment_theta(s, segment_duration(s));
}

ThetaSchedule::ThetaSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {}

ThetaSchedule ThetaSchedule::constant(double theta, double duration) {
  return ThetaSchedule({Hold{theta, duration}});
}

void ThetaSchedule::validate() const {
  const Segment* previous = nullptr;
  for (const Segment& s : segments_) {
    std::visit(overloaded{
                   [](const Hold& h) {
                     if (!(h.duration >= 0.0) || !theta_in_range(h.theta)) {
                       throw Error(ErrorKind::InvalidParams, "hold needs duration >= 0 and theta in [0, pi]");
                     }
                   },
                   [](const CosineRamp& r) {
                     if (!(r.duration >= 0.0) || !theta_in_range(r.from) || !theta_in_range(r.to)) {
                       throw Error(ErrorKind::InvalidParams,
                                   "cosine_ramp needs duration >= 0 and endpoints in [0, pi]");
                     }
                   },
                   [](const Oscillate& o) {
                     if (!(o.period > 0.0) || o.cycles < 0) {
                       throw Error(ErrorKind::InvalidParams, "oscillate needs period > 0 and cycles >= 0");
                     }
                     if (!theta_in_range(o.center - std::abs(o.amplitude)) ||
                         !theta_in_range(o.center + std::abs(o.amplitude))) {
                       throw Error(ErrorKind::InvalidParams, "oscillate leaves [0, pi]");
                     }
                   },
               },
               s);
    if (segment_duration(s) <= 0.0) continue;
    if (previous && std::abs(segment_end_theta(*previous) - segment_start_theta(s)) > 1e-9) {
      throw Error(ErrorKind::InvalidParams, "theta schedule is discontinuous between segments");
    }
    previous = &s;
  }
  if (!(duration() > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "theta schedule total duration must be > 0");
  }
}

double ThetaSchedule::duration() const noexcept {
  double total = 0.0;
  for (const Segment& s : segments_) total += segment_duration(s);
  return total;
}

std::vector<double> ThetaSchedule::boundaries() const {
  std::vector<double> starts;
  double t0 = 0.0;
  for (const Segment& s : segments_) {
    starts.push_back(t0);
    t0 += segment_duration(s);
  }
  return starts;
}

namespace {

template <typename Fn>
double locate(const std::vector<Segment>& segments, double total, double t, Fn&& fn) {
  const double slack = 1e-9 * std::max(1.0, total);
  if (!(t >= -slack && t <= total + slack)) {
    throw Error(ErrorKind::OutOfRangeTime,
                "t = " + std::to_string(t) + " outside schedule [0, " + std::to_string(total) + "]");
  }
  double t0 = 0.0;
  const Segment* last = nullptr;
  for (const Segment& s : segments) {
    const double d = segment_duration(s);
    if (d <= 0.0) continue;
    last = &s;
    if (t <= t0 + d) return fn(s, std::max(0.0, t - t0));
    t0 += d;
  }
  return fn(*last, segment_duration(*last));
}

}  // namespace

double ThetaSchedule::theta(double t) const {
  return locate(segments_, duration(), t, [](const Segment& s, double local) {
    if (std::holds_alternative<Oscillate>(s) && local >= segment_duration(s)) {
      return std::get<Oscillate>(s).center;
    }
    return segment_theta(s, local);
  });
}

double ThetaSchedule::theta_rate(double t) const {
  return locate(segments_, duration(), t,
                [](const Segment& s, double local) { return segment_rate(s, local); });
}

void ProbePulse::validate(const ChainParams& params) const {
  if (!(width > 0.0)) throw Error(ErrorKind::ValidationError, "probe.width must be > 0");
  if (site < 0 || site >= params.N) {
    throw Error(ErrorKind::ValidationError, "probe.site must lie in [0, N)");
  }
  if (!std::isfinite(amplitude) || !std::isfinite(center) || !std::isfinite(detuning)) {
    throw Error(ErrorKind::ValidationError, "probe parameters must be finite");
  }
}

double ProbePulse::frame_frequency(const ControlField& field) const noexcept {
  return reference == DetuningReference::BareTransition ? detuning + 0.25 * field.delta : detuning;
}

StateVector drive_vector(const ProbePulse& pulse, const ChainParams& params,
                         const ControlField& field, double t) {
  StateVector f = StateVector::Zero(2 * params.N);
  const double dt = t - pulse.center;
  const double envelope =
      0.5 * pulse.amplitude * std::exp(-dt * dt / (2.0 * pulse.width * pulse.width));
  if (envelope == 0.0) return f;
  const cplx carrier = envelope * std::polar(1.0, -pulse.frame_frequency(field) * t);
  const double z = params.position(pulse.site);
  const cplx phase_plus = std::polar(1.0, -field.k_c * z);
  const cplx phase_minus = std::conj(phase_plus);
  switch (pulse.polarization) {
    case Polarization::Linear:
      f(2 * pulse.site) = carrier * phase_plus * M_SQRT1_2;
      f(2 * pulse.site + 1) = carrier * phase_minus * M_SQRT1_2;
      break;
    case Polarization::SigmaPlus:
      f(2 * pulse.site) = carrier * phase_plus;
      break;
    case Polarization::SigmaMinus:
      f(2 * pulse.site + 1) = carrier * phase_minus;
      break;
  }
  return f;
}

Eigen::MatrixXcd dissipative_block(const ChainParams& params, Boundary boundary) {
  params.validate();
  const int n = params.N;
  // K depends on |n - m| only; tabulate once.
  std::vector<cplx> by_offset(n, cplx{});
  for (int d = 1; d < n; ++d) {
    int sep = d;
    if (boundary == Boundary::Ring) sep = std::min(d, n - d);
    by_offset[d] = -transverse_green_coupling(sep * params.a, params);
  }
  Eigen::MatrixXcd block(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      block(i, j) = by_offset[std::abs(i - j)];
    }
    block(j, j) = cplx{0.0, -0.5 * params.gamma0};
  }
  return block;
}

HamiltonianAssembly build_hamiltonian(const ChainParams& params, const ControlField& field,
                                      double theta, double time, Boundary boundary) {
  field.validate();
  const Eigen::MatrixXcd block = dissipative_block(params, boundary);
  const int n = params.N;
  HamiltonianAssembly out;
  out.time = time;
  out.theta = theta;
  out.matrix = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.matrix(2 * i, 2 * j) = block(i, j);
      out.matrix(2 * i + 1, 2 * j + 1) = block(i, j);
    }
  }
  const double diag = 0.25 * field.delta * std::cos(theta);
  const double mix = 0.25 * field.delta * std::sin(theta);
  for (int i = 0; i < n; ++i) {
    const cplx phase = std::polar(1.0, -2.0 * field.k_c * params.position(i));
    out.matrix(2 * i, 2 * i) += diag;
    out.matrix(2 * i + 1, 2 * i + 1) -= diag;
    out.matrix(2 * i, 2 * i + 1) += mix * phase;
    out.matrix(2 * i + 1, 2 * i) += mix * std::conj(phase);
  }
  return out;
}

ChainOperator::ChainOperator(const ChainParams& params, const ControlField& field,
                             Boundary boundary)
    : ChainOperator(std::make_shared<const Eigen::MatrixXcd>(dissipative_block(params, boundary)),
                    params, field) {}

ChainOperator::ChainOperator(std::shared_ptr<const Eigen::MatrixXcd> block,
                             const ChainParams& params, const ControlField& field)
    : params_(params), field_(field), block_(std::move(block)) {
  field_.validate();
  if (!block_ || block_->rows() != params.N || block_->cols() != params.N) {
    throw Error(ErrorKind::InvalidParams, "dissipative block does not match chain size");
  }
  phase_.resize(params.N);
  for (int i = 0; i < params.N; ++i) {
    phase_(i) = std::polar(1.0, -2.0 * field.k_c * params.position(i));
  }
}

void ChainOperator::apply(double theta, const StateVector& in, StateVector& out) const {
  const int n = params_.N;
  out.resize(2 * n);
  Eigen::Map<const SiteMatrix> c(in.data(), n, 2);
  Eigen::Map<SiteMatrix> h(out.data(), n, 2);
  h.noalias() = (*block_) * c;
  const double diag = 0.25 * field_.delta * std::cos(theta);
  const double mix = 0.25 * field_.delta * std::sin(theta);
  h.col(0).array() += diag * c.col(0).array() + mix * phase_.array() * c.col(1).array();
  h.col(1).array() += -diag * c.col(1).array() + mix * phase_.array().conjugate() * c.col(0).array();
}

double ChainOperator::one_norm_bound() const {
  const double block_norm = block_->cwiseAbs().colwise().sum().maxCoeff();
  // |diag| + |mix| <= (delta/4) sqrt(2) for any theta.
  return block_norm + 0.25 * std::abs(field_.delta) * std::sqrt(2.0);
}

DecayReport decay_matrix(const ChainParams& params) {
  // Control terms are Hermitian and drop out of i (H - H^dagger).
  const HamiltonianAssembly h = build_hamiltonian(params, ControlField{0.0, 0.0, 0.0, 0.0}, 0.0);
  const Eigen::MatrixXcd g = cplx{0.0, 1.0} * (h.matrix - h.matrix.adjoint());
  DecayReport report;
  report.gamma = g.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(report.gamma, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.positive_semidefinite = report.min_eigenvalue >= -1e-10 * params.gamma0;
  return report;
}

Eigen::MatrixXcd helical_operator(const ChainParams& params, const ControlField& field) {
  const int n = params.N;
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  const cplx rot = std::polar(1.0, -field.k_c * params.a);
  for (int i = 0; i < n; ++i) {
    const int next = (i + 1) % n;
    op(2 * next, 2 * i) = rot;
    op(2 * next + 1, 2 * i + 1) = std::conj(rot);
  }
  return op;
}

}  // namespace atomchain
