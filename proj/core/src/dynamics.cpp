#include "atomchain/dynamics.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "atomchain/csv.hpp"
#include "atomchain/error.hpp"

namespace atomchain {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEmptyNorm = 1e-30;

}  // namespace

SpinWaveState SpinWaveState::zero(const ChainParams& params, double time) {
  return {StateVector::Zero(2 * params.N), time};
}

Observables populations(const SpinWaveState& state, const ChainParams& params) {
  const int n = params.N;
  if (state.amplitudes.size() != 2 * n) {
    throw Error(ErrorKind::InvalidParams, "state length does not match 2N");
  }
  Observables obs;
  obs.site_population.resize(n);
  for (int i = 0; i < n; ++i) {
    const double plus = std::norm(state.amplitudes(2 * i));
    const double minus = std::norm(state.amplitudes(2 * i + 1));
    obs.P_plus += plus;
    obs.P_minus += minus;
    obs.site_population(i) = plus + minus;
  }
  obs.norm2 = obs.P_plus + obs.P_minus;
  obs.centroid = kNaN;
  obs.width_rms = kNaN;
  if (obs.norm2 >= kEmptyNorm) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += params.position(i) * obs.site_population(i);
    mean /= obs.norm2;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = params.position(i) - mean;
      var += d * d * obs.site_population(i);
    }
    obs.centroid = mean;
    obs.width_rms = std::sqrt(var / obs.norm2);
  }
  return obs;
}

Observables observables(const SpinWaveState& state, const ChainParams& params) {
  Observables obs = populations(state, params);
  if (obs.norm2 < kEmptyNorm) {
    throw Error(ErrorKind::EmptyState, "norm^2 below 1e-30, centroid undefined");
  }
  return obs;
}

double gaussian_fit_width(const Eigen::VectorXd& p, const ChainParams& params) {
  const int n = static_cast<int>(p.size());
  const double total = p.sum();
  if (!(total > 0.0)) return kNaN;
  double mu = 0.0;
  for (int i = 0; i < n; ++i) mu += params.position(i) * p(i);
  mu /= total;
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += std::pow(params.position(i) - mu, 2) * p(i);
  double sigma = std::sqrt(var / total);
  if (!(sigma > 0.0)) return 0.0;
  double amp = p.maxCoeff();

  // Levenberg-Marquardt on (amp, mu, sigma).
  auto residual = [&](double A, double m, double s, Eigen::VectorXd& r) {
    r.resize(n);
    for (int i = 0; i < n; ++i) {
      const double d = params.position(i) - m;
      r(i) = A * std::exp(-d * d / (2.0 * s * s)) - p(i);
    }
    return r.squaredNorm();
  };
  Eigen::VectorXd r;
  double cost = residual(amp, mu, sigma, r);
  double lambda = 1e-3;
  Eigen::MatrixXd J(n, 3);
  for (int iter = 0; iter < 200; ++iter) {
    for (int i = 0; i < n; ++i) {
      const double d = params.position(i) - mu;
      const double g = std::exp(-d * d / (2.0 * sigma * sigma));
      J(i, 0) = g;
      J(i, 1) = amp * g * d / (sigma * sigma);
      J(i, 2) = amp * g * d * d / (sigma * sigma * sigma);
    }
    const Eigen::Matrix3d JtJ = J.transpose() * J;
    const Eigen::Vector3d grad = J.transpose() * r;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix3d M = JtJ;
      M.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
      const Eigen::Vector3d step = M.ldlt().solve(-grad);
      const double s_new = sigma + step(2);
      if (s_new > 0.0) {
        Eigen::VectorXd r_new;
        const double c_new = residual(amp + step(0), mu + step(1), s_new, r_new);
        if (c_new < cost) {
          const double gain = cost - c_new;
          amp += step(0);
          mu += step(1);
          sigma = s_new;
          r = std::move(r_new);
          cost = c_new;
          lambda = std::max(lambda * 0.3, 1e-12);
          improved = true;
          if (gain <= 1e-14 * cost || step.norm() <= 1e-12 * (1.0 + std::abs(mu))) {
            return std::abs(sigma);
          }
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!improved) return std::abs(sigma);
  }
  return kNaN;
}

EvolveResult evolve(const SpinWaveState& initial, const ChainOperator& op,
                    const ThetaSchedule& schedule, const std::optional<ProbePulse>& pulse,
                    double t_end, const EvolveOptions& options) {
  const ChainParams& params = op.params();
  const ControlField& field = op.field();
  const int dim = 2 * params.N;
  if (initial.amplitudes.size() != dim) {
    throw Error(ErrorKind::InvalidParams, "initial state length does not match 2N");
  }
  if (!(options.dt > 0.0) || options.stride < 1) {
    throw Error(ErrorKind::InvalidParams, "dt must be > 0 and stride >= 1");
  }
  const double t0 = initial.time;
  const double slack = 1e-9 * std::max(1.0, schedule.duration());
  if (t0 < -slack || t_end > schedule.duration() + slack || t_end < t0) {
    throw Error(ErrorKind::ScheduleMismatch,
                "t_span [" + std::to_string(t0) + ", " + std::to_string(t_end) +
                    "] exceeds schedule duration " + std::to_string(schedule.duration()));
  }
  const double bound = options.dt * op.one_norm_bound();
  if (bound > options.stability_limit) {
    throw Error(ErrorKind::StepTooLarge, "dt * ||H||_1 = " + std::to_string(bound) +
                                             " exceeds " +
                                             std::to_string(options.stability_limit));
  }
  if (pulse) pulse->validate(params);

  EvolveResult result;
  TrajectoryRecord& rec = result.record;
  StateVector c = initial.amplitudes;
  auto record = [&](double t) {
    const Observables obs = populations({c, t}, params);
    rec.t.push_back(t);
    rec.theta.push_back(schedule.theta(std::min(t, schedule.duration())));
    rec.norm2.push_back(obs.norm2);
    rec.centroid.push_back(obs.centroid);
    rec.width_rms.push_back(obs.width_rms);
    rec.width_fit.push_back(options.fit_width && obs.norm2 >= kEmptyNorm
                                ? gaussian_fit_width(obs.site_population, params)
                                : kNaN);
    rec.P_plus.push_back(obs.P_plus);
    rec.P_minus.push_back(obs.P_minus);
    if (options.keep_sites) rec.site_population.push_back(obs.site_population);
  };

  // i dc/dt = H c + f  =>  dc/dt = -i (H c + f)
  const cplx minus_i{0.0, -1.0};
  StateVector tmp(dim), k1(dim), k2(dim), k3(dim), k4(dim), stage(dim);
  auto rhs = [&](double t, const StateVector& y, StateVector& out) {
    op.apply(schedule.theta(std::min(t, schedule.duration())), y, tmp);
    if (pulse) tmp += drive_vector(*pulse, params, field, t);
    out = minus_i * tmp;
  };

  const long steps = std::max(0L, static_cast<long>(std::ceil((t_end - t0) / options.dt - 1e-9)));
  record(t0);
  double t = t0;
  for (long s = 1; s <= steps; ++s) {
    const double h = (s == steps) ? t_end - t : options.dt;
    rhs(t, c, k1);
    stage = c + (0.5 * h) * k1;
    rhs(t + 0.5 * h, stage, k2);
    stage = c + (0.5 * h) * k2;
    rhs(t + 0.5 * h, stage, k3);
    stage = c + h * k3;
    rhs(t + h, stage, k4);
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (s == steps) ? t_end : t0 + s * options.dt;
    if (!std::isfinite(c.squaredNorm())) {
      throw Error(ErrorKind::NonFiniteState, "non-finite amplitude at t = " + std::to_string(t));
    }
    if (s % options.stride == 0 || s == steps) record(t);
  }

  const std::size_t m = rec.size();
  rec.v_est.assign(m, kNaN);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    rec.v_est[i] = (rec.centroid[i + 1] - rec.centroid[i - 1]) / (rec.t[i + 1] - rec.t[i - 1]);
  }
  result.final_state = {std::move(c), t};
  return result;
}

EvolveResult evolve(const SpinWaveState& initial, const ChainParams& params,
                    const ControlField& field, const ThetaSchedule& schedule,
                    const std::optional<ProbePulse>& pulse, double t_end,
                    const EvolveOptions& options) {
  const ChainOperator op(params, field);
  return evolve(initial, op, schedule, pulse, t_end, options);
}

double estimate_group_velocity(const TrajectoryRecord& record, double t0, double t1) {
  double st = 0.0, sz = 0.0, stt = 0.0, stz = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (record.t[i] < t0 || record.t[i] > t1) continue;
    if (!(record.norm2[i] > 1e-12) || !std::isfinite(record.centroid[i])) continue;
    st += record.t[i];
    sz += record.centroid[i];
    ++count;
  }
  if (count < 5) {
    throw Error(ErrorKind::InsufficientSamples,
                "velocity window holds " + std::to_string(count) + " usable samples, need 5");
  }
  const double tm = st / count, zm = sz / count;
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (record.t[i] < t0 || record.t[i] > t1) continue;
    if (!(record.norm2[i] > 1e-12) || !std::isfinite(record.centroid[i])) continue;
    stt += (record.t[i] - tm) * (record.t[i] - tm);
    stz += (record.t[i] - tm) * (record.centroid[i] - zm);
  }
  if (!(stt > 0.0)) throw Error(ErrorKind::InsufficientSamples, "velocity window has zero span");
  return stz / stt;
}

SpinWaveState make_bloch_wavepacket(const ChainParams& params, const ControlField& field,
                                    Band band, double k_center, double width_sites,
                                    std::optional<int> center_site) {
  params.validate();
  if (!(width_sites >= 3.0)) {
    throw Error(ErrorKind::InvalidParams, "wavepacket width must be >= 3 sites");
  }
  const int n0 = center_site.value_or(params.N / 2);
  if (n0 < 0 || n0 >= params.N) throw Error(ErrorKind::InvalidParams, "center site outside chain");
  const MomentumKernel kernel(params);
  if (!is_subradiant(k_center, field, params)) {
    throw Error(ErrorKind::LightLineSingularity,
                "k_center = " + std::to_string(k_center) + " is outside the subradiant window");
  }
  const Eigen::Vector2cd u = band_spinor(k_center, band, field, kernel);
  SpinWaveState state = SpinWaveState::zero(params);
  const double z0 = params.position(n0);
  const double w = width_sites * params.a;
  for (int i = 0; i < params.N; ++i) {
    const double z = params.position(i);
    const double g = std::exp(-(z - z0) * (z - z0) / (2.0 * w * w));
    const cplx bloch = g * std::polar(1.0, k_center * z);
    state.amplitudes(2 * i) = bloch * u(0) * std::polar(1.0, -field.k_c * z);
    state.amplitudes(2 * i + 1) = bloch * u(1) * std::polar(1.0, field.k_c * z);
  }
  state.amplitudes /= state.amplitudes.norm();
  return state;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec, bool wide) {
  out << "t,theta,norm2,centroid,width_rms,width_fit,v_est,P_plus,P_minus";
  const bool sites = wide && !rec.site_population.empty();
  if (sites) {
    for (Eigen::Index i = 0; i < rec.site_population.front().size(); ++i) out << ",p_" << i;
  }
  out << '\n';
  for (std::size_t i = 0; i < rec.size(); ++i) {
    out << format_double(rec.t[i]) << ',' << format_double(rec.theta[i]) << ','
        << format_double(rec.norm2[i]) << ',' << format_double(rec.centroid[i]) << ','
        << format_double(rec.width_rms[i]) << ',' << format_double(rec.width_fit[i]) << ','
        << format_double(rec.v_est[i]) << ',' << format_double(rec.P_plus[i]) << ','
        << format_double(rec.P_minus[i]);
    if (sites) {
      for (Eigen::Index j = 0; j < rec.site_population[i].size(); ++j) {
        out << ',' << format_double(rec.site_population[i](j));
      }
    }
    out << '\n';
  }
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InsufficientSamples, "pearson needs two equal-length series");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace atomchain
