#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <sstream>

#include "atomchain/dynamics.hpp"
#include "atomchain/error.hpp"

using namespace atomchain;

namespace {

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

ChainParams chain(int n) {
  ChainParams p;
  p.N = n;
  return p;
}

ControlField field_at(double theta) {
  ControlField f;
  f.theta = theta;
  return f;
}

SpinWaveState random_state(const ChainParams& p, unsigned seed) {
  std::srand(seed);
  SpinWaveState s = SpinWaveState::zero(p);
  s.amplitudes = StateVector::Random(2 * p.N);
  s.amplitudes /= s.amplitudes.norm();
  return s;
}

// exp(-i H t) c for constant theta.
StateVector exact(const ChainParams& p, const ControlField& f, const StateVector& c, double t) {
  const Eigen::MatrixXcd h = build_hamiltonian(p, f, f.theta).matrix;
  const Eigen::MatrixXcd u = (cplx(0.0, -t) * h).exp();
  return u * c;
}

}  // namespace

TEST_CASE("single atom decays as exp(-gamma t)") {
  const ChainParams p = chain(1);
  for (double theta : {0.0, 1.0}) {
    const ControlField f = field_at(theta);
    SpinWaveState s = SpinWaveState::zero(p);
    s.amplitudes(0) = 1.0;
    EvolveOptions opt;
    opt.dt = 1e-3;
    opt.stride = 100;
    const EvolveResult r = evolve(s, p, f, ThetaSchedule::constant(theta, 5.0), std::nullopt, 5.0, opt);
    for (std::size_t i = 0; i < r.record.size(); ++i) {
      CHECK(std::abs(r.record.norm2[i] - std::exp(-r.record.t[i])) < 1e-8);
    }
    CHECK(r.final_state.time == doctest::Approx(5.0));
  }
}

TEST_CASE("RK4 against the matrix exponential") {
  const ChainParams p = chain(20);
  const ControlField f = field_at(0.7);
  const SpinWaveState s = random_state(p, 7);
  const double t_end = 4.0;
  const StateVector ref = exact(p, f, s.amplitudes, t_end);

  auto error_at = [&](double dt) {
    EvolveOptions opt;
    opt.dt = dt;
    opt.stability_limit = 1.0;
    const EvolveResult r = evolve(s, p, f, ThetaSchedule::constant(f.theta, t_end), std::nullopt, t_end, opt);
    return (r.final_state.amplitudes - ref).norm();
  };
  CHECK(error_at(5e-3) < 1e-8);
  const double ratio = error_at(0.04) / error_at(0.02);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("evolution properties") {
  const ChainParams p = chain(24);
  const ControlField f = field_at(0.0);
  const ThetaSchedule sched({Hold{0.3, 2.0}, CosineRamp{0.3, 1.9, 4.0}, Hold{1.9, 2.0}});
  EvolveOptions opt;
  opt.dt = 5e-3;
  opt.stride = 10;

  SUBCASE("norm is non-increasing and P+ + P- = norm") {
    const EvolveResult r = evolve(random_state(p, 3), p, f, sched, std::nullopt, 8.0, opt);
    for (std::size_t i = 0; i < r.record.size(); ++i) {
      CHECK(std::abs(r.record.P_plus[i] + r.record.P_minus[i] - r.record.norm2[i]) < 1e-12);
      if (i > 0) CHECK(r.record.norm2[i] <= r.record.norm2[i - 1] + 1e-15);
    }
  }
  SUBCASE("linear in the initial state") {
    const SpinWaveState a = random_state(p, 1), b = random_state(p, 2);
    SpinWaveState mix = a;
    const cplx alpha(0.3, -1.2), beta(-0.8, 0.1);
    mix.amplitudes = alpha * a.amplitudes + beta * b.amplitudes;
    const auto fa = evolve(a, p, f, sched, std::nullopt, 8.0, opt).final_state.amplitudes;
    const auto fb = evolve(b, p, f, sched, std::nullopt, 8.0, opt).final_state.amplitudes;
    const auto fm = evolve(mix, p, f, sched, std::nullopt, 8.0, opt).final_state.amplitudes;
    CHECK((fm - alpha * fa - beta * fb).norm() < 1e-12);
  }
  SUBCASE("deterministic") {
    const auto r1 = evolve(random_state(p, 5), p, f, sched, std::nullopt, 8.0, opt);
    const auto r2 = evolve(random_state(p, 5), p, f, sched, std::nullopt, 8.0, opt);
    CHECK(r1.final_state.amplitudes == r2.final_state.amplitudes);
    CHECK(r1.record.centroid == r2.record.centroid);
  }
  SUBCASE("vacuum stays empty without a probe") {
    const auto r = evolve(SpinWaveState::zero(p), p, f, sched, std::nullopt, 8.0, opt);
    CHECK(r.final_state.norm2() == 0.0);
    CHECK(std::isnan(r.record.centroid.back()));
  }
  SUBCASE("probe fills an empty chain") {
    ProbePulse pulse;
    pulse.site = 3;
    pulse.center = 2.0;
    pulse.width = 0.5;
    pulse.amplitude = 0.1;
    const auto r = evolve(SpinWaveState::zero(p), p, f, sched, pulse, 8.0, opt);
    CHECK(r.record.norm2.back() > 0.0);
    CHECK(r.record.norm2.back() < 0.05);
  }
}

TEST_CASE("record sampling") {
  const ChainParams p = chain(8);
  const ControlField f = field_at(0.0);
  EvolveOptions opt;
  opt.dt = 0.01;
  opt.stride = 30;
  opt.keep_sites = true;
  const auto r = evolve(random_state(p, 9), p, f, ThetaSchedule::constant(0.0, 1.0), std::nullopt, 1.0, opt);
  // t = 0, 0.3, 0.6, 0.9 and the final step.
  REQUIRE(r.record.size() == 5);
  CHECK(r.record.t.front() == 0.0);
  CHECK(r.record.t[1] == doctest::Approx(0.3));
  CHECK(r.record.t.back() == doctest::Approx(1.0));
  CHECK(r.record.site_population.size() == 5);
  CHECK(std::isnan(r.record.v_est.front()));
  CHECK(std::isnan(r.record.v_est.back()));
  CHECK(std::isfinite(r.record.v_est[2]));

  std::ostringstream narrow, wide;
  write_trajectory_csv(narrow, r.record, false);
  write_trajectory_csv(wide, r.record, true);
  CHECK(narrow.str().rfind("t,theta,norm2,centroid,width_rms,width_fit,v_est,P_plus,P_minus\n", 0) == 0);
  CHECK(wide.str().rfind("t,theta,norm2,centroid,width_rms,width_fit,v_est,P_plus,P_minus,p_0,", 0) == 0);
  std::size_t lines = 0;
  for (char c : narrow.str()) lines += c == '\n';
  CHECK(lines == 6);
}

TEST_CASE("evolve errors") {
  const ChainParams p = chain(8);
  const ControlField f = field_at(0.0);
  const ThetaSchedule sched = ThetaSchedule::constant(0.0, 2.0);
  const SpinWaveState s = random_state(p, 4);
  EvolveOptions big;
  big.dt = 0.5;
  CHECK(throws_kind(ErrorKind::StepTooLarge, [&] { evolve(s, p, f, sched, std::nullopt, 2.0, big); }));
  CHECK(throws_kind(ErrorKind::ScheduleMismatch, [&] { evolve(s, p, f, sched, std::nullopt, 3.0); }));
  SpinWaveState nan = s;
  nan.amplitudes(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK(throws_kind(ErrorKind::NonFiniteState, [&] { evolve(nan, p, f, sched, std::nullopt, 2.0); }));
  CHECK(throws_kind(ErrorKind::EmptyState, [&] { observables(SpinWaveState::zero(p), p); }));
}

TEST_CASE("observables") {
  const ChainParams p = chain(5);
  SpinWaveState s = SpinWaveState::zero(p);
  s.amplitudes(2 * 1) = 0.6;            // site 1, +
  s.amplitudes(2 * 3 + 1) = cplx(0.0, 0.8);  // site 3, -
  const Observables o = observables(s, p);
  CHECK(o.norm2 == doctest::Approx(1.0));
  CHECK(o.P_plus == doctest::Approx(0.36));
  CHECK(o.P_minus == doctest::Approx(0.64));
  CHECK(o.site_population(1) == doctest::Approx(0.36));
  CHECK(o.site_population(3) == doctest::Approx(0.64));
  const double mean = (0.36 * 1 + 0.64 * 3) * p.a;
  CHECK(o.centroid == doctest::Approx(mean));
  const double var = (0.36 * 1 + 0.64 * 9) * p.a * p.a - mean * mean;
  CHECK(o.width_rms == doctest::Approx(std::sqrt(var)));

  const Observables empty = populations(SpinWaveState::zero(p), p);
  CHECK(empty.norm2 == 0.0);
  CHECK(std::isnan(empty.centroid));
}

TEST_CASE("gaussian width fit") {
  const ChainParams p = chain(120);
  const double sigma = 8.0 * p.a;
  const double mu = 57.3 * p.a;
  Eigen::VectorXd pop(p.N);
  for (int n = 0; n < p.N; ++n) {
    const double d = p.position(n) - mu;
    pop(n) = 0.02 * std::exp(-0.5 * d * d / (sigma * sigma));
  }
  CHECK(gaussian_fit_width(pop, p) == doctest::Approx(sigma).epsilon(0.01));
  CHECK(std::isnan(gaussian_fit_width(Eigen::VectorXd::Zero(p.N), p)));
}

TEST_CASE("group velocity estimation") {
  TrajectoryRecord r;
  for (int i = 0; i <= 20; ++i) {
    r.t.push_back(i);
    r.centroid.push_back(3.0 + 0.25 * i);
    r.norm2.push_back(1.0);
  }
  CHECK(estimate_group_velocity(r, 0.0, 20.0) == doctest::Approx(0.25));
  CHECK(estimate_group_velocity(r, 5.0, 9.0) == doctest::Approx(0.25));
  CHECK(throws_kind(ErrorKind::InsufficientSamples, [&] { estimate_group_velocity(r, 5.0, 8.0); }));
  for (int i = 0; i < 10; ++i) r.norm2[i] = 0.0;
  CHECK(throws_kind(ErrorKind::InsufficientSamples, [&] { estimate_group_velocity(r, 0.0, 10.0); }));

  CHECK(pearson({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
}

TEST_CASE("bloch wavepacket") {
  const ChainParams p = chain(200);
  const ControlField f = field_at(0.0);
  const MomentumKernel kernel(p);
  const double k = p.zone_edge();
  const SpinWaveState s = make_bloch_wavepacket(p, f, Band::Lower, k, 12.0);
  CHECK(s.norm2() == doctest::Approx(1.0));
  const Observables o = observables(s, p);
  CHECK(o.centroid == doctest::Approx(p.position(100)).epsilon(1e-3));
  // width_sites is the amplitude envelope; the population is narrower by sqrt 2.
  CHECK(o.width_rms == doctest::Approx(12.0 * p.a / std::sqrt(2.0)).epsilon(0.02));
  // At theta = 0 the lower band sits entirely in one slot.
  CHECK(std::min(o.P_plus, o.P_minus) < 1e-20);

  // Rayleigh quotient sits close to the band energy.
  const Eigen::MatrixXcd h = build_hamiltonian(p, f, f.theta).matrix;
  const cplx e = s.amplitudes.dot(h * s.amplitudes);
  const BandPair b = band_eigenvalues(k, f, kernel);
  CHECK(std::abs(e.real() - b.lower.real()) < 0.02);
  CHECK(std::abs(e.imag()) < 1e-3);

  CHECK(throws_kind(ErrorKind::InvalidParams, [&] { make_bloch_wavepacket(p, f, Band::Lower, k, 2.0); }));
  CHECK(throws_kind(ErrorKind::LightLineSingularity,
                    [&] { make_bloch_wavepacket(p, f, Band::Lower, 0.0, 12.0); }));

  // Short free flight: little loss and a centroid moving at the band velocity.
  EvolveOptions opt;
  opt.dt = 8e-3;
  opt.stride = 125;
  const auto r = evolve(s, p, f, ThetaSchedule::constant(0.0, 40.0), std::nullopt, 40.0, opt);
  CHECK(1.0 - r.record.norm2.back() < 1e-3);
  const double v = estimate_group_velocity(r.record, 10.0, 40.0);
  CHECK(v == doctest::Approx(group_velocity(k, Band::Lower, f, kernel)).epsilon(0.1));
}
