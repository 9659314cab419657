#include "atomchain/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "atomchain/csv.hpp"
#include "atomchain/error.hpp"
#include "parallel.hpp"

namespace atomchain {
namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
  if (!ok) throw Error(ErrorKind::ValidationError, field + " must be " + constraint);
}

double sample_nearest(const TrajectoryRecord& rec, const std::vector<double>& values, double t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rec.size(); ++i) {
    if (std::abs(rec.t[i] - t) < std::abs(rec.t[best] - t)) best = i;
  }
  return values[best];
}

std::optional<double> try_velocity(const TrajectoryRecord& rec, double t0, double t1,
                                   const char* label, std::vector<std::string>& warnings) {
  try {
    return estimate_group_velocity(rec, t0, t1);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientSamples) throw;
    warnings.push_back(std::string(label) + " velocity unavailable: " + e.what());
    return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Free: return "free";
    case Scenario::TrapRelease: return "trap_release";
    case Scenario::TrapReflect: return "trap_reflect";
    case Scenario::BandSweep: return "band_sweep";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  for (Scenario s : {Scenario::Free, Scenario::TrapRelease, Scenario::TrapReflect,
                     Scenario::BandSweep}) {
    if (key == to_string(s)) return s;
  }
  throw Error(ErrorKind::ValidationError,
              "scenario must be one of free, trap_release, trap_reflect, band_sweep (got '" +
                  std::string(name) + "')");
}

void ProtocolConfig::validate() const {
  try {
    chain.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, std::string("chain: ") + e.what());
  }
  require(std::isfinite(field.delta), "field.delta", "finite");
  require(std::isfinite(field.theta) && field.theta >= 0.0 && field.theta <= kPi,
          "field.theta", "in [0, pi]");
  require(std::isfinite(field.k_c), "field.k_c", "finite");
  require(std::isfinite(field.Delta), "field.Delta", "finite");
  require(grid.nodes >= 2, "grid.nodes", ">= 2");
  require(grid.exclusion >= 0.0 && grid.exclusion < 0.5, "grid.exclusion", "in [0, 0.5)");
  require(grid.threads >= 1, "grid.threads", ">= 1");
  if (scenario == Scenario::BandSweep) return;

  try {
    schedule.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, std::string("schedule: ") + e.what());
  }
  if (probe_enabled) probe.validate(chain);
  require(integration.dt > 0.0, "integration.dt", "> 0");
  require(integration.stride >= 1, "integration.stride", ">= 1");
  require(integration.t_end >= 0.0 && integration.t_end <= schedule.duration() + 1e-9,
          "integration.t_end", "within the schedule duration");
  require(thresholds.hold_velocity_factor > 0.0, "thresholds.hold_velocity_factor", "> 0");
  require(thresholds.width_change > 0.0, "thresholds.width_change", "> 0");
  require(thresholds.release_tolerance > 0.0, "thresholds.release_tolerance", "> 0");
  if (initial.kind == InitialKind::Wavepacket) {
    require(initial.width_sites >= 3.0, "initial.width", ">= 3");
    require(initial.center_site < chain.N, "initial.center_site", "< chain.N");
  }
  if (scenario == Scenario::TrapRelease) {
    require(std::abs(schedule.theta(schedule.duration())) < 1e-9, "schedule",
            "ending at theta = 0 for trap_release");
  }
}

std::vector<std::string> ProtocolConfig::warnings() const {
  std::vector<std::string> out;
  if (!chain.subradiant_regime()) {
    out.push_back("chain.a = " + format_double(chain.a) +
                  " >= 0.5: no subradiant guided modes, transport is not protected");
  }
  return out;
}

ThetaSchedule default_trap_schedule(double final_theta) {
  const double half = 0.5 * kPi;
  return ThetaSchedule({Hold{0.0, 200.0}, CosineRamp{0.0, half, 100.0},
                        Oscillate{half, 0.15 * kPi, 60.0, 3}, CosineRamp{half, final_theta, 100.0},
                        Hold{final_theta, 60.0}});
}

ProtocolConfig default_config(Scenario scenario) {
  ProtocolConfig c;
  c.scenario = scenario;
  switch (scenario) {
    case Scenario::TrapRelease: c.schedule = default_trap_schedule(0.0); break;
    case Scenario::TrapReflect: c.schedule = default_trap_schedule(0.8 * kPi); break;
    case Scenario::Free: c.schedule = ThetaSchedule::constant(0.0, 400.0); break;
    case Scenario::BandSweep:
      c.schedule = ThetaSchedule::constant(0.0, 1.0);
      c.probe_enabled = false;
      break;
  }
  c.output.prefix = std::string(to_string(scenario));
  return c;
}

PhaseWindows phase_windows(const ProtocolConfig& config) {
  const ThetaSchedule& s = config.schedule;
  const double t_end = config.integration.t_end > 0.0 ? config.integration.t_end : s.duration();
  PhaseWindows w;
  const std::vector<double> starts = s.boundaries();
  double first_ramp = -1.0, first_ramp_end = 0.0, last_ramp = 0.0, last_ramp_end = 0.0;
  double first_hold_end = -1.0;
  for (std::size_t i = 0; i < s.segments().size(); ++i) {
    const Segment& seg = s.segments()[i];
    const double d = segment_duration(seg);
    if (d <= 0.0) continue;
    if (first_ramp < 0.0 && first_hold_end < 0.0 && std::holds_alternative<Hold>(seg)) {
      first_hold_end = starts[i] + d;
    }
    if (std::holds_alternative<CosineRamp>(seg)) {
      w.ramps.emplace_back(starts[i], starts[i] + d);
      if (first_ramp < 0.0) {
        first_ramp = starts[i];
        first_ramp_end = starts[i] + d;
      }
      last_ramp = starts[i];
      last_ramp_end = starts[i] + d;
    }
  }
  const double quiet = config.probe_enabled ? config.probe.center + 3.0 * config.probe.width : 0.0;
  const double creation_end = first_ramp >= 0.0 ? first_ramp : t_end;
  w.pre_begin = std::min(quiet, creation_end);
  w.pre_end = creation_end;
  // A first hold too short to clear the creation transient: use its last 40%.
  if (w.pre_end - w.pre_begin < 1e-9 && first_hold_end > 0.0) {
    w.pre_begin = 0.6 * first_hold_end;
    w.pre_end = first_hold_end;
  }
  w.has_trap = w.ramps.size() >= 2;
  if (w.has_trap) {
    w.trap_begin = first_ramp_end;
    w.trap_end = last_ramp;
    w.post_begin = last_ramp_end;
  } else {
    w.trap_begin = w.trap_end = creation_end;
    w.post_begin = first_ramp >= 0.0 ? first_ramp_end : creation_end;
  }
  w.post_end = t_end;
  return w;
}

DispersionReport dispersion_report(const TrajectoryRecord& rec, double trap_start, double release,
                                   bool use_fit) {
  const std::vector<double>& width = use_fit ? rec.width_fit : rec.width_rms;
  std::vector<double> inside;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (rec.t[i] >= trap_start - 1e-9 && rec.t[i] <= release + 1e-9 && std::isfinite(width[i])) {
      inside.push_back(width[i]);
    }
  }
  if (inside.size() < 2) {
    throw Error(ErrorKind::InsufficientSamples, "trap window holds fewer than 2 width samples");
  }
  DispersionReport r;
  r.width_trap_start = sample_nearest(rec, width, trap_start);
  r.width_release = sample_nearest(rec, width, release);
  r.width_min = *std::min_element(inside.begin(), inside.end());
  r.fractional_change = (r.width_release - r.width_trap_start) / r.width_trap_start;
  const double tol = 1e-9 * r.width_trap_start;
  for (std::size_t i = 1; i < inside.size(); ++i) {
    if (inside[i] < inside[i - 1] - tol) r.rephasing = true;
  }
  return r;
}

double minimum_band_gap(const ChainParams& params, const ControlField& field, double from,
                        double to) {
  const MomentumKernel kernel(params);
  double gap = std::numeric_limits<double>::infinity();
  constexpr int kThetas = 9;
  constexpr int kSamples = 101;
  for (int j = 0; j < kThetas; ++j) {
    ControlField f = field;
    f.theta = from + (to - from) * j / (kThetas - 1);
    const auto [left, right] = subradiant_window(f, params);
    const double mid = 0.5 * (left + right), half = 0.25 * (right - left);
    for (int i = 0; i < kSamples; ++i) {
      const double k = mid - half + 2.0 * half * i / (kSamples - 1);
      const BandPair e = band_eigenvalues(k, f, kernel);
      gap = std::min(gap, std::abs(e.upper - e.lower));
    }
  }
  return gap;
}

ProtocolResult run_protocol(const ProtocolConfig& config) {
  config.validate();
  ProtocolResult result;
  ProtocolSummary& sum = result.summary;
  sum.scenario = config.scenario;
  sum.warnings = config.warnings();

  if (config.scenario == Scenario::BandSweep) {
    result.bands = band_sweep(config.chain, config.field, config.grid);
    return result;
  }

  const double t_end =
      config.integration.t_end > 0.0 ? config.integration.t_end : config.schedule.duration();
  ControlField field = config.field;
  field.theta = config.schedule.theta(0.0);

  for (const Segment& seg : config.schedule.segments()) {
    const auto* ramp = std::get_if<CosineRamp>(&seg);
    if (!ramp || ramp->duration <= 0.0 || !config.chain.subradiant_regime()) continue;
    try {
      const double gap = minimum_band_gap(config.chain, field, ramp->from, ramp->to);
      if (ramp->duration < config.thresholds.adiabatic_factor / gap) {
        sum.warnings.push_back("ramp " + format_double(ramp->from) + " -> " +
                               format_double(ramp->to) + " lasts " +
                               format_double(ramp->duration) + ", below " +
                               format_double(config.thresholds.adiabatic_factor) +
                               " / min gap = " +
                               format_double(config.thresholds.adiabatic_factor / gap) +
                               " (not adiabatic)");
      }
    } catch (const Error& e) {
      sum.warnings.push_back(std::string("adiabaticity check skipped: ") + e.what());
    }
  }

  SpinWaveState initial = SpinWaveState::zero(config.chain);
  if (config.initial.kind == InitialKind::Wavepacket) {
    const double k = config.initial.k_center != 0.0 ? config.initial.k_center
                                                    : config.chain.zone_edge();
    std::optional<int> site;
    if (config.initial.center_site >= 0) site = config.initial.center_site;
    initial = make_bloch_wavepacket(config.chain, field, config.initial.band, k,
                                    config.initial.width_sites, site);
  }
  EvolveOptions opts;
  opts.dt = config.integration.dt;
  opts.stride = config.integration.stride;
  opts.keep_sites = config.integration.keep_sites;
  opts.fit_width = config.integration.fit_width;
  std::optional<ProbePulse> pulse;
  if (config.probe_enabled) pulse = config.probe;
  EvolveResult run = evolve(initial, config.chain, field, config.schedule, pulse, t_end, opts);
  const TrajectoryRecord& rec = run.record;

  const auto peak = std::max_element(rec.norm2.begin(), rec.norm2.end());
  sum.peak_population = *peak;
  sum.peak_time = rec.t[peak - rec.norm2.begin()];
  sum.final_norm2 = rec.norm2.back();

  const PhaseWindows w = phase_windows(config);
  sum.v_pre = try_velocity(rec, w.pre_begin, w.pre_end, "pre-trap", sum.warnings);
  if (w.has_trap) {
    sum.v_trap = try_velocity(rec, w.trap_begin, w.trap_end, "trap", sum.warnings);
    sum.v_post = try_velocity(rec, w.post_begin, w.post_end, "post-release", sum.warnings);
    try {
      sum.dispersion = dispersion_report(rec, w.trap_begin, w.trap_end);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientSamples) throw;
      sum.warnings.push_back(std::string("dispersion report unavailable: ") + e.what());
    }
  }

  std::vector<double> dplus, dminus;
  for (std::size_t i = 1; i < rec.size(); ++i) {
    for (const auto& [a, b] : w.ramps) {
      if (rec.t[i - 1] >= a - 1e-9 && rec.t[i] <= b + 1e-9) {
        const double h = rec.t[i] - rec.t[i - 1];
        dplus.push_back((rec.P_plus[i] - rec.P_plus[i - 1]) / h);
        dminus.push_back((rec.P_minus[i] - rec.P_minus[i - 1]) / h);
        break;
      }
    }
  }
  if (dplus.size() >= 3) {
    sum.exchange_correlation = pearson(dplus, dminus);
    sum.exchange_ok = *sum.exchange_correlation <= config.thresholds.exchange_correlation;
  }

  const SummaryThresholds& th = config.thresholds;
  if (sum.v_pre && sum.v_trap) {
    sum.hold_ok = std::abs(*sum.v_trap) <= th.hold_velocity_factor * std::abs(*sum.v_pre);
  }
  if (sum.v_pre && sum.v_post) {
    const bool same_sign = (*sum.v_pre > 0.0) == (*sum.v_post > 0.0);
    if (config.scenario == Scenario::TrapRelease) {
      sum.release_ok = same_sign && std::abs(std::abs(*sum.v_post) - std::abs(*sum.v_pre)) <=
                                        th.release_tolerance * std::abs(*sum.v_pre);
    } else if (config.scenario == Scenario::TrapReflect) {
      sum.reflect_ok = !same_sign && *sum.v_post != 0.0;
    }
  }
  if (sum.dispersion) sum.width_ok = std::abs(sum.dispersion->fractional_change) <= th.width_change;

  result.record = std::move(run.record);
  return result;
}

std::vector<ProtocolResult> run_batch(const std::vector<ProtocolConfig>& configs, int threads) {
  std::vector<ProtocolResult> results(configs.size());
  detail::parallel_for(static_cast<int>(configs.size()), threads,
                       [&](int i) { results[i] = run_protocol(configs[i]); });
  return results;
}

void write_summary(std::ostream& out, const ProtocolSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : "na"; };
  auto flag = [](const std::optional<bool>& v) -> std::string {
    return v ? (*v ? "true" : "false") : "na";
  };
  out << "scenario = " << to_string(s.scenario) << '\n'
      << "peak_population = " << format_double(s.peak_population) << '\n'
      << "peak_time = " << format_double(s.peak_time) << '\n'
      << "final_norm2 = " << format_double(s.final_norm2) << '\n'
      << "v_pre = " << opt(s.v_pre) << '\n'
      << "v_trap = " << opt(s.v_trap) << '\n'
      << "v_post = " << opt(s.v_post) << '\n';
  if (s.dispersion) {
    out << "width_trap_start = " << format_double(s.dispersion->width_trap_start) << '\n'
        << "width_min = " << format_double(s.dispersion->width_min) << '\n'
        << "width_release = " << format_double(s.dispersion->width_release) << '\n'
        << "width_fractional_change = " << format_double(s.dispersion->fractional_change) << '\n'
        << "rephasing = " << (s.dispersion->rephasing ? "true" : "false") << '\n';
  }
  out << "exchange_correlation = " << opt(s.exchange_correlation) << '\n'
      << "hold_ok = " << flag(s.hold_ok) << '\n'
      << "release_ok = " << flag(s.release_ok) << '\n'
      << "reflect_ok = " << flag(s.reflect_ok) << '\n'
      << "width_ok = " << flag(s.width_ok) << '\n'
      << "exchange_ok = " << flag(s.exchange_ok) << '\n';
  for (std::size_t i = 0; i < s.warnings.size(); ++i) {
    out << "warning." << i << " = " << s.warnings[i] << '\n';
  }
}

}  // namespace atomchain
