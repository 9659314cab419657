#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atomchain/bands.hpp"
#include "atomchain/dynamics.hpp"
#include "atomchain/lattice.hpp"

namespace atomchain {

enum class Scenario { Free, TrapRelease, TrapReflect, BandSweep };

std::string_view to_string(Scenario s);
/// Accepts "trap_release" and "trap-release" spellings. Throws ValidationError.
Scenario parse_scenario(std::string_view name);

enum class InitialKind { Vacuum, Wavepacket };

struct InitialCondition {
  InitialKind kind = InitialKind::Vacuum;
  Band band = Band::Lower;
  double k_center = 0.0;  // 0 means the zone edge pi/a
  double width_sites = 12.0;
  int center_site = -1;  // -1 means N/2

  bool operator==(const InitialCondition&) const = default;
};

struct IntegrationSettings {
  double dt = 5e-3;
  int stride = 200;
  double t_end = 0.0;  // 0 means the full schedule
  bool fit_width = true;
  bool keep_sites = false;

  bool operator==(const IntegrationSettings&) const = default;
};

// Acceptance thresholds for the summary flags, not physics.
struct SummaryThresholds {
  double hold_velocity_factor = 0.05;
  double width_change = 0.2;
  double release_tolerance = 0.2;
  double exchange_correlation = -0.9;
  double adiabatic_factor = 10.0;  // ramp time >= factor / min gap

  bool operator==(const SummaryThresholds&) const = default;
};

struct OutputSettings {
  std::filesystem::path dir = ".";
  std::string prefix = "run";

  bool operator==(const OutputSettings&) const = default;
};

struct ProtocolConfig {
  Scenario scenario = Scenario::TrapRelease;
  ChainParams chain;
  ControlField field;
  ThetaSchedule schedule;
  bool probe_enabled = true;
  ProbePulse probe;
  InitialCondition initial;
  IntegrationSettings integration;
  GridSpec grid;
  SummaryThresholds thresholds;
  OutputSettings output;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  /// Non-fatal remarks (e.g. no subradiant window for a >= 1/2).
  std::vector<std::string> warnings() const;

  bool operator==(const ProtocolConfig&) const = default;
};

/// hold(0, 200), cosine_ramp(0, pi/2, 100), oscillate(pi/2, 0.15 pi, 60, 3),
/// cosine_ramp(pi/2, final, 100), hold(final, 60).
ThetaSchedule default_trap_schedule(double final_theta);

ProtocolConfig default_config(Scenario scenario);

struct PhaseWindows {
  double pre_begin = 0.0, pre_end = 0.0;
  double trap_begin = 0.0, trap_end = 0.0;  // equal when there is no trap
  double post_begin = 0.0, post_end = 0.0;
  std::vector<std::pair<double, double>> ramps;
  bool has_trap = false;
};

/// Velocity windows from the schedule: pre-trap starts 3 tau after the probe
/// peak, the trap spans the first ramp's end to the last ramp's start.
PhaseWindows phase_windows(const ProtocolConfig& config);

struct DispersionReport {
  double width_trap_start = 0.0;
  double width_min = 0.0;
  double width_release = 0.0;
  double fractional_change = 0.0;  // (release - start) / start
  bool rephasing = false;          // width shrinks somewhere inside the trap
};

/// Throws Error(InsufficientSamples) if the window has fewer than 2 samples.
DispersionReport dispersion_report(const TrajectoryRecord& record, double trap_start,
                                   double release, bool use_fit = false);

struct ProtocolSummary {
  Scenario scenario = Scenario::Free;
  double peak_population = 0.0;
  double peak_time = 0.0;
  double final_norm2 = 0.0;
  std::optional<double> v_pre, v_trap, v_post;
  std::optional<DispersionReport> dispersion;
  std::optional<double> exchange_correlation;
  std::optional<bool> hold_ok, release_ok, reflect_ok, width_ok, exchange_ok;
  std::vector<std::string> warnings;
};

struct ProtocolResult {
  std::optional<TrajectoryRecord> record;
  std::optional<BandStructure> bands;
  ProtocolSummary summary;
};

ProtocolResult run_protocol(const ProtocolConfig& config);

/// Runs independent configs on up to `threads` workers.
std::vector<ProtocolResult> run_batch(const std::vector<ProtocolConfig>& configs, int threads);

/// Minimum upper/lower gap over the central half of the subradiant window for
/// theta sampled along [from, to].
double minimum_band_gap(const ChainParams& params, const ControlField& field, double from,
                        double to);

void write_summary(std::ostream& out, const ProtocolSummary& summary);

}  // namespace atomchain
