#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "atomchain/bands.hpp"
#include "atomchain/lattice.hpp"

namespace atomchain {

struct SpinWaveState {
  StateVector amplitudes;  // interleaved (n, +), (n, -)
  double time = 0.0;

  static SpinWaveState zero(const ChainParams& params, double time = 0.0);
  double norm2() const { return amplitudes.squaredNorm(); }
};

struct Observables {
  Eigen::VectorXd site_population;  // p_n
  double P_plus = 0.0;
  double P_minus = 0.0;
  double norm2 = 0.0;
  double centroid = 0.0;
  double width_rms = 0.0;
};

/// Throws Error(EmptyState) when norm^2 < 1e-30.
Observables observables(const SpinWaveState& state, const ChainParams& params);

/// Populations only; never throws on an empty state.
Observables populations(const SpinWaveState& state, const ChainParams& params);

/// Standard deviation of a Gaussian least-squares fit to p_n over z_n.
/// Returns NaN when the fit does not converge.
double gaussian_fit_width(const Eigen::VectorXd& population, const ChainParams& params);

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> norm2;
  std::vector<double> centroid;  // NaN while the state is empty
  std::vector<double> width_rms;
  std::vector<double> width_fit;  // NaN unless requested
  std::vector<double> v_est;      // local centroid slope, NaN at the ends
  std::vector<double> P_plus;
  std::vector<double> P_minus;
  std::vector<Eigen::VectorXd> site_population;  // empty unless kept

  std::size_t size() const noexcept { return t.size(); }
};

struct EvolveOptions {
  double dt = 5e-3;
  int stride = 200;              // record every `stride` steps
  bool keep_sites = false;       // per-site populations in the record
  bool fit_width = false;        // Gaussian-fit width per sample
  double stability_limit = 0.1;  // dt * ||H||_1 bound
};

struct EvolveResult {
  TrajectoryRecord record;
  SpinWaveState final_state;
};

/// Classical RK4 for i dc/dt = H(theta(t)) c + f(t) from initial.time to
/// t_end. The step is shortened to land on t_end exactly.
/// Throws StepTooLarge, NonFiniteState, ScheduleMismatch.
EvolveResult evolve(const SpinWaveState& initial, const ChainOperator& op,
                    const ThetaSchedule& schedule, const std::optional<ProbePulse>& pulse,
                    double t_end, const EvolveOptions& options = {});

EvolveResult evolve(const SpinWaveState& initial, const ChainParams& params,
                    const ControlField& field, const ThetaSchedule& schedule,
                    const std::optional<ProbePulse>& pulse, double t_end,
                    const EvolveOptions& options = {});

/// Least-squares slope of the centroid over samples with t in [t0, t1].
/// Throws Error(InsufficientSamples) with fewer than 5 usable samples.
double estimate_group_velocity(const TrajectoryRecord& record, double t0, double t1);

/// Gaussian superposition of Bloch waves around k_center on one band, with
/// the per-site spinor (u+ e^{-i k_c z}, u- e^{+i k_c z}). width_sites is the
/// std of the amplitude envelope. Normalized.
SpinWaveState make_bloch_wavepacket(const ChainParams& params, const ControlField& field,
                                    Band band, double k_center, double width_sites,
                                    std::optional<int> center_site = std::nullopt);

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record, bool wide);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace atomchain
