#pragma once

#include <Eigen/Dense>
#include <memory>
#include <variant>
#include <vector>

#include "atomchain/chain.hpp"
#include "atomchain/couplings.hpp"

namespace atomchain {

using StateVector = Eigen::VectorXcd;

// --- theta(t) schedules ----------------------------------------------------

struct Hold {
  double theta = 0.0;
  double duration = 0.0;

  bool operator==(const Hold&) const = default;
};

/// theta(t) = from + (to - from) (1 - cos(pi u)) / 2, u in [0, 1].
struct CosineRamp {
  double from = 0.0;
  double to = 0.0;
  double duration = 0.0;

  bool operator==(const CosineRamp&) const = default;
};

/// theta(t) = center + amplitude sin(2 pi t / period) for whole cycles.
struct Oscillate {
  double center = 0.0;
  double amplitude = 0.0;
  double period = 1.0;
  int cycles = 0;

  bool operator==(const Oscillate&) const = default;
};

using Segment = std::variant<Hold, CosineRamp, Oscillate>;

double segment_duration(const Segment& s);
double segment_start_theta(const Segment& s);
double segment_end_theta(const Segment& s);

class ThetaSchedule {
 public:
  ThetaSchedule() = default;
  explicit ThetaSchedule(std::vector<Segment> segments);

  /// Throws Error(InvalidParams) when a duration is negative, theta leaves
  /// [0, pi], the total duration is not positive, or theta jumps between
  /// consecutive segments of positive duration.
  void validate() const;

  double duration() const noexcept;
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  /// Start time of each segment.
  std::vector<double> boundaries() const;

  /// Throws Error(OutOfRangeTime) outside [0, duration].
  double theta(double t) const;
  double theta_rate(double t) const;

  static ThetaSchedule constant(double theta, double duration);

  bool operator==(const ThetaSchedule&) const = default;

 private:
  std::vector<Segment> segments_;
};

inline double theta_schedule_eval(const ThetaSchedule& schedule, double t) {
  return schedule.theta(t);
}

// --- probe drive -------------------------------------------------------------

enum class Polarization { Linear, SigmaPlus, SigmaMinus };

// Where the probe detuning is measured from. BareTransition is the excited
// level omega0 + (Delta + delta)/2 before light shifts, which sits delta/4
// above omega_shift; ShiftFrame measures directly from omega_shift.
enum class DetuningReference { BareTransition, ShiftFrame };

struct ProbePulse {
  int site = 0;
  double amplitude = 0.1;  // Omega_p
  double center = 50.0;    // t_p
  double width = 25.0;     // Gaussian std of the temporal envelope
  double detuning = -3.5;  // Delta_p
  Polarization polarization = Polarization::Linear;
  DetuningReference reference = DetuningReference::BareTransition;

  void validate(const ChainParams& params) const;

  /// Carrier frequency in the omega_shift frame.
  double frame_frequency(const ControlField& field) const noexcept;

  bool operator==(const ProbePulse&) const = default;
};

/// (Omega_p/2) exp(-(t - t_p)^2 / (2 tau^2)) e^{-i w t} on the probe site,
/// split 1/sqrt(2) per polarization for linear light and carrying the
/// control-frame phases e^{-+ i k_c z_site}.
StateVector drive_vector(const ProbePulse& pulse, const ChainParams& params,
                         const ControlField& field, double t);

// --- Hamiltonian -------------------------------------------------------------

enum class Boundary { Open, Ring };

/// N x N dissipative block: -K(|z_n - z_m|) off the diagonal, -i Gamma0 / 2 on
/// it. Identical for both polarizations. Ring wraps separations to the
/// minimum image and is meant for symmetry tests only.
Eigen::MatrixXcd dissipative_block(const ChainParams& params, Boundary boundary = Boundary::Open);

/// Dense 2N x 2N assembly in the (n, +), (n, -) interleaved basis.
struct HamiltonianAssembly {
  Eigen::MatrixXcd matrix;
  double time = 0.0;
  double theta = 0.0;
};

HamiltonianAssembly build_hamiltonian(const ChainParams& params, const ControlField& field,
                                      double theta, double time = 0.0,
                                      Boundary boundary = Boundary::Open);

/// Matrix-free H(theta): the theta-independent dissipative block is shared,
/// the control terms are applied site by site.
class ChainOperator {
 public:
  ChainOperator(const ChainParams& params, const ControlField& field,
                Boundary boundary = Boundary::Open);
  ChainOperator(std::shared_ptr<const Eigen::MatrixXcd> block, const ChainParams& params,
                const ControlField& field);

  /// out = H(theta) in. Both vectors have length 2N; `out` must not alias `in`.
  void apply(double theta, const StateVector& in, StateVector& out) const;

  /// Upper bound on the induced 1-norm of H(theta) over all theta.
  double one_norm_bound() const;

  int sites() const noexcept { return params_.N; }
  const ChainParams& params() const noexcept { return params_; }
  const ControlField& field() const noexcept { return field_; }
  const std::shared_ptr<const Eigen::MatrixXcd>& block() const noexcept { return block_; }

 private:
  ChainParams params_;
  ControlField field_;
  std::shared_ptr<const Eigen::MatrixXcd> block_;
  Eigen::VectorXcd phase_;  // e^{-2 i k_c z_n}
};

struct DecayReport {
  Eigen::MatrixXd gamma;  // i (H - H^dagger), 2N x 2N
  double min_eigenvalue = 0.0;
  bool positive_semidefinite = false;
};

DecayReport decay_matrix(const ChainParams& params);

/// Helical translation: |n, s> -> e^{-i s k_c a} |n+1 mod N, s>. Commutes with
/// the ring Hamiltonian when 2 k_c N a is a multiple of 2 pi.
Eigen::MatrixXcd helical_operator(const ChainParams& params, const ControlField& field);

}  // namespace atomchain
