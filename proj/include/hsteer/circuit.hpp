// circuit.hpp
// The two-source entanglement-swapping experiment: sources, lossy channel,
// Bell-state measurement and the two polarization analyzers, evaluated
// exactly in truncated Fock space.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsteer/fock.hpp"
#include "hsteer/settings.hpp"
#include "hsteer/sources.hpp"

namespace hsteer {

// Arm names fixed by the apparatus.
inline constexpr std::string_view kAliceArm = "alice";      // PS1 photon to A-PA
inline constexpr std::string_view kRelayArm = "relay";      // PS1 photon to the BSM
inline constexpr std::string_view kChannelArm = "channel";  // PS2 photon through the lossy channel
inline constexpr std::string_view kBobArm = "bob";          // PS2 photon to B-PA

/// Detector order used for click-pattern bit positions.
enum class Detector : unsigned { kBsmPlus = 0, kBsmMinus, kAlicePlus, kAliceMinus, kBobPlus, kBobMinus };
inline constexpr std::size_t kDetectorCount = 6;
inline constexpr std::size_t kPatternCount = std::size_t{1} << kDetectorCount;

struct DetectorSet {
  ThresholdDetector bsm_plus;
  ThresholdDetector bsm_minus;
  ThresholdDetector alice_plus;
  ThresholdDetector alice_minus;
  ThresholdDetector bob_plus;
  ThresholdDetector bob_minus;
};

struct ExperimentConfig {
  SourceConfig source1;  // PS1, only used when swap_enabled
  SourceConfig source2;  // PS2
  double channel_loss_db = 0.0;
  double bp_filter_loss_db = 0.0;
  double bsm_loss_db = 0.0;
  DetectorSet detectors;
  double bsm_transmissivity_h = 0.5;
  double bsm_transmissivity_v = 0.5;
  bool swap_enabled = true;
  std::uint64_t rng_seed = 1;
  int settings_n = 6;
  int max_photons = 6;
  double tail_tolerance = 1e-4;

  void validate() const;
  /// Linear transmission of the photon travelling to the BSM (heralded mode)
  /// or straight to A-PA (conventional mode, channel loss only).
  [[nodiscard]] double channel_transmission() const;
};

/// Exact click-pattern probabilities for one pair of analyzer settings.
/// Index bit d is set when detector d fired.
struct OutcomeTable {
  std::array<double, kPatternCount> probability{};
  bool swap_enabled = true;
  double tail_weight = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] static bool fired(std::size_t pattern, Detector d) {
    return (pattern >> static_cast<unsigned>(d)) & 1u;
  }
  [[nodiscard]] bool herald(std::size_t pattern) const;
  [[nodiscard]] static bool alice_clicked(std::size_t pattern);
  [[nodiscard]] static bool bob_clicked(std::size_t pattern);

  [[nodiscard]] double p_herald() const;
  /// P(herald and B clicked): the three-fold event in heralded mode.
  [[nodiscard]] double p_herald_bob() const;
  /// P(herald and A clicked and B clicked).
  [[nodiscard]] double p_fourfold() const;
  /// E[a b | fourfold] with double clicks resolved by a fair coin.
  [[nodiscard]] double correlation() const;
};

struct TrialRecord {
  bool herald = false;
  bool alice_declared = false;
  std::optional<int> alice_outcome;
  std::optional<int> bob_outcome;
  std::size_t setting = 0;
};

enum class SamplingMode {
  kRaw,       // every trial window, mostly empty
  kHeralded,  // draws conditioned on the herald event
  kThreefold, // draws conditioned on the herald and a Bob click
};

/// Analytic (non-sampled) figures of merit over a measurement set.
struct AnalyticSummary {
  double epsilon = 0.0;
  double steering = 0.0;      // S_n with the singlet sign convention
  double herald_rate = 0.0;   // mean P(herald)
  double threefold_rate = 0.0;
  double fourfold_rate = 0.0;
  std::vector<double> correlations;  // per setting, E[a b | fourfold]
  double tail_weight = 0.0;
};

/// Built apparatus: the prepared state is computed once and reused for every
/// analyzer setting.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  [[nodiscard]] const ExperimentConfig& config() const { return config_; }
  [[nodiscard]] const StateEnsemble& state() const { return state_; }
  [[nodiscard]] double tail_weight() const { return state_.tail_weight(); }
  [[nodiscard]] bool tail_within_tolerance() const {
    return tail_weight() <= config_.tail_tolerance;
  }
  [[nodiscard]] std::string_view alice_arm() const {
    return config_.swap_enabled ? kAliceArm : kChannelArm;
  }

  [[nodiscard]] OutcomeTable outcome_distribution(const BlochVector& alice,
                                                  const BlochVector& bob) const;

  /// Two-qubit polarization state of the A-PA and B-PA photons, conditioned
  /// on the herald POVM (heralded mode) and on exactly one photon reaching
  /// each analyzer. Basis order HH, HV, VH, VV with Alice first.
  [[nodiscard]] Eigen::Matrix4cd heralded_pair_state() const;

  /// P(herald and A port a fires and B port b fires) for the 36 Pauli
  /// eigenstate projector pairs, in tomography projector order.
  [[nodiscard]] std::array<double, 36> tomography_probabilities() const;

 private:
  ExperimentConfig config_;
  StateEnsemble state_;
};

/// Full prepared state of the apparatus before the analyzers.
StateEnsemble build_state(const ExperimentConfig& config);

/// Unitary taking the +1 eigenstate of sigma . u to |H> and the -1 eigenstate to |V>.
ModeMatrix analyzer_unitary(const BlochVector& direction);

OutcomeTable outcome_distribution(const ExperimentConfig& config, const BlochVector& alice,
                                  const BlochVector& bob);

/// Fourfold / threefold ratio averaged uniformly over the settings.
/// Throws std::domain_error when the conditioning event has zero probability.
double heralding_efficiency(const Experiment& experiment, const MeasurementSet& settings);
double heralding_efficiency(const ExperimentConfig& config);

AnalyticSummary analyze(const Experiment& experiment, const MeasurementSet& settings);

/// Deterministic given the seed; each trial draws its setting uniformly.
/// Conditioned modes sample the exact conditional distribution, so rare events
/// at high loss cost nothing extra.
std::vector<TrialRecord> sample_trials(const Experiment& experiment,
                                       const MeasurementSet& settings, std::size_t n_trials,
                                       std::uint64_t seed,
                                       SamplingMode mode = SamplingMode::kHeralded);
std::vector<TrialRecord> sample_trials(const ExperimentConfig& config,
                                       const MeasurementSet& settings, std::size_t n_trials,
                                       std::uint64_t seed,
                                       SamplingMode mode = SamplingMode::kHeralded);

}  // namespace hsteer
