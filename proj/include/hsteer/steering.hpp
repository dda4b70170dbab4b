// steering.hpp
// Steering parameter and heralding efficiency estimated from trial records,
// and the significance of a violation of the loss-dependent bound.

#pragma once

#include <cstddef>
#include <vector>

#include "hsteer/bounds.hpp"
#include "hsteer/circuit.hpp"

namespace hsteer {

/// Singlet convention: each setting contributes -<A_k B_k>, so perfect
/// anticorrelation gives S_n = +1.
inline constexpr int kSingletSign = -1;

struct SteeringEstimate {
  double value = 0.0;
  double sigma = 0.0;
  std::vector<double> correlations;  // signed, per setting
  std::vector<std::size_t> counts;   // declared heralded records per setting
};

/// S_n over records with herald, a declared Alice outcome and a Bob outcome.
/// Per-setting binomial errors (1 - E_k^2)/N_k are combined in quadrature.
/// Throws std::invalid_argument when a setting has no usable record.
SteeringEstimate steering_parameter(const std::vector<TrialRecord>& records, std::size_t n_settings,
                                    int sign = kSingletSign);

struct EfficiencyEstimate {
  double value = 0.0;
  double sigma = 0.0;
  std::size_t threefold = 0;
  std::size_t fourfold = 0;
};

/// Fraction of (herald and Bob clicked) records in which Alice declared.
/// Throws std::domain_error when no such record exists.
EfficiencyEstimate empirical_efficiency(const std::vector<TrialRecord>& records);

struct Significance {
  double bound = 0.0;             // C_n(eps)
  double slope = 0.0;             // dC/deps from below
  double sds = 0.0;               // (S - C) / sigma_S
  double conservative_sds = 0.0;  // (S - C) / sqrt(sigma_S^2 + (C' sigma_eps)^2)
};

/// Requires sigma_s > 0 and sigma_eps >= 0.
Significance violation_significance(double s, double sigma_s, double eps, double sigma_eps,
                                    const SteeringBoundCurve& curve);

struct SteeringResult {
  std::size_t n = 0;
  double s = 0.0;
  double sigma_s = 0.0;
  double epsilon = 0.0;
  double sigma_epsilon = 0.0;
  std::size_t heralded_fourfolds = 0;
  std::size_t heralded_threefolds = 0;
  Significance significance;
  /// S exceeds C_n(eps).
  [[nodiscard]] bool violation() const { return s > significance.bound; }
};

SteeringResult evaluate_steering(const std::vector<TrialRecord>& records,
                                 const SteeringBoundCurve& curve);

}  // namespace hsteer
