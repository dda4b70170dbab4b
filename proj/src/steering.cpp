// steering.cpp

#include "hsteer/steering.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hsteer {

namespace {

bool usable(const TrialRecord& r) {
  return r.herald && r.bob_outcome.has_value();
}

}  // namespace

SteeringEstimate steering_parameter(const std::vector<TrialRecord>& records, std::size_t n_settings,
                                    int sign) {
  if (n_settings == 0) throw std::invalid_argument("no settings");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  std::vector<double> sum(n_settings, 0.0);
  std::vector<std::size_t> count(n_settings, 0);
  for (const auto& r : records) {
    if (!usable(r) || !r.alice_declared || !r.alice_outcome) continue;
    if (r.setting >= n_settings) throw std::invalid_argument("record setting out of range");
    sum[r.setting] += static_cast<double>(*r.alice_outcome * *r.bob_outcome);
    ++count[r.setting];
  }

  SteeringEstimate out;
  double variance = 0.0;
  for (std::size_t k = 0; k < n_settings; ++k) {
    if (count[k] == 0) {
      throw std::invalid_argument("no declared heralded record for setting " + std::to_string(k));
    }
    const double e = sum[k] / static_cast<double>(count[k]);
    out.correlations.push_back(sign * e);
    out.counts.push_back(count[k]);
    out.value += sign * e;
    variance += (1.0 - e * e) / static_cast<double>(count[k]);
  }
  const double n = static_cast<double>(n_settings);
  out.value /= n;
  out.sigma = std::sqrt(variance) / n;
  return out;
}

EfficiencyEstimate empirical_efficiency(const std::vector<TrialRecord>& records) {
  EfficiencyEstimate out;
  for (const auto& r : records) {
    if (!usable(r)) continue;
    ++out.threefold;
    if (r.alice_declared) ++out.fourfold;
  }
  if (out.threefold == 0) throw std::domain_error("no heralded record with a Bob click");
  const double n = static_cast<double>(out.threefold);
  out.value = static_cast<double>(out.fourfold) / n;
  out.sigma = std::sqrt(out.value * (1.0 - out.value) / n);
  return out;
}

Significance violation_significance(double s, double sigma_s, double eps, double sigma_eps,
                                    const SteeringBoundCurve& curve) {
  if (!(sigma_s > 0.0)) throw std::invalid_argument("sigma_S must be positive");
  if (!(sigma_eps >= 0.0)) throw std::invalid_argument("sigma_eps must be non-negative");
  Significance out;
  out.bound = curve(eps);
  out.slope = curve.slope(eps, true);
  out.sds = (s - out.bound) / sigma_s;
  const double slope_term = out.slope * sigma_eps;
  out.conservative_sds = (s - out.bound) / std::sqrt(sigma_s * sigma_s + slope_term * slope_term);
  return out;
}

SteeringResult evaluate_steering(const std::vector<TrialRecord>& records,
                                 const SteeringBoundCurve& curve) {
  const auto s = steering_parameter(records, curve.n());
  const auto eps = empirical_efficiency(records);
  SteeringResult out;
  out.n = curve.n();
  out.s = s.value;
  out.sigma_s = s.sigma;
  out.epsilon = eps.value;
  out.sigma_epsilon = eps.sigma;
  out.heralded_fourfolds = eps.fourfold;
  out.heralded_threefolds = eps.threefold;
  // A noiseless sample has zero binomial spread; fall back to one count's worth.
  double sigma = out.sigma_s;
  if (!(sigma > 0.0)) sigma = 1.0 / static_cast<double>(eps.fourfold);
  out.significance = violation_significance(out.s, sigma, out.epsilon,
                                            out.sigma_epsilon, curve);
  return out;
}

}  // namespace hsteer
