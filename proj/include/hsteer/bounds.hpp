// bounds.hpp
// Local-hidden-state bounds on the steering parameter: the deterministic
// bound C_n and its heralding-efficiency dependent form C_n(eps).
//
// A deterministic cheating strategy assigns each setting k an announcement
// a_k in {-1, 0, +1} (0 = no result declared). With Bob's state chosen
// optimally it scores |sum_k a_k u_k|. For j declared settings the best score
// is m(j); mixing strategies realizes the upper concave envelope of the points
// (j, m(j)), and C_n(eps) = env(n eps) / (n eps).

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hsteer/settings.hpp"

namespace hsteer {

/// Largest subset above which exhaustive enumeration is replaced by search.
inline constexpr std::size_t kExhaustiveSettingsLimit = 20;

enum class SubsetSearch { kExhaustive, kLocalSearch };

struct EnvelopePoint {
  double x;
  double y;
};

/// Upper concave envelope (hull vertices, increasing x) of the points.
std::vector<EnvelopePoint> upper_concave_envelope(std::vector<EnvelopePoint> points);

/// Piecewise-linear interpolation through envelope vertices; x must lie
/// inside the hull's x range.
double evaluate_envelope(const std::vector<EnvelopePoint>& hull, double x);

class SteeringBoundCurve {
 public:
  SteeringBoundCurve(std::vector<double> subset_values, SubsetSearch method);

  [[nodiscard]] std::size_t n() const { return subset_values_.size() - 1; }
  /// m(j), j = 0..n.
  [[nodiscard]] const std::vector<double>& subset_values() const { return subset_values_; }
  [[nodiscard]] SubsetSearch method() const { return method_; }
  /// Hull vertices of (j, m(j)).
  [[nodiscard]] const std::vector<EnvelopePoint>& envelope() const { return hull_; }
  /// (eps, C) at each hull vertex with j >= 1. C is not linear in eps between
  /// vertices; use operator() for exact values.
  [[nodiscard]] std::vector<std::pair<double, double>> breakpoints() const;

  /// C_n(eps) for eps in (0, 1]; throws std::invalid_argument otherwise.
  [[nodiscard]] double operator()(double eps) const;
  /// One-sided derivative dC/deps. `from_below` takes the left derivative.
  [[nodiscard]] double slope(double eps, bool from_below) const;

 private:
  std::vector<double> subset_values_;
  SubsetSearch method_;
  std::vector<EnvelopePoint> hull_;
};

/// C_n = max over sign vectors of |sum_k A_k u_k| / n, enumerating the
/// 2^(n-1) sign classes.
double deterministic_bound(const MeasurementSet& settings);

/// m(j) for j = 0..n by enumerating all 3^n announcement vectors. Requires
/// n <= kExhaustiveSettingsLimit.
std::vector<double> subset_values_exhaustive(const MeasurementSet& settings);

/// m(j) lower estimates by ascent from many starting directions: for a fixed
/// Bob direction w, the best j-subset takes the j largest |u_k . w|; w is then
/// replaced by the normalized signed subset sum until the subset is stable.
std::vector<double> subset_values_local_search(const MeasurementSet& settings,
                                               int spiral_starts = 2000);

/// Exhaustive for n <= kExhaustiveSettingsLimit, local search above.
SteeringBoundCurve loss_bound(const MeasurementSet& settings);

struct InfiniteSettingsEstimate {
  double value;
  int n_dense;
  SubsetSearch method;
};

/// C_n(eps) on a dense spiral set of n_dense >= 50 axes, approximating the
/// infinite-setting bound.
InfiniteSettingsEstimate infinite_settings_bound_approx(double eps, int n_dense);
/// Same curve, built once for repeated evaluation.
SteeringBoundCurve dense_settings_bound(int n_dense);

std::string to_string(SubsetSearch method);

}  // namespace hsteer
