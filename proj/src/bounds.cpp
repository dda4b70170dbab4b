// bounds.cpp

#include "hsteer/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hsteer {

namespace {

// Cross product sign of (b - a) x (c - a); >= 0 means b is on or below ac.
double turn(const EnvelopePoint& a, const EnvelopePoint& b, const EnvelopePoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

struct SearchState {
  const std::vector<BlochVector>* u;
  std::vector<double> best_sq;
};

void enumerate(SearchState& s, std::size_t k, const BlochVector& sum, std::size_t count,
               bool any_positive) {
  const auto& u = *s.u;
  if (k == u.size()) {
    const double v = sum.squaredNorm();
    if (v > s.best_sq[count]) s.best_sq[count] = v;
    return;
  }
  enumerate(s, k + 1, sum, count, any_positive);
  enumerate(s, k + 1, sum + u[k], count + 1, true);
  // A global sign flip leaves the score unchanged; fix the first nonzero sign.
  if (any_positive) enumerate(s, k + 1, sum - u[k], count + 1, true);
}

// Best j-subset value for a fixed Bob direction, improved by fixed-point ascent.
double ascend(const std::vector<BlochVector>& u, BlochVector w, std::size_t j,
              std::vector<std::pair<double, std::size_t>>& scratch) {
  double best = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    scratch.clear();
    for (std::size_t k = 0; k < u.size(); ++k) scratch.emplace_back(u[k].dot(w), k);
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(j),
                      scratch.end(), [](const auto& a, const auto& b) {
                        return std::abs(a.first) > std::abs(b.first) ||
                               (std::abs(a.first) == std::abs(b.first) && a.second < b.second);
                      });
    BlochVector v = BlochVector::Zero();
    for (std::size_t i = 0; i < j; ++i) {
      v += (scratch[i].first >= 0.0 ? 1.0 : -1.0) * u[scratch[i].second];
    }
    const double value = v.norm();
    if (value <= best * (1.0 + 1e-15)) break;
    best = value;
    w = v / value;
  }
  return best;
}

}  // namespace

std::string to_string(SubsetSearch method) {
  return method == SubsetSearch::kExhaustive ? "exhaustive" : "local-search";
}

std::vector<EnvelopePoint> upper_concave_envelope(std::vector<EnvelopePoint> points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.x < b.x || (a.x == b.x && a.y > b.y);
  });
  std::vector<EnvelopePoint> hull;
  for (const auto& p : points) {
    if (!hull.empty() && hull.back().x == p.x) continue;
    while (hull.size() >= 2 && turn(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return hull;
}

double evaluate_envelope(const std::vector<EnvelopePoint>& hull, double x) {
  if (hull.empty()) throw std::invalid_argument("empty envelope");
  if (x < hull.front().x || x > hull.back().x) {
    throw std::invalid_argument("envelope evaluated outside its support");
  }
  auto it = std::lower_bound(hull.begin(), hull.end(), x,
                             [](const EnvelopePoint& p, double v) { return p.x < v; });
  if (it->x == x) return it->y;
  const auto& right = *it;
  const auto& left = *(it - 1);
  return left.y + (right.y - left.y) * (x - left.x) / (right.x - left.x);
}

// ---------------------------------------------------------------------------

SteeringBoundCurve::SteeringBoundCurve(std::vector<double> subset_values, SubsetSearch method)
    : subset_values_(std::move(subset_values)), method_(method) {
  if (subset_values_.size() < 2) throw std::invalid_argument("need m(j) for j = 0..n, n >= 1");
  std::vector<EnvelopePoint> points;
  for (std::size_t j = 0; j < subset_values_.size(); ++j) {
    points.push_back({static_cast<double>(j), subset_values_[j]});
  }
  hull_ = upper_concave_envelope(std::move(points));
}

std::vector<std::pair<double, double>> SteeringBoundCurve::breakpoints() const {
  std::vector<std::pair<double, double>> out;
  const double n_d = static_cast<double>(n());
  for (const auto& p : hull_) {
    if (p.x >= 1.0) out.emplace_back(p.x / n_d, p.y / p.x);
  }
  return out;
}

double SteeringBoundCurve::operator()(double eps) const {
  if (!(eps > 0.0) || eps > 1.0 + 1e-12) {
    throw std::invalid_argument("heralding efficiency must lie in (0, 1]");
  }
  const double x = std::min(eps, 1.0) * static_cast<double>(n());
  return evaluate_envelope(hull_, x) / x;
}

double SteeringBoundCurve::slope(double eps, bool from_below) const {
  const double n_d = static_cast<double>(n());
  const double x = std::min(eps, 1.0) * n_d;
  const double y = evaluate_envelope(hull_, x);
  // Segment on the requested side of x.
  std::size_t seg = 0;
  for (std::size_t i = 0; i + 1 < hull_.size(); ++i) {
    const bool inside = from_below ? (hull_[i].x < x && x <= hull_[i + 1].x)
                                   : (hull_[i].x <= x && x < hull_[i + 1].x);
    if (inside) {
      seg = i;
      break;
    }
    seg = i;
  }
  const double env_slope =
      (hull_[seg + 1].y - hull_[seg].y) / (hull_[seg + 1].x - hull_[seg].x);
  return n_d * (env_slope * x - y) / (x * x);
}

// ---------------------------------------------------------------------------

double deterministic_bound(const MeasurementSet& settings) {
  const auto& u = settings.directions();
  const std::size_t n = u.size();
  if (n > 40) throw std::invalid_argument("sign enumeration limited to 40 settings");
  double best = 0.0;
  const std::uint64_t classes = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask < classes; ++mask) {
    BlochVector sum = u[0];
    for (std::size_t k = 1; k < n; ++k) {
      sum += ((mask >> (k - 1)) & 1u) ? -u[k] : u[k];
    }
    best = std::max(best, sum.squaredNorm());
  }
  return std::sqrt(best) / static_cast<double>(n);
}

std::vector<double> subset_values_exhaustive(const MeasurementSet& settings) {
  if (settings.size() > kExhaustiveSettingsLimit) {
    throw std::invalid_argument("exhaustive enumeration limited to 20 settings");
  }
  SearchState s{&settings.directions(), std::vector<double>(settings.size() + 1, 0.0)};
  enumerate(s, 0, BlochVector::Zero(), 0, false);
  std::vector<double> m(s.best_sq.size());
  std::transform(s.best_sq.begin(), s.best_sq.end(), m.begin(), [](double v) { return std::sqrt(v); });
  return m;
}

std::vector<double> subset_values_local_search(const MeasurementSet& settings, int spiral_starts) {
  const auto& u = settings.directions();
  const std::size_t n = u.size();
  std::vector<BlochVector> starts(u.begin(), u.end());
  if (spiral_starts > 0) {
    const auto extra = spiral_settings(spiral_starts);
    starts.insert(starts.end(), extra.directions().begin(), extra.directions().end());
  }

  // Seed each j with the best few starting directions, judged by prefix sums.
  constexpr std::size_t kKeep = 4;
  std::vector<std::vector<std::pair<double, BlochVector>>> seeds(n + 1);
  std::vector<std::pair<double, std::size_t>> order;
  for (const auto& w : starts) {
    order.clear();
    for (std::size_t k = 0; k < n; ++k) order.emplace_back(u[k].dot(w), k);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return std::abs(a.first) > std::abs(b.first) ||
             (std::abs(a.first) == std::abs(b.first) && a.second < b.second);
    });
    BlochVector prefix = BlochVector::Zero();
    for (std::size_t j = 1; j <= n; ++j) {
      const auto& [c, k] = order[j - 1];
      prefix += (c >= 0.0 ? 1.0 : -1.0) * u[k];
      const double value = prefix.norm();
      auto& bucket = seeds[j];
      if (bucket.size() < kKeep || value > bucket.back().first) {
        const BlochVector dir = value > 0.0 ? BlochVector(prefix / value) : w;
        bucket.emplace_back(value, dir);
        std::sort(bucket.begin(), bucket.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        if (bucket.size() > kKeep) bucket.pop_back();
      }
    }
  }

  std::vector<double> m(n + 1, 0.0);
  std::vector<std::pair<double, std::size_t>> scratch;
  for (std::size_t j = 1; j <= n; ++j) {
    for (const auto& [value, dir] : seeds[j]) {
      m[j] = std::max({m[j], value, ascend(u, dir, j, scratch)});
    }
  }
  return m;
}

SteeringBoundCurve loss_bound(const MeasurementSet& settings) {
  if (settings.size() <= kExhaustiveSettingsLimit) {
    return SteeringBoundCurve(subset_values_exhaustive(settings), SubsetSearch::kExhaustive);
  }
  return SteeringBoundCurve(subset_values_local_search(settings), SubsetSearch::kLocalSearch);
}

SteeringBoundCurve dense_settings_bound(int n_dense) {
  if (n_dense < 50) throw std::invalid_argument("dense settings approximation needs n_dense >= 50");
  return loss_bound(spiral_settings(n_dense));
}

InfiniteSettingsEstimate infinite_settings_bound_approx(double eps, int n_dense) {
  const SteeringBoundCurve curve = dense_settings_bound(n_dense);
  return {curve(eps), n_dense, curve.method()};
}

}  // namespace hsteer
