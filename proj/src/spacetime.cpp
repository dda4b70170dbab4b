// spacetime.cpp

#include "hsteer/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsteer {

namespace {

double distance(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

void check_event(const SpacetimeEvent& e) {
  if (!std::isfinite(e.x_m) || !std::isfinite(e.y_m) || !std::isfinite(e.t_ns)) {
    throw std::invalid_argument("non-finite coordinate in event '" + e.label + "'");
  }
}

}  // namespace

void SpacetimeGeometry::validate() const {
  if (pair_generation.empty()) throw std::invalid_argument("at least one pair generation event");
  for (const auto& e : pair_generation) check_event(e);
  for (const auto* e : {&rng, &bsm, &bob_detection, &alice_report}) check_event(*e);
  if (!(signal_speed_fraction > 0.0 && signal_speed_fraction <= 1.0)) {
    throw std::invalid_argument("signal speed fraction must lie in (0, 1]");
  }
}

bool TimingReport::all_pass() const {
  return std::all_of(constraints.begin(), constraints.end(),
                     [](const ConstraintCheck& c) { return c.pass(); });
}

double spacelike_margin_ns(const SpacetimeEvent& a, const SpacetimeEvent& b, double speed_m_per_ns) {
  return distance(a, b) / speed_m_per_ns - std::abs(a.t_ns - b.t_ns);
}

TimingReport check_spacetime_ordering(const SpacetimeGeometry& g) {
  g.validate();
  const double v = g.signal_speed_fraction * kSpeedOfLightMPerNs;

  // Earliest moment Alice's station can hold Bob's setting.
  SpacetimeEvent known = g.alice_report;
  known.label = "setting_known_at_alice";
  known.t_ns = g.rng.t_ns + distance(g.rng, g.alice_report) / v;

  TimingReport report;
  double freedom = std::numeric_limits<double>::infinity();
  for (const auto& e : g.pair_generation) freedom = std::min(freedom, spacelike_margin_ns(g.rng, e, v));
  report.constraints.push_back(
      {"freedom_of_choice", "setting choice space-like separated from pair generation", freedom});

  report.constraints.push_back({"herald_before_setting",
                                "herald produced before the setting can reach the BSM via Alice",
                                known.t_ns + distance(known, g.bsm) / v - g.bsm.t_ns});
  report.constraints.push_back({"setting_independence",
                                "Bob's detection space-like separated from Alice learning the setting",
                                spacelike_margin_ns(g.bob_detection, known, v)});
  report.constraints.push_back({"outcome_independence",
                                "Alice's report space-like separated from Bob's detection",
                                spacelike_margin_ns(g.alice_report, g.bob_detection, v)});
  return report;
}

}  // namespace hsteer
