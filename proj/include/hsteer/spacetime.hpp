// spacetime.hpp
// Causal-ordering checks for the event-ready steering geometry. Positions in
// metres on a plane, times in nanoseconds, signals at a fraction of c.

#pragma once

#include <string>
#include <vector>

namespace hsteer {

inline constexpr double kSpeedOfLightMPerNs = 0.299792458;

struct SpacetimeEvent {
  std::string label;
  double x_m = 0.0;
  double y_m = 0.0;
  double t_ns = 0.0;
};

struct SpacetimeGeometry {
  std::vector<SpacetimeEvent> pair_generation;  // one per source
  SpacetimeEvent rng;                           // Bob's setting choice
  SpacetimeEvent bsm;                           // herald produced
  SpacetimeEvent bob_detection;
  SpacetimeEvent alice_report;                  // also fixes Alice's station
  double signal_speed_fraction = 2.0 / 3.0;

  /// Throws std::invalid_argument on non-finite coordinates, a missing pair
  /// generation event or a speed outside (0, 1].
  void validate() const;
};

struct ConstraintCheck {
  std::string name;
  std::string description;
  double margin_ns = 0.0;  // pass iff strictly positive
  [[nodiscard]] bool pass() const { return margin_ns > 0.0; }
};

struct TimingReport {
  std::vector<ConstraintCheck> constraints;
  [[nodiscard]] bool all_pass() const;
};

/// Space-like margin |dr|/v - |dt| between two events.
double spacelike_margin_ns(const SpacetimeEvent& a, const SpacetimeEvent& b, double speed_m_per_ns);

/// Four constraints, in order:
///   freedom_of_choice     RNG space-like from every pair generation
///   herald_before_setting BSM outside the future of the earliest moment the
///                         setting can be known at Alice's station
///   setting_independence  Bob's detection space-like from that moment
///   outcome_independence  Alice's report space-like from Bob's detection
TimingReport check_spacetime_ordering(const SpacetimeGeometry& geometry);

}  // namespace hsteer
