#include <random>

#include "doctest.h"
#include "hsteer/steering.hpp"

using namespace hsteer;

namespace {

TrialRecord record(std::size_t setting, std::optional<int> a, int b) {
  TrialRecord r;
  r.herald = true;
  r.setting = setting;
  r.alice_declared = a.has_value();
  r.alice_outcome = a;
  r.bob_outcome = b;
  return r;
}

ExperimentConfig conventional(double xi, PairState state) {
  ExperimentConfig c;
  c.swap_enabled = false;
  c.source2.squeezing = xi;
  c.source2.pair_state = state;
  return c;
}

}  // namespace

TEST_SUITE("steering") {

TEST_CASE("perfect anticorrelation gives S = 1") {
  std::vector<TrialRecord> rs;
  for (std::size_t k = 0; k < 6; ++k)
    for (int i = 0; i < 10; ++i) rs.push_back(record(k, i % 2 ? 1 : -1, i % 2 ? -1 : 1));
  const auto est = steering_parameter(rs, 6);
  CHECK(est.value == doctest::Approx(1.0));
  CHECK(est.sigma == doctest::Approx(0.0));
  for (std::size_t c : est.counts) CHECK(c == 10);
  CHECK(steering_parameter(rs, 6, +1).value == doctest::Approx(-1.0));
}

TEST_CASE("random outcomes give S = 0 within three sigma") {
  std::mt19937_64 rng(17);
  std::vector<TrialRecord> rs;
  for (int i = 0; i < 60000; ++i) {
    rs.push_back(record(i % 6, (rng() & 1) ? 1 : -1, (rng() & 1) ? 1 : -1));
  }
  const auto est = steering_parameter(rs, 6);
  CHECK(std::abs(est.value) < 3 * est.sigma);
  CHECK(est.sigma == doctest::Approx(std::sqrt(6.0 / 10000) / 6).epsilon(0.01));
}

TEST_CASE("hand-computed estimator") {
  // Setting 0: E = -1/2 from (+,-), (+,-), (+,-), (+,+); setting 1: E = -1.
  std::vector<TrialRecord> rs{record(0, 1, -1), record(0, 1, -1), record(0, 1, -1), record(0, 1, 1),
                              record(1, -1, 1), record(1, 1, -1), record(1, std::nullopt, 1)};
  TrialRecord unheralded = record(1, 1, 1);
  unheralded.herald = false;
  rs.push_back(unheralded);
  const auto est = steering_parameter(rs, 2);
  CHECK(est.value == doctest::Approx(0.75));
  CHECK(est.counts[1] == 2);
  CHECK(est.sigma == doctest::Approx(std::sqrt(0.75 / 4) / 2));

  const auto eff = empirical_efficiency(rs);
  CHECK(eff.threefold == 7);
  CHECK(eff.fourfold == 6);
  CHECK(eff.value == doctest::Approx(6.0 / 7));
}

TEST_CASE("estimator errors") {
  std::vector<TrialRecord> rs{record(0, 1, -1)};
  CHECK_THROWS_AS(steering_parameter(rs, 2), std::invalid_argument);
  CHECK_THROWS_AS(steering_parameter({}, 0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_efficiency({}), std::domain_error);
}

TEST_CASE("significance") {
  const auto curve = loss_bound(platonic_settings(6));
  SUBCASE("S at the bound is zero SDs") {
    const double c = curve(0.5);
    CHECK(violation_significance(c, 0.01, 0.5, 0.01, curve).sds == doctest::Approx(0.0));
  }
  SUBCASE("no-loss point") {
    const auto sig = violation_significance(0.960, 0.008, 0.4395, 0.0003, curve);
    CHECK(sig.sds == doctest::Approx(18.0).epsilon(2.0 / 18.0));
    CHECK(sig.conservative_sds == doctest::Approx(18.0).epsilon(2.0 / 18.0));
    CHECK(sig.conservative_sds <= sig.sds);
  }
  SUBCASE("14.8 dB point") {
    const auto sig = violation_significance(0.866, 0.024, 0.43, 0.02, curve);
    CHECK(sig.sds >= 2.2);
    CHECK(sig.slope < 0.0);
    CHECK(sig.conservative_sds < sig.sds);
  }
  CHECK_THROWS_AS(violation_significance(0.9, 0.0, 0.5, 0.0, curve), std::invalid_argument);
  CHECK_THROWS_AS(violation_significance(0.9, 0.01, 0.5, -1.0, curve), std::invalid_argument);
}

TEST_CASE("product states never beat the deterministic bound") {
  for (PairState ps : {PairState::kProductZ, PairState::kProductX}) {
    for (int n : {2, 3, 6}) {
      const auto set = platonic_settings(n);
      const auto s = analyze(Experiment(conventional(1e-3, ps)), set);
      CHECK(s.steering <= deterministic_bound(set) + 1e-6);
      CHECK(s.epsilon == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("singlet reaches S = 1 for every platonic set") {
  for (int n : {2, 3, 4, 6, 10, 16}) {
    const auto set = platonic_settings(n);
    const auto s = analyze(Experiment(conventional(1e-5, PairState::kSinglet)), set);
    CHECK(s.steering == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.steering > deterministic_bound(set));
  }
}

TEST_CASE("evaluate steering end to end") {
  ExperimentConfig c = conventional(1e-3, PairState::kSinglet);
  c.source2.singlet_fidelity = 0.95;
  c.detectors.alice_plus = c.detectors.alice_minus = {0.6, 0.0};
  const auto set = platonic_settings(6);
  const auto records = sample_trials(c, set, 20000, 2, SamplingMode::kThreefold);
  const auto result = evaluate_steering(records, loss_bound(set));
  CHECK(result.n == 6);
  CHECK(result.heralded_threefolds == records.size());
  CHECK(result.epsilon == doctest::Approx(0.6).epsilon(0.05));
  CHECK(result.s == doctest::Approx((4 * 0.95 - 1) / 3).epsilon(0.03));
  CHECK(result.violation());
  CHECK(result.significance.sds > 10);
}

}
