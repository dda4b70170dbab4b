// circuit.cpp

#include "hsteer/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hsteer/rng.hpp"
#include "hsteer/tomography.hpp"

namespace hsteer {

namespace {

constexpr std::size_t bit(Detector d) { return std::size_t{1} << static_cast<unsigned>(d); }

void check_transmissivity(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void check_loss(double db, const char* what) {
  if (!(db >= 0.0) || !std::isfinite(db)) {
    throw std::invalid_argument(std::string(what) + " must be finite and non-negative");
  }
}

SourceConfig with_arms(SourceConfig source, std::string_view arm_1, std::string_view arm_2) {
  source.arm_1 = std::string(arm_1);
  source.arm_2 = std::string(arm_2);
  return source;
}

BlochVector unit_direction(const BlochVector& d, std::vector<std::string>& warnings) {
  const double n = d.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("analyzer direction is degenerate");
  if (std::abs(n - 1.0) > 1e-6) {
    warnings.push_back("analyzer direction normalized from length " + std::to_string(n));
  }
  return d / n;
}

// Threshold-detector groups for the analyzers: + port = H modes, - port = V modes.
std::array<DetectorGroup, 2> analyzer_groups(const ModeLayout& layout, std::string_view arm,
                                             const ThresholdDetector& plus,
                                             const ThresholdDetector& minus) {
  const auto m = layout.arm_modes(arm);
  return {DetectorGroup{{m[0], m[1]}, plus}, DetectorGroup{{m[2], m[3]}, minus}};
}

int outcome_of(bool plus, bool minus) {
  if (plus && !minus) return 1;
  if (minus && !plus) return -1;
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  with_arms(source2, kChannelArm, kBobArm).validate();
  if (swap_enabled) with_arms(source1, kAliceArm, kRelayArm).validate();
  check_loss(channel_loss_db, "channel loss");
  check_loss(bp_filter_loss_db, "band-pass filter loss");
  check_loss(bsm_loss_db, "BSM optics loss");
  check_transmissivity(bsm_transmissivity_h, "BSM H transmissivity");
  check_transmissivity(bsm_transmissivity_v, "BSM V transmissivity");
  for (const auto* d : {&detectors.bsm_plus, &detectors.bsm_minus, &detectors.alice_plus,
                        &detectors.alice_minus, &detectors.bob_plus, &detectors.bob_minus}) {
    d->validate();
  }
  if (settings_n < 1) throw std::invalid_argument("settings_n must be positive");
  if (max_photons < 2) throw std::invalid_argument("truncation must allow at least one pair");
  if (!(tail_tolerance >= 0.0)) throw std::invalid_argument("tail tolerance must be non-negative");
}

double ExperimentConfig::channel_transmission() const {
  double t = db_to_transmission(channel_loss_db);
  if (swap_enabled) t *= db_to_transmission(bp_filter_loss_db) * db_to_transmission(bsm_loss_db);
  return t;
}

// ---------------------------------------------------------------------------
// OutcomeTable

bool OutcomeTable::herald(std::size_t pattern) const {
  if (swap_enabled) return fired(pattern, Detector::kBsmPlus) && fired(pattern, Detector::kBsmMinus);
  return bob_clicked(pattern);
}

bool OutcomeTable::alice_clicked(std::size_t pattern) {
  return fired(pattern, Detector::kAlicePlus) || fired(pattern, Detector::kAliceMinus);
}

bool OutcomeTable::bob_clicked(std::size_t pattern) {
  return fired(pattern, Detector::kBobPlus) || fired(pattern, Detector::kBobMinus);
}

double OutcomeTable::p_herald() const {
  double p = 0.0;
  for (std::size_t s = 0; s < kPatternCount; ++s)
    if (herald(s)) p += probability[s];
  return p;
}

double OutcomeTable::p_herald_bob() const {
  double p = 0.0;
  for (std::size_t s = 0; s < kPatternCount; ++s)
    if (herald(s) && bob_clicked(s)) p += probability[s];
  return p;
}

double OutcomeTable::p_fourfold() const {
  double p = 0.0;
  for (std::size_t s = 0; s < kPatternCount; ++s)
    if (herald(s) && bob_clicked(s) && alice_clicked(s)) p += probability[s];
  return p;
}

double OutcomeTable::correlation() const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < kPatternCount; ++s) {
    if (!(herald(s) && bob_clicked(s) && alice_clicked(s))) continue;
    const int a = outcome_of(fired(s, Detector::kAlicePlus), fired(s, Detector::kAliceMinus));
    const int b = outcome_of(fired(s, Detector::kBobPlus), fired(s, Detector::kBobMinus));
    num += probability[s] * a * b;
    den += probability[s];
  }
  if (den <= 0.0) throw std::domain_error("fourfold event has zero probability");
  return num / den;
}

// ---------------------------------------------------------------------------
// State preparation

StateEnsemble build_state(const ExperimentConfig& config) {
  config.validate();
  const int n_max = config.max_photons;
  const double t_channel = config.channel_transmission();

  if (!config.swap_enabled) {
    StateEnsemble ps2 = source_ensemble(with_arms(config.source2, kChannelArm, kBobArm), n_max);
    for (auto& m : ps2.members) m.state = apply_loss(m.state, kChannelArm, t_channel);
    return ps2;
  }

  StateEnsemble ps1 =
      source_ensemble(with_arms(config.source1, kAliceArm, kRelayArm), n_max, kRelayArm);
  StateEnsemble ps2 =
      source_ensemble(with_arms(config.source2, kChannelArm, kBobArm), n_max, kChannelArm);
  StateEnsemble joint = tensor(ps1, ps2, n_max);
  for (auto& m : joint.members) {
    m.state = apply_loss(m.state, kChannelArm, t_channel);
    m.state = apply_beamsplitter(m.state, kRelayArm, kChannelArm, config.bsm_transmissivity_h,
                                 config.bsm_transmissivity_v);
  }
  return joint;
}

ModeMatrix analyzer_unitary(const BlochVector& direction) {
  const BlochVector u = direction.normalized();
  const double theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
  const double phi = std::atan2(u.y(), u.x());
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const Amplitude e = std::polar(1.0, -phi);
  return ModeMatrix{{{c, e * s}, {s, -e * c}}};
}

Experiment::Experiment(ExperimentConfig config)
    : config_(std::move(config)), state_(build_state(config_)) {}

OutcomeTable Experiment::outcome_distribution(const BlochVector& alice,
                                              const BlochVector& bob) const {
  OutcomeTable table;
  table.swap_enabled = config_.swap_enabled;
  const BlochVector ua = unit_direction(alice, table.warnings);
  const BlochVector ub = unit_direction(bob, table.warnings);
  const ModeMatrix rot_a = analyzer_unitary(ua);
  const ModeMatrix rot_b = analyzer_unitary(ub);
  const auto& d = config_.detectors;

  std::vector<DetectorGroup> groups;
  std::vector<Detector> order;
  const ModeLayout& layout = state_.members.front().state.layout();
  if (config_.swap_enabled) {
    const auto r = layout.arm_modes(kRelayArm);
    const auto c = layout.arm_modes(kChannelArm);
    groups.push_back({{r.begin(), r.end()}, d.bsm_plus});
    groups.push_back({{c.begin(), c.end()}, d.bsm_minus});
    order = {Detector::kBsmPlus, Detector::kBsmMinus};
  }
  for (auto& g : analyzer_groups(layout, alice_arm(), d.alice_plus, d.alice_minus)) groups.push_back(g);
  for (auto& g : analyzer_groups(layout, kBobArm, d.bob_plus, d.bob_minus)) groups.push_back(g);
  order.insert(order.end(), {Detector::kAlicePlus, Detector::kAliceMinus, Detector::kBobPlus,
                             Detector::kBobMinus});

  StateEnsemble rotated;
  for (const auto& m : state_.members) {
    PhotonicState s = apply_polarization_unitary(m.state, alice_arm(), rot_a);
    s = apply_polarization_unitary(s, kBobArm, rot_b);
    rotated.members.push_back({m.weight, std::move(s)});
  }
  const ClickDistribution clicks = click_distribution(rotated, groups);
  for (std::size_t local = 0; local < clicks.probability.size(); ++local) {
    std::size_t pattern = 0;
    for (std::size_t g = 0; g < order.size(); ++g) {
      if (local & (std::size_t{1} << g)) pattern |= bit(order[g]);
    }
    table.probability[pattern] += clicks.probability[local];
  }
  table.tail_weight = clicks.tail_weight;
  if (table.tail_weight > config_.tail_tolerance) {
    table.warnings.push_back("truncation tail " + std::to_string(table.tail_weight) +
                             " exceeds tolerance");
  }
  return table;
}

Eigen::Matrix4cd Experiment::heralded_pair_state() const {
  const std::string_view a_arm = alice_arm();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  const auto& d = config_.detectors;

  for (const auto& member : state_.members) {
    const ModeLayout& layout = member.state.layout();
    const auto a_modes = layout.arm_modes(a_arm);
    const auto b_modes = layout.arm_modes(kBobArm);
    // Rest-of-system key -> amplitudes over (pol_a, pol_b).
    std::map<std::vector<std::uint8_t>, std::array<Amplitude, 4>> blocks;
    for (const auto& [occ, amp] : member.state.amplitudes()) {
      if (arm_photons(occ, layout, a_arm) != 1 || arm_photons(occ, layout, kBobArm) != 1) continue;
      std::size_t pa = 0, pb = 0;
      std::vector<std::uint8_t> key = occ.counts;
      for (std::size_t local = 0; local < 4; ++local) {
        if (occ.counts[a_modes[local]]) {
          pa = local / 2;
          key.push_back(static_cast<std::uint8_t>(local % 2));
        }
        key[a_modes[local]] = 0;
      }
      for (std::size_t local = 0; local < 4; ++local) {
        if (occ.counts[b_modes[local]]) {
          pb = local / 2;
          key.push_back(static_cast<std::uint8_t>(local % 2));
        }
        key[b_modes[local]] = 0;
      }
      blocks[key][2 * pa + pb] += amp;
    }
    for (const auto& [key, v] : blocks) {
      double herald = 1.0;
      if (config_.swap_enabled) {
        int n_plus = 0, n_minus = 0;
        for (std::size_t m : layout.arm_modes(kRelayArm)) n_plus += key[m];
        for (std::size_t m : layout.arm_modes(kChannelArm)) n_minus += key[m];
        herald = d.bsm_plus.click_probability(n_plus) * d.bsm_minus.click_probability(n_minus);
      }
      const double w = member.weight * herald;
      if (w == 0.0) continue;
      Eigen::Vector4cd vec;
      for (int i = 0; i < 4; ++i) vec[i] = v[static_cast<std::size_t>(i)];
      rho += w * vec * vec.adjoint();
    }
  }
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::domain_error("heralded single-pair event has zero probability");
  return rho / tr;
}

std::array<double, 36> Experiment::tomography_probabilities() const {
  std::array<double, 36> p{};
  // Eigenstates 2k, 2k+1 are the +/- eigenstates of axis k.
  for (std::size_t axis_a = 0; axis_a < 3; ++axis_a) {
    for (std::size_t axis_b = 0; axis_b < 3; ++axis_b) {
      const auto table = outcome_distribution(pauli_eigenstate_direction(2 * axis_a),
                                              pauli_eigenstate_direction(2 * axis_b));
      for (std::size_t sa = 0; sa < 2; ++sa) {
        for (std::size_t sb = 0; sb < 2; ++sb) {
          const Detector da = sa == 0 ? Detector::kAlicePlus : Detector::kAliceMinus;
          const Detector db = sb == 0 ? Detector::kBobPlus : Detector::kBobMinus;
          double sum = 0.0;
          for (std::size_t s = 0; s < kPatternCount; ++s) {
            if (table.herald(s) && OutcomeTable::fired(s, da) && OutcomeTable::fired(s, db)) {
              sum += table.probability[s];
            }
          }
          p[6 * (2 * axis_a + sa) + (2 * axis_b + sb)] = sum;
        }
      }
    }
  }
  return p;
}

OutcomeTable outcome_distribution(const ExperimentConfig& config, const BlochVector& alice,
                                  const BlochVector& bob) {
  return Experiment(config).outcome_distribution(alice, bob);
}

// ---------------------------------------------------------------------------
// Figures of merit

AnalyticSummary analyze(const Experiment& experiment, const MeasurementSet& settings) {
  AnalyticSummary out;
  const double n = static_cast<double>(settings.size());
  for (const auto& u : settings.directions()) {
    const OutcomeTable t = experiment.outcome_distribution(u, u);
    const double three = t.p_herald_bob();
    const double four = t.p_fourfold();
    if (three <= 0.0) throw std::domain_error("three-fold conditioning event has zero probability");
    out.epsilon += four / three / n;
    out.herald_rate += t.p_herald() / n;
    out.threefold_rate += three / n;
    out.fourfold_rate += four / n;
    const double e = t.correlation();
    out.correlations.push_back(e);
    out.steering += -e / n;
  }
  out.tail_weight = experiment.tail_weight();
  return out;
}

double heralding_efficiency(const Experiment& experiment, const MeasurementSet& settings) {
  double eps = 0.0;
  for (const auto& u : settings.directions()) {
    const OutcomeTable t = experiment.outcome_distribution(u, u);
    const double three = t.p_herald_bob();
    if (three <= 0.0) throw std::domain_error("three-fold conditioning event has zero probability");
    eps += t.p_fourfold() / three;
  }
  return eps / static_cast<double>(settings.size());
}

double heralding_efficiency(const ExperimentConfig& config) {
  return heralding_efficiency(Experiment(config), platonic_settings(config.settings_n));
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<TrialRecord> sample_trials(const Experiment& experiment,
                                       const MeasurementSet& settings, std::size_t n_trials,
                                       std::uint64_t seed, SamplingMode mode) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");

  struct Cumulative {
    std::array<double, kPatternCount> cdf{};
    double total = 0.0;
  };
  std::vector<Cumulative> tables;
  bool swap = experiment.config().swap_enabled;
  for (const auto& u : settings.directions()) {
    const OutcomeTable t = experiment.outcome_distribution(u, u);
    Cumulative c;
    double acc = 0.0;
    for (std::size_t s = 0; s < kPatternCount; ++s) {
      const bool keep = mode == SamplingMode::kRaw ||
                        (mode == SamplingMode::kHeralded && t.herald(s)) ||
                        (mode == SamplingMode::kThreefold && t.herald(s) && OutcomeTable::bob_clicked(s));
      if (keep) acc += t.probability[s];
      c.cdf[s] = acc;
    }
    c.total = acc;
    if (!(acc > 0.0)) throw std::domain_error("sampling event has zero probability");
    tables.push_back(c);
  }

  OutcomeTable helper;
  helper.swap_enabled = swap;
  std::mt19937_64 engine = make_engine(seed);
  std::vector<TrialRecord> records;
  records.reserve(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) {
    TrialRecord rec;
    rec.setting = static_cast<std::size_t>(uniform01(engine) * static_cast<double>(settings.size()));
    rec.setting = std::min(rec.setting, settings.size() - 1);
    const auto& c = tables[rec.setting];
    const double target = uniform01(engine) * c.total;
    auto it = std::upper_bound(c.cdf.begin(), c.cdf.end(), target);
    const std::size_t pattern =
        static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - c.cdf.begin(), kPatternCount - 1));

    rec.herald = helper.herald(pattern);
    const bool ap = OutcomeTable::fired(pattern, Detector::kAlicePlus);
    const bool am = OutcomeTable::fired(pattern, Detector::kAliceMinus);
    const bool bp = OutcomeTable::fired(pattern, Detector::kBobPlus);
    const bool bm = OutcomeTable::fired(pattern, Detector::kBobMinus);
    if (ap || am) {
      rec.alice_declared = true;
      rec.alice_outcome = (ap && am) ? (uniform01(engine) < 0.5 ? 1 : -1) : (ap ? 1 : -1);
    }
    if (bp || bm) {
      rec.bob_outcome = (bp && bm) ? (uniform01(engine) < 0.5 ? 1 : -1) : (bp ? 1 : -1);
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<TrialRecord> sample_trials(const ExperimentConfig& config,
                                       const MeasurementSet& settings, std::size_t n_trials,
                                       std::uint64_t seed, SamplingMode mode) {
  return sample_trials(Experiment(config), settings, n_trials, seed, mode);
}

}  // namespace hsteer
