// fock.cpp

#include "hsteer/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hsteer {

namespace {

constexpr std::string_view kEnvironmentPrefix = "env:";

double factorial(int n) {
  static const auto table = [] {
    std::array<double, 64> t{};
    t[0] = 1.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
    return t;
  }();
  if (n < 0 || n >= static_cast<int>(table.size())) {
    throw std::out_of_range("factorial argument out of range");
  }
  return table[static_cast<std::size_t>(n)];
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

Amplitude ipow(Amplitude base, int exponent) {
  Amplitude result{1.0, 0.0};
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

void check_unit_interval(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeLayout

ModeLayout::ModeLayout(const std::vector<std::string>& arms) {
  for (const auto& arm : arms) *this = with_arm(arm);
}

ModeLayout ModeLayout::with_arm(std::string arm, bool environment) const {
  if (arm.empty()) throw std::invalid_argument("arm name must be non-empty");
  if (has_arm(arm)) throw std::invalid_argument("duplicate arm '" + arm + "'");
  ModeLayout out = *this;
  out.arms_.push_back(std::move(arm));
  out.environment_.push_back(environment);
  return out;
}

bool ModeLayout::has_arm(std::string_view arm) const {
  return std::find(arms_.begin(), arms_.end(), arm) != arms_.end();
}

std::size_t ModeLayout::arm_position(std::string_view arm) const {
  auto it = std::find(arms_.begin(), arms_.end(), arm);
  if (it == arms_.end()) throw std::invalid_argument("unknown arm '" + std::string(arm) + "'");
  return static_cast<std::size_t>(it - arms_.begin());
}

bool ModeLayout::is_environment_arm(std::string_view arm) const {
  return environment_[arm_position(arm)];
}

bool ModeLayout::is_environment_mode(std::size_t mode) const {
  return environment_.at(mode / kModesPerArm);
}

std::size_t ModeLayout::environment_arm_count() const {
  return static_cast<std::size_t>(std::count(environment_.begin(), environment_.end(), true));
}

ModeLabel ModeLayout::label(std::size_t mode) const {
  if (mode >= size()) throw std::out_of_range("mode index out of range");
  const std::size_t local = mode % kModesPerArm;
  return ModeLabel{arms_[mode / kModesPerArm], static_cast<Polarization>(local / 2),
                   static_cast<SpectralLabel>(local % 2)};
}

std::size_t ModeLayout::index(std::string_view arm, Polarization pol,
                              SpectralLabel internal) const {
  return arm_position(arm) * kModesPerArm + 2 * static_cast<std::size_t>(pol) +
         static_cast<std::size_t>(internal);
}

std::optional<std::size_t> ModeLayout::find(const ModeLabel& label) const {
  if (!has_arm(label.arm)) return std::nullopt;
  return index(label.arm, label.polarization, label.internal);
}

std::array<std::size_t, 4> ModeLayout::arm_modes(std::string_view arm) const {
  const std::size_t base = arm_position(arm) * kModesPerArm;
  return {base, base + 1, base + 2, base + 3};
}

ModeLayout ModeLayout::concat(const ModeLayout& a, const ModeLayout& b) {
  ModeLayout out = a;
  for (std::size_t i = 0; i < b.arms_.size(); ++i) {
    if (out.has_arm(b.arms_[i])) {
      throw std::invalid_argument("layout collision on arm '" + b.arms_[i] + "'");
    }
    out = out.with_arm(b.arms_[i], b.environment_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// OccupationState / PhotonicState

int OccupationState::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

PhotonicState::PhotonicState(ModeLayout layout, int max_photons)
    : layout_(std::move(layout)), max_photons_(max_photons) {
  if (max_photons_ < 0) throw std::invalid_argument("truncation must be non-negative");
}

PhotonicState PhotonicState::vacuum(ModeLayout layout, int max_photons) {
  PhotonicState state(std::move(layout), max_photons);
  state.add(OccupationState{std::vector<std::uint8_t>(state.layout_.size(), 0)}, 1.0);
  return state;
}

bool PhotonicState::add(const OccupationState& occupation, Amplitude amplitude) {
  if (occupation.counts.size() != layout_.size()) {
    throw std::invalid_argument("occupation length does not match layout");
  }
  if (occupation.total() > max_photons_) return false;
  amplitudes_[occupation] += amplitude;
  return true;
}

Amplitude PhotonicState::amplitude(const OccupationState& occupation) const {
  auto it = amplitudes_.find(occupation);
  return it == amplitudes_.end() ? Amplitude{} : it->second;
}

double PhotonicState::norm() const {
  double sum = 0.0;
  for (const auto& [occ, a] : amplitudes_) sum += std::norm(a);
  return sum;
}

double PhotonicState::tail_weight() const { return std::max(0.0, 1.0 - norm()); }

void PhotonicState::prune(double threshold) {
  std::erase_if(amplitudes_, [&](const auto& kv) { return std::norm(kv.second) < threshold; });
}

StateEnsemble StateEnsemble::pure(PhotonicState state) {
  StateEnsemble ensemble;
  ensemble.members.push_back({1.0, std::move(state)});
  return ensemble;
}

double StateEnsemble::tail_weight() const {
  double tail = 0.0;
  for (const auto& m : members) tail += m.weight * m.state.tail_weight();
  return tail;
}

// ---------------------------------------------------------------------------
// Detection

void ThresholdDetector::validate() const {
  check_unit_interval(efficiency, "detector efficiency");
  check_unit_interval(dark_count, "dark-count probability");
}

double ThresholdDetector::click_probability(int photons) const {
  return 1.0 - (1.0 - dark_count) * std::pow(1.0 - efficiency, photons);
}

double ClickDistribution::total() const {
  return std::accumulate(probability.begin(), probability.end(), 0.0);
}

double ClickDistribution::marginal_click(std::size_t group) const {
  double p = 0.0;
  for (std::size_t pattern = 0; pattern < probability.size(); ++pattern) {
    if (pattern & (std::size_t{1} << group)) p += probability[pattern];
  }
  return p;
}

namespace {

// Maps each non-environment mode to its detector group.
std::vector<int> group_of_mode(const ModeLayout& layout, std::span<const DetectorGroup> groups) {
  std::vector<int> owner(layout.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].detector.validate();
    for (std::size_t mode : groups[g].modes) {
      if (mode >= layout.size()) throw std::invalid_argument("detector mode out of range");
      if (layout.is_environment_mode(mode)) {
        throw std::invalid_argument("environment modes cannot be detected");
      }
      if (owner[mode] != -1) throw std::invalid_argument("detector groups overlap");
      owner[mode] = static_cast<int>(g);
    }
  }
  for (std::size_t mode = 0; mode < layout.size(); ++mode) {
    if (!layout.is_environment_mode(mode) && owner[mode] == -1) {
      throw std::invalid_argument("detector groups must cover every non-environment mode");
    }
  }
  return owner;
}

void accumulate_clicks(const PhotonicState& state, std::span<const DetectorGroup> groups,
                       double weight, std::vector<double>& out) {
  if (groups.size() > 20) throw std::invalid_argument("too many detector groups");
  const auto owner = group_of_mode(state.layout(), groups);

  std::map<std::vector<int>, double> by_counts;
  std::vector<int> counts(groups.size());
  for (const auto& [occ, a] : state.amplitudes()) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t mode = 0; mode < occ.counts.size(); ++mode) {
      if (owner[mode] >= 0) counts[static_cast<std::size_t>(owner[mode])] += occ.counts[mode];
    }
    by_counts[counts] += std::norm(a);
  }

  const std::size_t patterns = std::size_t{1} << groups.size();
  std::vector<double> click(groups.size());
  for (const auto& [n, p] : by_counts) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      click[g] = groups[g].detector.click_probability(n[g]);
    }
    for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
      double q = weight * p;
      for (std::size_t g = 0; g < groups.size() && q != 0.0; ++g) {
        q *= (pattern & (std::size_t{1} << g)) ? click[g] : 1.0 - click[g];
      }
      out[pattern] += q;
    }
  }
}

}  // namespace

ClickDistribution click_distribution(const PhotonicState& state,
                                     std::span<const DetectorGroup> groups) {
  ClickDistribution dist;
  dist.probability.assign(std::size_t{1} << groups.size(), 0.0);
  accumulate_clicks(state, groups, 1.0, dist.probability);
  dist.tail_weight = state.tail_weight();
  return dist;
}

ClickDistribution click_distribution(const StateEnsemble& ensemble,
                                     std::span<const DetectorGroup> groups) {
  ClickDistribution dist;
  dist.probability.assign(std::size_t{1} << groups.size(), 0.0);
  for (const auto& member : ensemble.members) {
    accumulate_clicks(member.state, groups, member.weight, dist.probability);
  }
  dist.tail_weight = ensemble.tail_weight();
  return dist;
}

// ---------------------------------------------------------------------------
// Linear optics

PhotonicState apply_mode_transform(const PhotonicState& state, std::size_t mode_i,
                                   std::size_t mode_j, const ModeMatrix& m) {
  const auto& layout = state.layout();
  if (mode_i >= layout.size() || mode_j >= layout.size() || mode_i == mode_j) {
    throw std::invalid_argument("invalid mode pair for two-mode transform");
  }
  PhotonicState out(layout, state.max_photons());
  OccupationState target;
  for (const auto& [occ, a] : state.amplitudes()) {
    const int ni = occ.counts[mode_i];
    const int nj = occ.counts[mode_j];
    if (ni == 0 && nj == 0) {
      out.add(occ, a);
      continue;
    }
    target = occ;
    const double inv_norm = 1.0 / std::sqrt(factorial(ni) * factorial(nj));
    // (m00 a_i^+ + m10 a_j^+)^ni (m01 a_i^+ + m11 a_j^+)^nj
    for (int k = 0; k <= ni; ++k) {
      const Amplitude ck = binomial(ni, k) * ipow(m[0][0], k) * ipow(m[1][0], ni - k);
      if (ck == Amplitude{}) continue;
      for (int l = 0; l <= nj; ++l) {
        const Amplitude cl = binomial(nj, l) * ipow(m[0][1], l) * ipow(m[1][1], nj - l);
        if (cl == Amplitude{}) continue;
        const int p = k + l;
        const int q = ni + nj - p;
        target.counts[mode_i] = static_cast<std::uint8_t>(p);
        target.counts[mode_j] = static_cast<std::uint8_t>(q);
        out.add(target, a * ck * cl * std::sqrt(factorial(p) * factorial(q)) * inv_norm);
      }
    }
  }
  out.prune();
  return out;
}

PhotonicState apply_beamsplitter(const PhotonicState& state, std::string_view arm_a,
                                 std::string_view arm_b, double transmissivity_h,
                                 double transmissivity_v, double phase) {
  check_unit_interval(transmissivity_h, "H transmissivity");
  check_unit_interval(transmissivity_v, "V transmissivity");
  const auto& layout = state.layout();
  if (arm_a == arm_b) throw std::invalid_argument("beam splitter needs two distinct arms");
  const auto modes_a = layout.arm_modes(arm_a);
  const auto modes_b = layout.arm_modes(arm_b);

  PhotonicState out = state;
  for (std::size_t local = 0; local < 4; ++local) {
    const double t = local < 2 ? transmissivity_h : transmissivity_v;
    const double amp_t = std::sqrt(t);
    const double amp_r = std::sqrt(1.0 - t);
    const Amplitude i{0.0, 1.0};
    const Amplitude e = std::polar(1.0, phase);
    const ModeMatrix bs{{{amp_t, i * e * amp_r}, {i * std::conj(e) * amp_r, amp_t}}};
    out = apply_mode_transform(out, modes_a[local], modes_b[local], bs);
  }
  return out;
}

PhotonicState apply_loss(const PhotonicState& state, std::string_view arm,
                         double transmission) {
  check_unit_interval(transmission, "transmission");
  const auto& layout = state.layout();
  if (!layout.has_arm(arm)) throw std::invalid_argument("unknown arm '" + std::string(arm) + "'");

  std::string env_name = std::string(kEnvironmentPrefix) + std::string(arm) + ":" +
                         std::to_string(layout.environment_arm_count());
  ModeLayout extended = layout.with_arm(env_name, true);

  PhotonicState widened(extended, state.max_photons());
  for (const auto& [occ, a] : state.amplitudes()) {
    OccupationState w = occ;
    w.counts.resize(extended.size(), 0);
    widened.add(w, a);
  }
  if (transmission == 1.0) return widened;
  return apply_beamsplitter(widened, arm, env_name, transmission, transmission);
}

PhotonicState apply_polarization_unitary(const PhotonicState& state, std::string_view arm,
                                         const ModeMatrix& unitary) {
  const auto modes = state.layout().arm_modes(arm);
  PhotonicState out = apply_mode_transform(state, modes[0], modes[2], unitary);
  return apply_mode_transform(out, modes[1], modes[3], unitary);
}

// ---------------------------------------------------------------------------
// Composition

PhotonicState tensor(const PhotonicState& a, const PhotonicState& b,
                     std::optional<int> max_photons) {
  ModeLayout layout = ModeLayout::concat(a.layout(), b.layout());
  PhotonicState out(layout, max_photons.value_or(std::max(a.max_photons(), b.max_photons())));
  OccupationState joint;
  joint.counts.resize(layout.size());
  for (const auto& [occ_a, amp_a] : a.amplitudes()) {
    std::copy(occ_a.counts.begin(), occ_a.counts.end(), joint.counts.begin());
    for (const auto& [occ_b, amp_b] : b.amplitudes()) {
      std::copy(occ_b.counts.begin(), occ_b.counts.end(),
                joint.counts.begin() + static_cast<std::ptrdiff_t>(occ_a.counts.size()));
      out.add(joint, amp_a * amp_b);
    }
  }
  return out;
}

StateEnsemble tensor(const StateEnsemble& a, const StateEnsemble& b,
                     std::optional<int> max_photons) {
  StateEnsemble out;
  for (const auto& ma : a.members) {
    for (const auto& mb : b.members) {
      out.members.push_back({ma.weight * mb.weight, tensor(ma.state, mb.state, max_photons)});
    }
  }
  return out;
}

double norm(const PhotonicState& state) { return state.norm(); }

Projection project(const PhotonicState& state, std::span<const ModeCondition> conditions) {
  for (const auto& c : conditions) {
    if (c.mode >= state.layout().size()) throw std::invalid_argument("condition mode out of range");
    if (c.photons < 0) throw std::invalid_argument("photon number must be non-negative");
  }
  PhotonicState kept(state.layout(), state.max_photons());
  double probability = 0.0;
  for (const auto& [occ, a] : state.amplitudes()) {
    const bool match = std::all_of(conditions.begin(), conditions.end(), [&](const auto& c) {
      return occ.counts[c.mode] == c.photons;
    });
    if (match) {
      kept.add(occ, a);
      probability += std::norm(a);
    }
  }
  if (probability <= 0.0) return {std::move(kept), 0.0};
  PhotonicState normalized(state.layout(), state.max_photons());
  const double scale = 1.0 / std::sqrt(probability);
  for (const auto& [occ, a] : kept.amplitudes()) normalized.add(occ, a * scale);
  return {std::move(normalized), probability};
}

int arm_photons(const OccupationState& occupation, const ModeLayout& layout,
                std::string_view arm) {
  int n = 0;
  for (std::size_t mode : layout.arm_modes(arm)) n += occupation.counts[mode];
  return n;
}

double db_to_transmission(double loss_db) {
  if (!(loss_db >= 0.0) || !std::isfinite(loss_db)) {
    throw std::invalid_argument("loss in dB must be finite and non-negative");
  }
  return std::pow(10.0, -loss_db / 10.0);
}

}  // namespace hsteer
