// sources.cpp

#include "hsteer/sources.hpp"

#include <cmath>
#include <stdexcept>

namespace hsteer {

namespace {

using PairAmplitudes = std::array<std::array<Amplitude, 2>, 2>;

constexpr double kInvSqrt2 = 0.70710678118654752440;

PairAmplitudes bell_state(int which) {
  switch (which) {
    case 0: return {{{0.0, kInvSqrt2}, {-kInvSqrt2, 0.0}}};  // psi-
    case 1: return {{{0.0, kInvSqrt2}, {kInvSqrt2, 0.0}}};   // psi+
    case 2: return {{{kInvSqrt2, 0.0}, {0.0, kInvSqrt2}}};   // phi+
    default: return {{{kInvSqrt2, 0.0}, {0.0, -kInvSqrt2}}};  // phi-
  }
}

Amplitude inner(const PairAmplitudes& a, const PairAmplitudes& b) {
  Amplitude s{};
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) s += std::conj(a[p][q]) * b[p][q];
  return s;
}

// Orthonormal basis of the two-qubit space whose first element is `first`.
std::vector<PairAmplitudes> completed_basis(const PairAmplitudes& first) {
  std::vector<PairAmplitudes> basis{first};
  for (int k = 0; k < 4 && basis.size() < 4; ++k) {
    PairAmplitudes v = bell_state(k);
    for (const auto& b : basis) {
      const Amplitude proj = inner(b, v);
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) v[p][q] -= proj * b[p][q];
    }
    const double n = std::sqrt(std::real(inner(v, v)));
    if (n < 1e-8) continue;
    for (auto& row : v)
      for (auto& x : row) x /= n;
    basis.push_back(v);
  }
  return basis;
}

std::vector<std::string> physical_arms(const ModeLayout& layout) {
  std::vector<std::string> arms;
  for (const auto& arm : layout.arms()) {
    if (!layout.is_environment_arm(arm)) arms.push_back(arm);
  }
  return arms;
}

}  // namespace

void SourceConfig::validate() const {
  if (!(squeezing >= 0.0 && squeezing < 1.0)) {
    throw std::invalid_argument("squeezing must lie in [0, 1)");
  }
  if (!(singlet_fidelity >= 0.25 && singlet_fidelity <= 1.0)) {
    throw std::invalid_argument("singlet fidelity target must lie in [0.25, 1]");
  }
  if (!(overlap.h >= 0.0 && overlap.h <= 1.0 && overlap.v >= 0.0 && overlap.v <= 1.0)) {
    throw std::invalid_argument("spectral overlap must lie in [0, 1]");
  }
  if (arm_1.empty() || arm_2.empty() || arm_1 == arm_2) {
    throw std::invalid_argument("source needs two distinct arm labels");
  }
}

std::vector<double> pair_sector_weights(double squeezing, int max_pairs) {
  if (!(squeezing >= 0.0 && squeezing < 1.0)) {
    throw std::invalid_argument("squeezing must lie in [0, 1)");
  }
  if (max_pairs < 0) throw std::invalid_argument("max_pairs must be non-negative");
  const double x2 = squeezing * squeezing;
  std::vector<double> w(static_cast<std::size_t>(max_pairs) + 1);
  double power = 1.0;
  for (int n = 0; n <= max_pairs; ++n) {
    w[static_cast<std::size_t>(n)] = (1.0 - x2) * (1.0 - x2) * (n + 1) * power;
    power *= x2;
  }
  return w;
}

PairAmplitudes pair_state_amplitudes(PairState state) {
  switch (state) {
    case PairState::kSinglet:
      return bell_state(0);
    case PairState::kProductZ:
      return {{{0.0, 1.0}, {0.0, 0.0}}};
    case PairState::kProductX:
      // |D> = (H + V)/sqrt2, |A> = (H - V)/sqrt2
      return {{{0.5, -0.5}, {0.5, -0.5}}};
  }
  throw std::invalid_argument("unknown pair state");
}

PhotonicState spdc_state(const SourceConfig& config, int max_photons) {
  config.validate();
  if (max_photons < 2) throw std::invalid_argument("truncation must allow at least one pair");

  const ModeLayout layout({config.arm_1, config.arm_2});
  PhotonicState state(layout, max_photons);
  const std::size_t h1 = layout.index(config.arm_1, Polarization::kH, SpectralLabel::kMatched);
  const std::size_t v1 = layout.index(config.arm_1, Polarization::kV, SpectralLabel::kMatched);
  const std::size_t h2 = layout.index(config.arm_2, Polarization::kH, SpectralLabel::kMatched);
  const std::size_t v2 = layout.index(config.arm_2, Polarization::kV, SpectralLabel::kMatched);

  const double xi = config.squeezing;
  const double scale = 1.0 - xi * xi;
  const int max_pairs = max_photons / 2;
  OccupationState occ{std::vector<std::uint8_t>(layout.size(), 0)};

  for (int j = 0; j <= max_pairs; ++j) {
    for (int m = 0; j + m <= max_pairs; ++m) {
      if (j + m == 1 && config.pair_state != PairState::kSinglet) continue;
      std::fill(occ.counts.begin(), occ.counts.end(), 0);
      occ.counts[h1] = static_cast<std::uint8_t>(j);
      occ.counts[v1] = static_cast<std::uint8_t>(m);
      occ.counts[h2] = static_cast<std::uint8_t>(m);
      occ.counts[v2] = static_cast<std::uint8_t>(j);
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const double amp = scale * std::pow(xi, j + m) * sign;
      if (amp != 0.0) state.add(occ, amp);
    }
  }

  if (config.pair_state != PairState::kSinglet && xi > 0.0) {
    const double sector = scale * xi * std::sqrt(2.0);
    const auto c = pair_state_amplitudes(config.pair_state);
    const std::array<std::size_t, 2> m1{h1, v1};
    const std::array<std::size_t, 2> m2{h2, v2};
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        if (c[p][q] == Amplitude{}) continue;
        std::fill(occ.counts.begin(), occ.counts.end(), 0);
        occ.counts[m1[p]] = 1;
        occ.counts[m2[q]] = 1;
        state.add(occ, sector * c[p][q]);
      }
    }
  }
  return state;
}

double werner_weight(double fidelity_target) {
  if (!(fidelity_target >= 0.25 && fidelity_target <= 1.0)) {
    throw std::invalid_argument("fidelity target must lie in [0.25, 1]");
  }
  return (4.0 * fidelity_target - 1.0) / 3.0;
}

StateEnsemble apply_pair_noise(const PhotonicState& state, double fidelity_target) {
  werner_weight(fidelity_target);  // range check
  const ModeLayout& layout = state.layout();
  const auto arms = physical_arms(layout);
  if (arms.size() != 2) {
    throw std::invalid_argument("pair noise needs a state over exactly two arms");
  }
  const auto a1 = layout.arm_modes(arms[0]);
  const auto a2 = layout.arm_modes(arms[1]);
  // arm_modes order: H-matched, H-orth, V-matched, V-orth
  const std::array<std::size_t, 2> m1{a1[0], a1[2]};
  const std::array<std::size_t, 2> m2{a2[0], a2[2]};

  PairAmplitudes sector{};
  for (const auto& [occ, a] : state.amplitudes()) {
    if (occ.total() != 2) continue;
    bool placed = false;
    for (int p = 0; p < 2 && !placed; ++p) {
      for (int q = 0; q < 2 && !placed; ++q) {
        if (occ.counts[m1[p]] == 1 && occ.counts[m2[q]] == 1) {
          sector[p][q] = a;
          placed = true;
        }
      }
    }
    if (!placed) {
      throw std::invalid_argument("one-pair sector must hold one matched photon per arm");
    }
  }
  const double sector_norm = std::sqrt(std::real(inner(sector, sector)));
  if (fidelity_target == 1.0 || sector_norm == 0.0) return StateEnsemble::pure(state);

  PairAmplitudes unit = sector;
  for (auto& row : unit)
    for (auto& x : row) x /= sector_norm;
  const auto basis = completed_basis(unit);

  StateEnsemble ensemble;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double weight = k == 0 ? fidelity_target : (1.0 - fidelity_target) / 3.0;
    if (weight <= 0.0) continue;
    PhotonicState member(layout, state.max_photons());
    for (const auto& [occ, a] : state.amplitudes()) {
      if (occ.total() != 2) member.add(occ, a);
    }
    OccupationState occ{std::vector<std::uint8_t>(layout.size(), 0)};
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        const Amplitude a = sector_norm * basis[k][static_cast<std::size_t>(p)][q];
        if (std::norm(a) < 1e-300) continue;
        std::fill(occ.counts.begin(), occ.counts.end(), 0);
        occ.counts[m1[static_cast<std::size_t>(p)]] = 1;
        occ.counts[m2[static_cast<std::size_t>(q)]] = 1;
        member.add(occ, a);
      }
    }
    ensemble.members.push_back({weight, std::move(member)});
  }
  return ensemble;
}

PhotonicState split_spectral_mode(const PhotonicState& state, std::string_view arm,
                                  SpectralOverlap overlap) {
  if (!(overlap.h >= 0.0 && overlap.h <= 1.0 && overlap.v >= 0.0 && overlap.v <= 1.0)) {
    throw std::invalid_argument("spectral overlap must lie in [0, 1]");
  }
  const auto modes = state.layout().arm_modes(arm);
  PhotonicState out = state;
  const std::array<double, 2> v{overlap.h, overlap.v};
  for (std::size_t pol = 0; pol < 2; ++pol) {
    if (v[pol] == 1.0) continue;
    const double keep = std::sqrt(v[pol]);
    const double leak = std::sqrt(1.0 - v[pol]);
    const ModeMatrix m{{{keep, -leak}, {leak, keep}}};
    out = apply_mode_transform(out, modes[2 * pol], modes[2 * pol + 1], m);
  }
  return out;
}

PhotonicState split_spectral_mode(const PhotonicState& state, std::string_view arm,
                                  double overlap) {
  return split_spectral_mode(state, arm, SpectralOverlap{overlap, overlap});
}

StateEnsemble source_ensemble(const SourceConfig& config, int max_photons,
                              std::string_view interfering_arm) {
  StateEnsemble ensemble = apply_pair_noise(spdc_state(config, max_photons),
                                            config.singlet_fidelity);
  if (!interfering_arm.empty()) {
    for (auto& member : ensemble.members) {
      member.state = split_spectral_mode(member.state, interfering_arm, config.overlap);
    }
  }
  return ensemble;
}

}  // namespace hsteer
