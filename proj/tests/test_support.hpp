// Shared helpers for the unit tests.

#pragma once

#include <Eigen/Core>
#include <random>
#include <string>
#include <vector>

#include "hsteer/fock.hpp"

namespace testing_support {

using namespace hsteer;

inline OccupationState occupation(const ModeLayout& layout,
                                  std::initializer_list<std::pair<std::size_t, int>> photons) {
  OccupationState o;
  o.counts.assign(layout.size(), 0);
  for (auto [mode, n] : photons) o.counts[mode] = static_cast<std::uint8_t>(n);
  return o;
}

inline std::size_t mode(const ModeLayout& layout, const std::string& arm, Polarization p,
                        SpectralLabel s = SpectralLabel::kMatched) {
  return layout.index(arm, p, s);
}

/// Normalized random superposition of up to `photons` photons spread over
/// the matched modes of the given arms.
inline PhotonicState random_state(const std::vector<std::string>& arms, int photons, int max_photons,
                                  std::uint64_t seed) {
  ModeLayout layout(arms);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::pair<OccupationState, Amplitude>> terms;
  std::uniform_int_distribution<std::size_t> pick(0, layout.size() - 1);
  for (int t = 0; t < 12; ++t) {
    OccupationState o;
    o.counts.assign(layout.size(), 0);
    std::uniform_int_distribution<int> count(0, photons);
    const int n = count(rng);
    for (int k = 0; k < n; ++k) ++o.counts[pick(rng)];
    terms.emplace_back(o, Amplitude(g(rng), g(rng)));
  }
  PhotonicState raw(layout, max_photons);
  for (auto& [o, a] : terms) raw.add(o, a);
  const double n = std::sqrt(raw.norm());
  PhotonicState out(layout, max_photons);
  for (const auto& [o, a] : raw.amplitudes()) out.add(o, a / n);
  return out;
}

inline std::vector<DetectorGroup> arm_groups(const ModeLayout& layout,
                                             const std::vector<std::string>& arms,
                                             ThresholdDetector d) {
  std::vector<DetectorGroup> groups;
  for (const auto& arm : arms) {
    const auto m = layout.arm_modes(arm);
    groups.push_back({{m.begin(), m.end()}, d});
  }
  return groups;
}

/// Two-qubit polarization state of the sector with exactly one photon in each
/// of two arms (basis HH, HV, VH, VV), mixed over ensemble members, trace-normalized.
inline Eigen::Matrix4cd one_pair_density(const StateEnsemble& ensemble, const std::string& arm_a,
                                         const std::string& arm_b) {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (const auto& m : ensemble.members) {
    const auto& layout = m.state.layout();
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    for (const auto& [occ, amp] : m.state.amplitudes()) {
      if (occ.total() != 2) continue;
      int pa = -1, pb = -1;
      for (std::size_t k = 0; k < layout.size(); ++k) {
        if (occ.counts[k] == 0) continue;
        const auto label = layout.label(k);
        if (label.arm == arm_a) pa = static_cast<int>(label.polarization);
        if (label.arm == arm_b) pb = static_cast<int>(label.polarization);
      }
      if (pa >= 0 && pb >= 0) psi(2 * pa + pb) += amp;
    }
    rho += m.weight * psi * psi.adjoint();
  }
  return rho / rho.trace().real();
}

inline Eigen::Vector4cd singlet() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace testing_support
