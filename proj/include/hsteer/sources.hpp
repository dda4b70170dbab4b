// sources.hpp
// Polarization-entangled SPDC pair sources: multi-pair emission, one-pair
// sector noise and partial spectral indistinguishability.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "hsteer/fock.hpp"

namespace hsteer {

/// Two-photon polarization state emitted in the one-pair sector.
enum class PairState {
  kSinglet,   // (|HV> - |VH>)/sqrt2
  kProductZ,  // |H>|V>
  kProductX,  // |D>|A>
};

/// Squared overlap of the interfering photon with the reference spectral mode,
/// per polarization.
struct SpectralOverlap {
  double h = 1.0;
  double v = 1.0;
};

struct SourceConfig {
  double squeezing = 0.0;
  double singlet_fidelity = 1.0;
  SpectralOverlap overlap;
  std::string arm_1 = "a";
  std::string arm_2 = "b";
  PairState pair_state = PairState::kSinglet;

  void validate() const;
};

/// n-pair emission probabilities w_n = (1 - xi^2)^2 (n + 1) xi^(2n), n = 0..max_pairs.
/// Not renormalized; the deficit from one is the truncated tail.
std::vector<double> pair_sector_weights(double squeezing, int max_pairs);

/// Two-arm multi-pair state with pairs in the matched spectral components.
/// The one-pair sector carries `config.pair_state`; higher sectors follow the
/// singlet SPDC structure.
PhotonicState spdc_state(const SourceConfig& config, int max_photons);

/// Amplitudes c[p][q] of the pair state, p/q = polarization of arm_1/arm_2 photon.
std::array<std::array<Amplitude, 2>, 2> pair_state_amplitudes(PairState state);

/// Werner mixing weight p with p + (1 - p)/4 = fidelity.
double werner_weight(double fidelity_target);

/// Mixes the one-pair sector with isotropic noise so that its two-qubit state
/// has the requested fidelity with the emitted pair state. Higher sectors are
/// untouched. The state must span exactly two non-environment arms.
StateEnsemble apply_pair_noise(const PhotonicState& state, double fidelity_target);

/// Every photon in `arm` is split into sqrt(V) matched + sqrt(1-V) orthogonal
/// components, V chosen per polarization.
PhotonicState split_spectral_mode(const PhotonicState& state, std::string_view arm,
                                  SpectralOverlap overlap);
PhotonicState split_spectral_mode(const PhotonicState& state, std::string_view arm,
                                  double overlap);

/// spdc_state -> apply_pair_noise, the per-source ensemble used by the circuit.
/// The spectral split is applied to `interfering_arm` when non-empty.
StateEnsemble source_ensemble(const SourceConfig& config, int max_photons,
                              std::string_view interfering_arm = {});

}  // namespace hsteer
