// tomography.hpp
// Two-qubit polarization state tomography over the 36 Pauli-eigenstate
// projector pairs: synthetic Poisson counts, maximum-likelihood
// reconstruction and Monte Carlo uncertainty.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsteer/settings.hpp"

namespace hsteer {

inline constexpr std::size_t kTomographyProjectors = 36;

/// Single-qubit eigenstates in projector order: H, V, D, A, R, L
/// (= +z, -z, +x, -x, +y, -y). Projector pair (a, b) has index 6 a + b.
BlochVector pauli_eigenstate_direction(std::size_t eigenstate);
const std::string& pauli_eigenstate_label(std::size_t eigenstate);
/// Inverse of pauli_eigenstate_label; throws on unknown labels.
std::size_t pauli_eigenstate_index(const std::string& label);

class TwoQubitDensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity to `tolerance`.
  static TwoQubitDensityMatrix create(const Eigen::Matrix4cd& matrix, double tolerance = 1e-10);
  static TwoQubitDensityMatrix from_pure(const Eigen::Vector4cd& psi);
  static TwoQubitDensityMatrix maximally_mixed();

  [[nodiscard]] const Eigen::Matrix4cd& matrix() const { return matrix_; }
  [[nodiscard]] double min_eigenvalue() const;

 private:
  explicit TwoQubitDensityMatrix(const Eigen::Matrix4cd& m) : matrix_(m) {}
  Eigen::Matrix4cd matrix_;
};

/// (|HV> - |VH>)/sqrt2 in the HH, HV, VH, VV basis.
Eigen::Vector4cd singlet_vector();

struct TomographyCounts {
  std::array<std::int64_t, kTomographyProjectors> counts{};
  /// Relative acquisition time per projector pair.
  std::array<double, kTomographyProjectors> weights = [] {
    std::array<double, kTomographyProjectors> w{};
    w.fill(1.0);
    return w;
  }();

  void validate() const;
  [[nodiscard]] std::int64_t total() const;
};

/// Tr(rho Pi_a (x) Pi_b) for all 36 pairs.
std::array<double, kTomographyProjectors> projector_probabilities(const Eigen::Matrix4cd& rho);

/// Expected counts mean_total * w_i p_i / sum_j w_j p_j.
std::array<double, kTomographyProjectors> expected_counts(
    const std::array<double, kTomographyProjectors>& probabilities, double mean_total,
    const std::array<double, kTomographyProjectors>& weights);

/// Independent Poisson draws around the expected counts. Deterministic per seed.
TomographyCounts synth_counts(const TwoQubitDensityMatrix& rho, double mean_total,
                              std::uint64_t seed);
TomographyCounts synth_counts_from_expected(
    const std::array<double, kTomographyProjectors>& expected, std::uint64_t seed);

struct MleOptions {
  int max_iterations = 10000;
  double relative_tolerance = 1e-10;
  bool record_trace = false;
};

struct MleResult {
  TwoQubitDensityMatrix rho;
  int iterations = 0;
  bool converged = false;
  double log_likelihood = 0.0;
  std::vector<double> likelihood_trace;
};

/// Poisson log-likelihood of the counts under rho with the overall rate
/// profiled out; invariant under rescaling of rho.
double log_likelihood(const TomographyCounts& counts, const Eigen::Matrix4cd& rho);

/// Maximum-likelihood estimate. Iterates rho <- A rho A / Tr with
/// A = I + t D and D the likelihood gradient, so every iterate is positive by
/// construction; the step t is backtracked until the likelihood does not
/// decrease. Throws std::invalid_argument when every count is zero.
MleResult reconstruct_mle(const TomographyCounts& counts, const MleOptions& options = {});

/// <psi|rho|psi>.
double fidelity(const Eigen::Matrix4cd& rho, const Eigen::Vector4cd& psi);
double fidelity(const TwoQubitDensityMatrix& rho, const Eigen::Vector4cd& psi);

struct McUncertainty {
  double mean_fidelity = 0.0;
  double sd_fidelity = 0.0;
  int resamples = 0;
  int non_converged = 0;
};

/// Resamples each count from Poisson(observed), reconstructs and reports the
/// fidelity spread. Resample i uses derive_seed(seed, i); resamples run on
/// `threads` workers (0 = hardware concurrency) with order-independent output.
McUncertainty mc_uncertainty(const TomographyCounts& counts, int n_resamples, std::uint64_t seed,
                             const Eigen::Vector4cd& target = singlet_vector(),
                             unsigned threads = 0);

/// CSV with header "basis_a,basis_b,count"; rows in projector order on write,
/// any order on read (all 36 pairs required exactly once).
TomographyCounts read_counts_csv(std::istream& in);
void write_counts_csv(std::ostream& out, const TomographyCounts& counts);

}  // namespace hsteer
