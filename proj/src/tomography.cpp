// tomography.cpp

#include "hsteer/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hsteer/rng.hpp"

namespace hsteer {

namespace {

const std::array<std::string, 6> kLabels{"H", "V", "D", "A", "R", "L"};

Eigen::Vector2cd eigenstate_vector(std::size_t e) {
  const double r = std::sqrt(0.5);
  const std::complex<double> i{0.0, 1.0};
  switch (e) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {r, r};
    case 3: return {r, -r};
    case 4: return {r, i * r};
    case 5: return {r, -i * r};
    default: throw std::out_of_range("eigenstate index out of range");
  }
}

const std::array<Eigen::Matrix4cd, kTomographyProjectors>& projectors() {
  static const auto table = [] {
    std::array<Eigen::Matrix4cd, kTomographyProjectors> p;
    for (std::size_t a = 0; a < 6; ++a) {
      for (std::size_t b = 0; b < 6; ++b) {
        const Eigen::Vector2cd va = eigenstate_vector(a);
        const Eigen::Vector2cd vb = eigenstate_vector(b);
        Eigen::Vector4cd v;
        v << va[0] * vb[0], va[0] * vb[1], va[1] * vb[0], va[1] * vb[1];
        p[6 * a + b] = v * v.adjoint();
      }
    }
    return p;
  }();
  return table;
}

Eigen::Matrix4cd hermitize(const Eigen::Matrix4cd& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

BlochVector pauli_eigenstate_direction(std::size_t eigenstate) {
  static const std::array<BlochVector, 6> dirs{BlochVector{0, 0, 1}, BlochVector{0, 0, -1},
                                               BlochVector{1, 0, 0}, BlochVector{-1, 0, 0},
                                               BlochVector{0, 1, 0}, BlochVector{0, -1, 0}};
  return dirs.at(eigenstate);
}

const std::string& pauli_eigenstate_label(std::size_t eigenstate) { return kLabels.at(eigenstate); }

std::size_t pauli_eigenstate_index(const std::string& label) {
  auto it = std::find(kLabels.begin(), kLabels.end(), label);
  if (it == kLabels.end()) throw std::invalid_argument("unknown basis label '" + label + "'");
  return static_cast<std::size_t>(it - kLabels.begin());
}

// ---------------------------------------------------------------------------

TwoQubitDensityMatrix TwoQubitDensityMatrix::create(const Eigen::Matrix4cd& m, double tolerance) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - std::complex<double>(1.0)) > tolerance) {
    throw std::invalid_argument("density matrix trace differs from one");
  }
  TwoQubitDensityMatrix rho(hermitize(m));
  if (rho.min_eigenvalue() < -tolerance) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
  return rho;
}

TwoQubitDensityMatrix TwoQubitDensityMatrix::from_pure(const Eigen::Vector4cd& psi) {
  const Eigen::Vector4cd v = psi.normalized();
  return TwoQubitDensityMatrix(v * v.adjoint());
}

TwoQubitDensityMatrix TwoQubitDensityMatrix::maximally_mixed() {
  return TwoQubitDensityMatrix(Eigen::Matrix4cd::Identity() / 4.0);
}

double TwoQubitDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Eigen::Vector4cd singlet_vector() {
  const double r = std::sqrt(0.5);
  return Eigen::Vector4cd(0.0, r, -r, 0.0);
}

void TomographyCounts::validate() const {
  for (std::size_t i = 0; i < kTomographyProjectors; ++i) {
    if (counts[i] < 0) throw std::invalid_argument("counts must be non-negative");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("acquisition weights must be positive");
    }
  }
}

std::int64_t TomographyCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::array<double, kTomographyProjectors> projector_probabilities(const Eigen::Matrix4cd& rho) {
  std::array<double, kTomographyProjectors> p{};
  const auto& proj = projectors();
  for (std::size_t i = 0; i < kTomographyProjectors; ++i) {
    p[i] = std::max(0.0, (rho * proj[i]).trace().real());
  }
  return p;
}

std::array<double, kTomographyProjectors> expected_counts(
    const std::array<double, kTomographyProjectors>& probabilities, double mean_total,
    const std::array<double, kTomographyProjectors>& weights) {
  if (!(mean_total > 0.0)) throw std::invalid_argument("mean total must be positive");
  double norm = 0.0;
  for (std::size_t i = 0; i < kTomographyProjectors; ++i) norm += weights[i] * probabilities[i];
  if (!(norm > 0.0)) throw std::invalid_argument("all projector probabilities vanish");
  std::array<double, kTomographyProjectors> e{};
  for (std::size_t i = 0; i < kTomographyProjectors; ++i) {
    e[i] = mean_total * weights[i] * probabilities[i] / norm;
  }
  return e;
}

TomographyCounts synth_counts_from_expected(
    const std::array<double, kTomographyProjectors>& expected, std::uint64_t seed) {
  TomographyCounts out;
  std::mt19937_64 engine = make_engine(seed);
  for (std::size_t i = 0; i < kTomographyProjectors; ++i) {
    if (expected[i] > 0.0) {
      std::poisson_distribution<std::int64_t> draw(expected[i]);
      out.counts[i] = draw(engine);
    }
  }
  return out;
}

TomographyCounts synth_counts(const TwoQubitDensityMatrix& rho, double mean_total,
                              std::uint64_t seed) {
  const TomographyCounts defaults;
  return synth_counts_from_expected(
      expected_counts(projector_probabilities(rho.matrix()), mean_total, defaults.weights), seed);
}

// ---------------------------------------------------------------------------
// Maximum likelihood

double log_likelihood(const TomographyCounts& counts, const Eigen::Matrix4cd& rho) {
  const auto& proj = projectors();
  double total_rate = 0.0;
  double sum = 0.0;
  double n = 0.0;
  for (std::size_t i = 0; i < kTomographyProjectors; ++i) {
    const double p = (rho * proj[i]).trace().real();
    total_rate += counts.weights[i] * p;
    if (counts.counts[i] > 0) {
      if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
      sum += static_cast<double>(counts.counts[i]) * std::log(counts.weights[i] * p);
      n += static_cast<double>(counts.counts[i]);
    }
  }
  return sum - n * std::log(total_rate);
}

MleResult reconstruct_mle(const TomographyCounts& counts, const MleOptions& options) {
  counts.validate();
  const double n = static_cast<double>(counts.total());
  if (!(n > 0.0)) throw std::invalid_argument("tomography needs at least one nonzero count");

  const auto& proj = projectors();
  Eigen::Matrix4cd gram = Eigen::Matrix4cd::Zero();
  for (std::size_t i = 0; i < kTomographyProjectors; ++i) gram += counts.weights[i] * proj[i];

  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity() / 4.0;
  double ll = log_likelihood(counts, rho);
  double step = 1.0;
  MleResult result{TwoQubitDensityMatrix::maximally_mixed(), 0, false, ll, {}};
  if (options.record_trace) result.likelihood_trace.push_back(ll);

  const Eigen::Matrix4cd identity = Eigen::Matrix4cd::Identity();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Eigen::Matrix4cd grad = Eigen::Matrix4cd::Zero();
    double rate = 0.0;
    for (std::size_t i = 0; i < kTomographyProjectors; ++i) {
      const double p = (rho * proj[i]).trace().real();
      rate += counts.weights[i] * p;
      if (counts.counts[i] > 0) grad += (static_cast<double>(counts.counts[i]) / (n * p)) * proj[i];
    }
    grad -= gram / rate;
    grad = hermitize(grad);

    bool accepted = false;
    Eigen::Matrix4cd candidate;
    double candidate_ll = ll;
    for (int halving = 0; halving < 60; ++halving) {
      const Eigen::Matrix4cd a = identity + step * grad;
      candidate = hermitize(a * rho * a);
      candidate /= candidate.trace().real();
      candidate_ll = log_likelihood(counts, candidate);
      if (candidate_ll >= ll) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    const double change = std::abs(candidate_ll - ll) / std::max(1.0, std::abs(ll));
    rho = candidate;
    ll = candidate_ll;
    if (options.record_trace) result.likelihood_trace.push_back(ll);
    step = std::min(step * 1.5, 1e3);
    if (change < options.relative_tolerance) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.iterations = it;
  result.log_likelihood = ll;
  result.rho = TwoQubitDensityMatrix::create(rho, 1e-10);
  return result;
}

double fidelity(const Eigen::Matrix4cd& rho, const Eigen::Vector4cd& psi) {
  const Eigen::Vector4cd v = psi.normalized();
  return (v.adjoint() * rho * v)(0, 0).real();
}

double fidelity(const TwoQubitDensityMatrix& rho, const Eigen::Vector4cd& psi) {
  return fidelity(rho.matrix(), psi);
}

McUncertainty mc_uncertainty(const TomographyCounts& counts, int n_resamples, std::uint64_t seed,
                             const Eigen::Vector4cd& target, unsigned threads) {
  counts.validate();
  if (n_resamples < 2) throw std::invalid_argument("need at least two resamples");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  std::vector<double> fid(static_cast<std::size_t>(n_resamples));
  std::vector<char> converged(static_cast<std::size_t>(n_resamples), 1);
  auto worker = [&](unsigned lane) {
    for (std::size_t i = lane; i < fid.size(); i += threads) {
      std::array<double, kTomographyProjectors> mean{};
      for (std::size_t k = 0; k < kTomographyProjectors; ++k) {
        mean[k] = static_cast<double>(counts.counts[k]);
      }
      TomographyCounts resampled = synth_counts_from_expected(mean, derive_seed(seed, i));
      resampled.weights = counts.weights;
      if (resampled.total() == 0) resampled = counts;
      const MleResult r = reconstruct_mle(resampled);
      fid[i] = fidelity(r.rho, target);
      converged[i] = r.converged ? 1 : 0;
    }
  };
  std::vector<std::future<void>> jobs;
  for (unsigned lane = 0; lane < threads; ++lane) {
    jobs.push_back(std::async(std::launch::async, worker, lane));
  }
  for (auto& j : jobs) j.get();

  McUncertainty out;
  out.resamples = n_resamples;
  out.non_converged =
      static_cast<int>(std::count(converged.begin(), converged.end(), static_cast<char>(0)));
  const double m = std::accumulate(fid.begin(), fid.end(), 0.0) / static_cast<double>(fid.size());
  double var = 0.0;
  for (double f : fid) var += (f - m) * (f - m);
  out.mean_fidelity = m;
  out.sd_fidelity = std::sqrt(var / static_cast<double>(fid.size() - 1));
  return out;
}

// ---------------------------------------------------------------------------
// CSV

TomographyCounts read_counts_csv(std::istream& in) {
  TomographyCounts out;
  std::array<bool, kTomographyProjectors> seen{};
  std::string line;
  bool header = true;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line != "basis_a,basis_b,count") {
        throw std::invalid_argument("expected header 'basis_a,basis_b,count'");
      }
      continue;
    }
    ++row;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw std::invalid_argument("malformed counts row " + std::to_string(row));
    }
    const std::size_t idx = 6 * pauli_eigenstate_index(a) + pauli_eigenstate_index(b);
    if (seen[idx]) throw std::invalid_argument("duplicate projector pair " + a + "," + b);
    seen[idx] = true;
    std::size_t pos = 0;
    long long value = 0;
    try {
      value = std::stoll(c, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("count is not an integer in row " + std::to_string(row));
    }
    if (pos != c.size() || value < 0) {
      throw std::invalid_argument("count must be a non-negative integer in row " + std::to_string(row));
    }
    out.counts[idx] = value;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; })) {
    throw std::invalid_argument("counts CSV must list all 36 projector pairs");
  }
  return out;
}

void write_counts_csv(std::ostream& out, const TomographyCounts& counts) {
  out << "basis_a,basis_b,count\n";
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      out << kLabels[a] << ',' << kLabels[b] << ',' << counts.counts[6 * a + b] << '\n';
    }
  }
}

}  // namespace hsteer
