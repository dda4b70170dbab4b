// commands.hpp
// Batch commands behind the hsteer executable. Each command writes its data
// files plus <out>.manifest.json and returns a process exit code.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsteer {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNonConvergence = 3;

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string version_string();

/// 0.10, 0.15, ..., 1.00.
std::vector<double> default_epsilon_grid();

struct BoundsOptions {
  int n = 6;
  std::vector<double> grid = default_epsilon_grid();
  int n_dense = 100;
  std::string out;
};

struct SimulateOptions {
  std::string config;
  std::size_t trials = 100000;
  std::optional<std::uint64_t> seed;
  std::string mode = "threefold";  // raw | heralded | threefold
  std::string out;   // JSON result; trial records go to <stem>.trials.csv
};

struct SweepOptions {
  std::string config;
  std::string axis;  // loss_db | xi2
  std::vector<double> values;
  unsigned threads = 0;
  std::string out;
};

struct TomoOptions {
  std::string counts;  // measured counts CSV
  std::string config;  // synthesize from the heralded experiment
  std::string state;   // synthesize from singlet | mixed | werner:<F>
  double mean_total = 1e5;
  std::optional<std::uint64_t> seed;
  int resamples = 500;
  int max_iterations = 10000;
  unsigned threads = 0;
  std::string out;
};

struct TimingOptions {
  std::string geometry;
  std::string out;
};

// Each command throws ConfigError, ConvergenceError or std::exception.
void cmd_bounds(const BoundsOptions& options, std::ostream& log);
void cmd_simulate(const SimulateOptions& options, std::ostream& log);
void cmd_sweep(const SweepOptions& options, std::ostream& log);
void cmd_tomo(const TomoOptions& options, std::ostream& log);
/// Returns true when every constraint passes.
bool cmd_timing(const TimingOptions& options, std::ostream& log);

/// Runs `body`, mapping exceptions to exit codes and messages on `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace hsteer
