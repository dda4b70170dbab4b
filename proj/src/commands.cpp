// commands.cpp

#include "hsteer/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "hsteer/bounds.hpp"
#include "hsteer/circuit.hpp"
#include "hsteer/config.hpp"
#include "hsteer/rng.hpp"
#include "hsteer/sources.hpp"
#include "hsteer/spacetime.hpp"
#include "hsteer/steering.hpp"
#include "hsteer/tomography.hpp"

#ifndef HSTEER_VERSION
#define HSTEER_VERSION "0.0.0"
#endif

namespace hsteer {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

std::string manifest_name(const std::string& out) {
  return fs::path(manifest_path(out)).filename().string();
}

void require_out(const std::string& out) {
  if (out.empty()) throw ConfigError("--out is required");
}

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

void write_json(const std::string& path, const json& j) {
  auto f = open_output(path);
  f << j.dump(2) << "\n";
}

struct Manifest {
  std::string command;
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  double tail_weight = 0.0;
  std::vector<std::string> warnings;
  Clock::time_point start = Clock::now();

  void write(const std::string& out) const {
    json j;
    j["command"] = command;
    j["version"] = version_string();
    j["config"] = config;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    json files = json::array();
    for (const auto& o : outputs) files.push_back(fs::path(o).filename().string());
    j["outputs"] = files;
    j["truncation_tail_weight"] = tail_weight;
    j["warnings"] = warnings;
    j["wall_clock_s"] = std::chrono::duration<double>(Clock::now() - start).count();
    write_json(manifest_path(out), j);
  }
};

std::string stem_path(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

void note_tail(Manifest& m, double tail, double tolerance, std::ostream& log) {
  m.tail_weight = std::max(m.tail_weight, tail);
  if (tail > tolerance) {
    const std::string w = "truncation tail " + num(tail) + " exceeds tolerance " + num(tolerance);
    if (std::find(m.warnings.begin(), m.warnings.end(), w) == m.warnings.end()) m.warnings.push_back(w);
    log << "warning: " << w << "\n";
  }
}

json matrix_json(const Eigen::Matrix4cd& m) {
  json re = json::array(), im = json::array();
  for (int r = 0; r < 4; ++r) {
    json rr = json::array(), ii = json::array();
    for (int c = 0; c < 4; ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"real", re}, {"imag", im}, {"basis", {"HH", "HV", "VH", "VV"}}};
}

std::string optional_int(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

// Evaluates f(i) for i in [0, count) on up to `threads` workers; results keep index order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, unsigned threads, F f) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

std::string version_string() { return std::string("hsteer ") + HSTEER_VERSION; }

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 18; ++i) grid.push_back(0.10 + 0.05 * i);
  grid.back() = 1.0;
  return grid;
}

// ---------------------------------------------------------------------------

void cmd_bounds(const BoundsOptions& o, std::ostream& log) {
  require_out(o.out);
  Manifest m;
  m.command = "bounds";
  m.config = {{"n", o.n}, {"grid", o.grid}, {"n_dense", o.n_dense}};
  MeasurementSet settings = [&] {
    try {
      return platonic_settings(o.n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  if (o.grid.empty()) throw ConfigError("empty epsilon grid");
  for (double e : o.grid) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("grid values must lie in (0, 1]");
  }
  if (o.n_dense < 50) throw ConfigError("n_dense must be at least 50");

  const SteeringBoundCurve curve = loss_bound(settings);
  const SteeringBoundCurve dense = dense_settings_bound(o.n_dense);

  auto f = open_output(o.out);
  f << "# manifest=" << manifest_name(o.out) << "\n";
  f << "epsilon,c_n,c_inf_approx\n";
  for (double e : o.grid) f << num(e) << "," << num(curve(e)) << "," << num(dense(e)) << "\n";
  m.outputs.push_back(o.out);
  m.write(o.out);
  log << "C_" << o.n << " = " << num(deterministic_bound(settings)) << " (" << to_string(curve.method())
      << "); C_inf approx from " << o.n_dense << " axes (" << to_string(dense.method()) << ")\n";
}

void cmd_simulate(const SimulateOptions& o, std::ostream& log) {
  require_out(o.out);
  if (o.trials < 1) throw ConfigError("--trials must be at least 1");
  if (o.mode != "raw" && o.mode != "heralded" && o.mode != "threefold") {
    throw ConfigError("--mode must be raw, heralded or threefold");
  }
  const ExperimentConfig config = load_experiment_config(o.config);
  const std::uint64_t seed = o.seed.value_or(config.rng_seed);
  Manifest m;
  m.command = "simulate";
  m.config = to_json(config);
  m.seed = seed;

  const MeasurementSet settings = platonic_settings(config.settings_n);
  const SteeringBoundCurve curve = loss_bound(settings);
  const Experiment experiment(config);
  note_tail(m, experiment.tail_weight(), config.tail_tolerance, log);
  const AnalyticSummary analytic = analyze(experiment, settings);
  SamplingMode mode = SamplingMode::kThreefold;
  if (o.mode == "raw") {
    mode = SamplingMode::kRaw;
  } else if (o.mode == "heralded") {
    mode = SamplingMode::kHeralded;
  }
  const auto records = sample_trials(experiment, settings, o.trials, seed, mode);

  const std::string trials_path = stem_path(o.out, ".trials.csv");
  {
    auto f = open_output(trials_path);
    f << "# manifest=" << manifest_name(o.out) << "\n";
    f << "trial,setting,herald,alice_declared,alice_outcome,bob_outcome\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      f << i << "," << r.setting << "," << int(r.herald) << "," << int(r.alice_declared) << ","
        << optional_int(r.alice_outcome) << "," << optional_int(r.bob_outcome) << "\n";
    }
  }

  json j;
  j["manifest"] = manifest_name(o.out);
  j["sampling_mode"] = o.mode;
  j["trials"] = o.trials;
  j["settings_n"] = settings.size();
  j["analytic"] = {{"epsilon", analytic.epsilon},
                   {"steering", analytic.steering},
                   {"bound", curve(analytic.epsilon)},
                   {"herald_probability", analytic.herald_rate},
                   {"threefold_probability", analytic.threefold_rate},
                   {"fourfold_probability", analytic.fourfold_rate},
                   {"tail_weight", analytic.tail_weight}};
  try {
    const SteeringResult r = evaluate_steering(records, curve);
    j["steering"] = {{"value", r.s}, {"sigma", r.sigma_s}};
    j["epsilon"] = {{"value", r.epsilon}, {"sigma", r.sigma_epsilon}};
    j["heralded_threefolds"] = r.heralded_threefolds;
    j["heralded_fourfolds"] = r.heralded_fourfolds;
    j["bound"] = {{"value", r.significance.bound}, {"slope", r.significance.slope}};
    j["violation_sds"] = r.significance.sds;
    j["conservative_violation_sds"] = r.significance.conservative_sds;
    j["verdict"] = r.violation() ? "PASS" : "FAIL";
    log << "S_" << r.n << " = " << num(r.s) << " +- " << num(r.sigma_s) << ", eps = " << num(r.epsilon)
        << " +- " << num(r.sigma_epsilon) << ", C(eps) = " << num(r.significance.bound) << ", "
        << num(r.significance.sds) << " SDs: " << (r.violation() ? "PASS" : "FAIL") << "\n";
  } catch (const std::exception& e) {
    j["verdict"] = "INSUFFICIENT_DATA";
    j["error"] = e.what();
    m.warnings.push_back(e.what());
    log << "warning: " << e.what() << "\n";
  }
  write_json(o.out, j);
  m.outputs = {o.out, trials_path};
  m.write(o.out);
}

void cmd_sweep(const SweepOptions& o, std::ostream& log) {
  require_out(o.out);
  if (o.axis != "loss_db" && o.axis != "xi2") throw ConfigError("--axis must be loss_db or xi2");
  if (o.values.empty()) throw ConfigError("--values is empty");
  const ExperimentConfig base = load_experiment_config(o.config);
  const MeasurementSet settings = platonic_settings(base.settings_n);
  const SteeringBoundCurve curve = loss_bound(settings);

  std::vector<ExperimentConfig> points;
  for (double v : o.values) {
    ExperimentConfig c = base;
    (o.axis == "loss_db" ? c.channel_loss_db : c.source2.squeezing) = v;
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(o.axis + "=" + num(v) + ": " + e.what());
    }
    points.push_back(c);
  }

  const auto results = parallel_map<AnalyticSummary>(points.size(), o.threads, [&](std::size_t i) {
    return analyze(Experiment(points[i]), settings);
  });

  Manifest m;
  m.command = "sweep";
  m.config = {{"base", to_json(base)}, {"axis", o.axis}, {"values", o.values}};
  auto f = open_output(o.out);
  f << "# manifest=" << manifest_name(o.out) << "\n";
  f << o.axis << ",epsilon,s_n,c_n_at_epsilon,herald_probability,threefold_probability,"
    << "fourfold_probability,tail_weight\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    note_tail(m, r.tail_weight, base.tail_tolerance, log);
    f << num(o.values[i]) << "," << num(r.epsilon) << "," << num(r.steering) << ","
      << num(r.epsilon > 0.0 ? curve(std::min(r.epsilon, 1.0)) : 1.0) << "," << num(r.herald_rate)
      << "," << num(r.threefold_rate) << "," << num(r.fourfold_rate) << "," << num(r.tail_weight)
      << "\n";
  }
  m.outputs.push_back(o.out);
  m.write(o.out);
  log << "swept " << results.size() << " points along " << o.axis << "\n";
}

void cmd_tomo(const TomoOptions& o, std::ostream& log) {
  require_out(o.out);
  const int sources = int(!o.counts.empty()) + int(!o.config.empty()) + int(!o.state.empty());
  if (sources != 1) throw ConfigError("give exactly one of --counts, --config, --state");
  if (o.resamples != 0 && o.resamples < 100) throw ConfigError("--resamples must be 0 or >= 100");

  Manifest m;
  m.command = "tomo";
  const std::uint64_t seed = o.seed.value_or(1);
  m.seed = seed;
  TomographyCounts counts;
  std::string origin;

  if (!o.counts.empty()) {
    std::ifstream in(o.counts);
    if (!in) throw ConfigError("cannot open " + o.counts);
    try {
      counts = read_counts_csv(in);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(o.counts + ": " + e.what());
    }
    origin = "counts:" + fs::path(o.counts).filename().string();
    m.config = {{"counts", o.counts}};
  } else {
    if (!(o.mean_total > 0.0)) throw ConfigError("--mean-total must be positive");
    std::array<double, kTomographyProjectors> probabilities{};
    if (!o.config.empty()) {
      const ExperimentConfig config = load_experiment_config(o.config);
      if (!config.swap_enabled) throw ConfigError("tomography synthesis needs swap_enabled");
      const Experiment experiment(config);
      note_tail(m, experiment.tail_weight(), config.tail_tolerance, log);
      probabilities = experiment.tomography_probabilities();
      origin = "config:" + fs::path(o.config).filename().string();
      m.config = {{"experiment", to_json(config)}, {"mean_total", o.mean_total}};
    } else {
      Eigen::Matrix4cd rho;
      const Eigen::Vector4cd psi = singlet_vector();
      if (o.state == "singlet") {
        rho = psi * psi.adjoint();
      } else if (o.state == "mixed") {
        rho = Eigen::Matrix4cd::Identity() / 4.0;
      } else if (o.state.rfind("werner:", 0) == 0) {
        double f = 0.0;
        try {
          f = std::stod(o.state.substr(7));
        } catch (const std::exception&) {
          throw ConfigError("bad werner fidelity in '" + o.state + "'");
        }
        if (!(f >= 0.25 && f <= 1.0)) throw ConfigError("werner fidelity must lie in [0.25, 1]");
        const double p = werner_weight(f);
        rho = p * psi * psi.adjoint() + (1.0 - p) / 4.0 * Eigen::Matrix4cd::Identity();
      } else {
        throw ConfigError("--state must be singlet, mixed or werner:<F>");
      }
      probabilities = projector_probabilities(rho);
      origin = "state:" + o.state;
      m.config = {{"state", o.state}, {"mean_total", o.mean_total}};
    }
    counts = synth_counts_from_expected(expected_counts(probabilities, o.mean_total, counts.weights),
                                        derive_seed(seed, 0));
    const std::string counts_path = stem_path(o.out, ".counts.csv");
    auto f = open_output(counts_path);
    f << "# manifest=" << manifest_name(o.out) << "\n";
    write_counts_csv(f, counts);
    m.outputs.push_back(counts_path);
  }

  if (o.max_iterations < 1) throw ConfigError("--max-iterations must be positive");
  MleOptions mle_options;
  mle_options.max_iterations = o.max_iterations;
  const MleResult mle = reconstruct_mle(counts, mle_options);
  json j;
  j["manifest"] = manifest_name(o.out);
  j["source"] = origin;
  j["total_counts"] = counts.total();
  j["rho"] = matrix_json(mle.rho.matrix());
  j["fidelity_singlet"] = fidelity(mle.rho, singlet_vector());
  j["log_likelihood"] = mle.log_likelihood;
  j["iterations"] = mle.iterations;
  j["converged"] = mle.converged;
  if (o.resamples > 0) {
    const McUncertainty mc =
        mc_uncertainty(counts, o.resamples, derive_seed(seed, 1), singlet_vector(), o.threads);
    j["monte_carlo"] = {{"mean_fidelity", mc.mean_fidelity},
                        {"sd_fidelity", mc.sd_fidelity},
                        {"resamples", mc.resamples},
                        {"non_converged", mc.non_converged}};
    log << "F = " << num(fidelity(mle.rho, singlet_vector())) << " +- " << num(mc.sd_fidelity) << "\n";
  } else {
    log << "F = " << num(fidelity(mle.rho, singlet_vector())) << "\n";
  }
  write_json(o.out, j);
  m.outputs.insert(m.outputs.begin(), o.out);
  if (!mle.converged) m.warnings.push_back("MLE did not converge");
  m.write(o.out);
  if (!mle.converged) throw ConvergenceError("MLE did not converge after " + std::to_string(mle.iterations) + " iterations");
}

bool cmd_timing(const TimingOptions& o, std::ostream& log) {
  const SpacetimeGeometry g = load_geometry(o.geometry);
  const TimingReport report = check_spacetime_ordering(g);
  for (const auto& c : report.constraints) {
    char line[160];
    std::snprintf(line, sizeof line, "%-22s %s  margin %.3f ns\n", c.name.c_str(),
                  c.pass() ? "PASS" : "FAIL", c.margin_ns);
    log << line;
  }
  log << (report.all_pass() ? "all constraints satisfied\n" : "causal ordering violated\n");
  if (!o.out.empty()) {
    Manifest m;
    m.command = "timing";
    m.config = to_json(g);
    json cs = json::array();
    for (const auto& c : report.constraints) {
      cs.push_back({{"name", c.name}, {"description", c.description}, {"margin_ns", c.margin_ns},
                    {"pass", c.pass()}});
    }
    write_json(o.out, {{"manifest", manifest_name(o.out)}, {"constraints", cs}, {"all_pass", report.all_pass()}});
    m.outputs.push_back(o.out);
    m.write(o.out);
  }
  return report.all_pass();
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace hsteer
