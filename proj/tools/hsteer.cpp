// hsteer: command-line front end.

#include <iostream>

#include "CLI11.hpp"
#include "hsteer/commands.hpp"

int main(int argc, char** argv) {
  using namespace hsteer;
  CLI::App app{"Heralded steering simulator"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  BoundsOptions bounds;
  auto* b = app.add_subcommand("bounds", "Loss-dependent steering bound C_n(eps) on a grid");
  b->add_option("--n", bounds.n, "Number of settings (2, 3, 4, 6, 10, 16)");
  b->add_option("--grid", bounds.grid, "Comma-separated eps values")->delimiter(',');
  b->add_option("--n-dense", bounds.n_dense, "Axes in the dense C_inf approximation");
  b->add_option("--out", bounds.out, "CSV output")->required();

  SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  auto* s = app.add_subcommand("simulate", "Sample trials and evaluate the steering test");
  s->add_option("--config", sim.config, "Experiment config (JSON)")->required();
  s->add_option("--trials", sim.trials, "Number of trials");
  auto* sim_seed_opt = s->add_option("--seed", sim_seed, "Overrides rng_seed in the config");
  s->add_option("--mode", sim.mode, "Trial conditioning: raw, heralded or threefold (herald and Bob click)");
  s->add_option("--out", sim.out, "JSON result path")->required();

  SweepOptions sweep;
  auto* w = app.add_subcommand("sweep", "Analytic eps and S_n along one parameter");
  w->add_option("--config", sweep.config, "Experiment config (JSON)")->required();
  w->add_option("--axis", sweep.axis, "loss_db or xi2")->required();
  w->add_option("--values", sweep.values, "Comma-separated axis values")->delimiter(',')->required();
  w->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");
  w->add_option("--out", sweep.out, "CSV output")->required();

  TomoOptions tomo;
  std::uint64_t tomo_seed = 0;
  auto* t = app.add_subcommand("tomo", "Maximum-likelihood state tomography");
  t->add_option("--counts", tomo.counts, "Counts CSV (basis_a,basis_b,count)");
  t->add_option("--config", tomo.config, "Synthesize counts from this experiment config");
  t->add_option("--state", tomo.state, "Synthesize counts from singlet | mixed | werner:<F>");
  t->add_option("--mean-total", tomo.mean_total, "Mean total counts when synthesizing");
  auto* tomo_seed_opt = t->add_option("--seed", tomo_seed, "Seed for synthesis and resampling");
  t->add_option("--resamples", tomo.resamples, "Monte Carlo resamples (0 to skip)");
  t->add_option("--max-iterations", tomo.max_iterations, "MLE iteration cap");
  t->add_option("--threads", tomo.threads, "Worker threads (0 = all cores)");
  t->add_option("--out", tomo.out, "JSON result path")->required();

  TimingOptions timing;
  auto* g = app.add_subcommand("timing", "Space-time ordering checks for a geometry file");
  g->add_option("--config", timing.geometry, "Geometry file (JSON)")->required();
  g->add_option("--out", timing.out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  if (*sim_seed_opt) sim.seed = sim_seed;
  if (*tomo_seed_opt) tomo.seed = tomo_seed;

  return run_guarded(
      [&] {
        if (*b) cmd_bounds(bounds, std::cout);
        if (*s) cmd_simulate(sim, std::cout);
        if (*w) cmd_sweep(sweep, std::cout);
        if (*t) cmd_tomo(tomo, std::cout);
        if (*g) cmd_timing(timing, std::cout);
        return kExitOk;
      },
      std::cerr);
}
