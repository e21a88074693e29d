// Command-line front end: one subcommand per experiment.
//
//   lenski_cli fixation --N 2000 --rho 0.1 --replicates 20000 --out runs/fix
//   lenski_cli evolve --config evolve.ini --seed 7
//   lenski_cli compare runs/fix-a runs/fix-b --out runs/cmp
//
// Settings come from a flat key=value file (--config) and are overridden by
// flags given on the command line. Exit status: 0 success, 1 runtime fault,
// 2 invalid configuration.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>

#include "lenski/params.hpp"
#include "lenski/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Serial-dilution evolution simulator"};
  app.set_config("--config", "", "Flat key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  lenski::RunConfig cfg;
  auto& p = cfg.params;
  double b = -1.0, a = -1.0;

  app.add_option("--seed", cfg.master_seed, "Master seed");
  app.add_option("--replicates", cfg.replicates, "Number of replicates");
  app.add_option("--out", cfg.output_dir, "Output directory");
  app.add_option("--threads", cfg.threads, "Worker threads (0: LENSKI_THREADS or all cores)");
  app.add_option("--tolerance-profile,--tolerance_profile", cfg.tolerance_profile, "default, strict or loose");
  app.add_option("--N", p.N, "Population size at dawn");
  app.add_option("--gamma", p.gamma, "Daily growth factor");
  app.add_option("--r0", p.r0, "Ancestral reproduction rate");
  app.add_option("--rho", p.rho, "Selective advantage per mutation");
  app.add_option("--mu", p.mu, "Per-day mutation probability");
  app.add_option("--b", b, "Selection scaling: rho = N^-b");
  app.add_option("--a", a, "Mutation scaling: mu = N^-a");
  app.add_option("--q", p.q, "Epistasis exponent");
  app.add_option("--u", p.u, "Fitness measurement time (0: ln(gamma)/r0)");
  app.add_option("--k0", cfg.k0, "Mutants at dawn of day 0");
  app.add_option("--epsilon", cfg.epsilon, "Sweep stage threshold");
  app.add_option("--alpha", cfg.alpha, "Thinning offset exponent for the GW laws");
  app.add_option("--horizon-days,--horizon_days", cfg.horizon_days, "Days to simulate (0: 2 rho^-2 mu^-1)");
  app.add_option("--record-every,--record_every", cfg.record_every, "Recording cadence in days");
  app.add_option("--lineages", cfg.lineages, "Sampled lineages for genealogy runs");
  app.add_option("--t-max,--t_max", cfg.t_max, "Curve end time");
  app.add_option("--t-step,--t_step", cfg.t_step, "Curve time step");
  app.add_option("--curve", cfg.curve, "auto, fitness, epistatic or logistic");
  app.add_flag("--hitting-rule,--hitting_rule", cfg.hitting_rule, "End days when the population reaches gamma*N");
  app.add_flag("--assumption-a,--assumption_a", cfg.assumption_a, "Require a > 3b");

  for (const auto& name : lenski::experiment_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    if (name == "compare") sub->add_option("runs", cfg.compare_dirs, "Completed run directories")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (b >= 0.0) {
      p.b = b;
      p.rho = std::pow(static_cast<double>(p.N), -b);
    }
    if (a >= 0.0) {
      p.a = a;
      p.mu = std::pow(static_cast<double>(p.N), -a);
    }
    lenski::run(cfg, std::cout);
  } catch (const lenski::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
