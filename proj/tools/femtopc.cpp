// Command-line driver for the two-tier power-control experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "femtopc/config.hpp"
#include "femtopc/experiments.hpp"
#include "femtopc/game.hpp"
#include "femtopc/units.hpp"

namespace fs = std::filesystem;
using namespace femtopc;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string out_dir = "out";
};

ExperimentConfig resolve(const GlobalOptions& opts) {
  ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{}
                                                  : load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  if (opts.threads) cfg.threads = *opts.threads;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::ofstream open_output(const GlobalOptions& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  const fs::path path = fs::path(opts.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  std::cerr << "writing " << path.string() << '\n';
  return os;
}

struct SingleRun {
  NetworkGeometry geom;
  GainMatrix gm;
  SinrTargets targets;
  GameParams params;
};

SingleRun single_run(const ExperimentConfig& cfg) {
  const int n = cfg.n_values.front();
  SingleRun run;
  run.geom = make_layout(cfg, n, cfg.placement, cfg.seed);
  run.gm = build_gain_matrix(run.geom, cfg.propagation);
  Rng rng(stream_seed(cfg.seed, 0));
  const SinrTargets drawn = sample_targets(cfg, n, rng);
  run.targets = {drawn.gamma_c, rescale_infeasible(drawn.gamma_f, run.gm.F()).gamma_f};
  const double sigma2 =
      calibrate_noise(cfg.propagation, cfg.layout_params.cell_radius, cfg.p_max);
  run.params = GameParams::uniform(n, cfg.protection_ab.a, cfg.protection_ab.b,
                                   cfg.p_max, sigma2);
  run.params.max_iter = cfg.game_max_iter;
  run.params.conv_tol = cfg.conv_tol;
  return run;
}

void cmd_contour(const GlobalOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  auto os = open_output(opts, "contours.csv");
  contour_experiment(cfg, os);
}

void cmd_linkbudget(const GlobalOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  auto curves = open_output(opts, "link_budget_curves.csv");
  link_budget_curves(cfg, curves);
  auto cdf = open_output(opts, "link_budget_cdf.csv");
  link_budget_cdf(cfg, cdf);
}

void cmd_adapt(const GlobalOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  const SingleRun run = single_run(cfg);
  {
    auto os = open_output(opts, "layout.csv");
    write_layout_csv(os, run.geom);
  }
  {
    auto os = open_output(opts, "gains.csv");
    write_gain_csv(os, run.gm);
  }
  auto trace = open_output(opts, "adapt_trace.csv");
  write_trace_header(trace);
  const GameState start = full_power_state(run.gm, run.params);
  write_trace_rows(trace, start);
  const EquilibriumResult eq = run_to_equilibrium(
      start, run.gm, equilibrium_targets(run.gm, run.targets, run.params), run.params,
      [&](const GameState& s) { write_trace_rows(trace, s); });
  const FeasibilityReport feas = is_feasible(run.targets, run.gm);
  std::cout << "rho(Gamma G) = " << feas.rho << (feas.feasible ? " (feasible)" : " (infeasible)")
            << "\nconverged = " << eq.converged << " after " << eq.iters << " updates"
            << "\ncellular SINR = " << linear_to_db(eq.state.sinr(0)) << " dB (target "
            << linear_to_db(run.targets.gamma_c) << " dB)\n";
}

void cmd_protect(const GlobalOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  const SingleRun run = single_run(cfg);
  const ProtectionOutcome out = run_protection(run.gm, run.targets, run.params, cfg.protection);
  auto os = open_output(opts, "protect_epochs.csv");
  write_epoch_trace_csv(os, out);
  std::cout << "protected = " << out.protected_ok << " after " << out.epochs << " cuts"
            << "\ncellular SINR = " << linear_to_db(out.final_state.sinr(0))
            << " dB (target " << linear_to_db(run.targets.gamma_c) << " dB)"
            << "\nmean femtocell SINR = " << out.metrics.mean_sinr_dB << " dB"
            << "\ndegraded = " << 100.0 * out.metrics.frac_degraded << " %"
            << "\nmean reduction = " << 100.0 * out.metrics.mean_reduction << " %\n";
}

void cmd_exp1(const GlobalOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  const ExperimentOneResult r = experiment_one(cfg);
  auto trials = open_output(opts, "exp1_trials.csv");
  write_csv(trials, r.rows);
  auto summary = open_output(opts, "exp1_summary.csv");
  write_csv(summary, r.summary);
}

void cmd_exp2(const GlobalOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  const ExperimentTwoResult r = experiment_two(cfg);
  auto trials = open_output(opts, "exp2_trials.csv");
  write_csv(trials, r.rows);
  auto summary = open_output(opts, "exp2_summary.csv");
  write_csv(summary, r.summary);
}

void cmd_table2(const GlobalOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  const TableTwoScenario scenario = table_two_scenario(cfg);
  const TableTwoResult result = run_table_two(scenario);
  {
    auto os = open_output(opts, "table2.csv");
    write_table_two_csv(os, scenario, result);
  }
  auto epochs = open_output(opts, "table2_epochs.csv");
  write_epoch_trace_csv(epochs, result.outcome);
  std::cout << "initial rho(Gamma G) = " << result.rho_initial
            << "\nepochs = " << result.outcome.epochs
            << "\nprotected = " << result.outcome.protected_ok
            << "\ncellular SINR = " << linear_to_db(result.outcome.final_state.sinr(0))
            << " dB\nfinal rho = " << result.rho_final << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink power control in two-tier macrocell/femtocell networks"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "INI experiment config")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", opts.seed, "master RNG seed");
  app.add_option("--trials", opts.trials, "Monte Carlo trials per group");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--threads", opts.threads, "worker threads");

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const GlobalOptions&);
  };
  const Command commands[] = {
      {"contour", "per-tier Pareto SINR contours", cmd_contour},
      {"linkbudget", "link budget curves and random-layout CDF", cmd_linkbudget},
      {"adapt", "single utility-adaptation run with per-iteration trace", cmd_adapt},
      {"protect", "single link-quality-protection run", cmd_protect},
      {"mc-exp1", "Monte Carlo: equilibrium femtocell SINR vs N and (a, b)", cmd_exp1},
      {"mc-exp2", "Monte Carlo: adaptation with cellular link protection", cmd_exp2},
      {"table2", "16-femtocell protection example", cmd_table2},
  };
  for (const auto& c : commands) {
    app.add_subcommand(c.name, c.help)->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) c.run(opts);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
