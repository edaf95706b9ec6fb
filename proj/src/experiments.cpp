#include "femtopc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "femtopc/game.hpp"
#include "femtopc/units.hpp"

namespace femtopc {

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(gamma_c_min_dB <= gamma_c_max_dB, "gamma_c_min_dB > gamma_c_max_dB");
  require(gamma_f_min_dB <= gamma_f_max_dB, "gamma_f_min_dB > gamma_f_max_dB");
  require(trials >= 1, "trials must be >= 1");
  require(threads >= 1, "threads must be >= 1");
  require(p_max > 0.0, "p_max must be > 0");
  require(!n_values.empty(), "n_femto list is empty");
  for (const int n : n_values) {
    require(n >= 1, "n_femto entries must be >= 1");
    const int side = static_cast<int>(std::lround(std::sqrt(n)));
    require(layout != LayoutKind::Grid || side * side == n,
            "grid layouts need perfect-square n_femto");
  }
  for (const auto& ab : ab_pairs) require(ab.a > 0.0 && ab.b > 0.0, "a, b must be > 0");
  require(protection_ab.a > 0.0 && protection_ab.b > 0.0, "a, b must be > 0");
  require(protection.t_dB > 0.0, "t_dB must be > 0");
  require(protection.delta_y_dB > 0.0, "delta_y_dB must be > 0");
  require(protection.epsilon >= 0.0 && protection.epsilon <= 1.0,
          "epsilon must lie in [0, 1]");
  require(protection.M >= 1, "M must be >= 1");
  require(game_max_iter >= 1, "game max_iter must be >= 1");
  require(propagation.alpha_c > 0.0 && propagation.alpha_fo > 0.0 &&
              propagation.beta > 0.0,
          "path-loss exponents must be > 0");
  require(contour_points >= 1 && cdf_layouts >= 1, "point counts must be >= 1");
}

double calibrate_noise(const PropagationParams& params, double cell_radius,
                       double p_max) {
  const double g_edge = db_to_linear(-params.K_c_dB) *
                        std::min(std::pow(cell_radius, -params.alpha_c), 1.0);
  return p_max * g_edge / 100.0;
}

SinrTargets sample_targets(const ExperimentConfig& cfg, Eigen::Index n_femto, Rng& rng) {
  SinrTargets t;
  t.gamma_c = db_to_linear(uniform(rng, cfg.gamma_c_min_dB, cfg.gamma_c_max_dB));
  t.gamma_f.resize(n_femto);
  for (Eigen::Index i = 0; i < n_femto; ++i) {
    t.gamma_f(i) = db_to_linear(uniform(rng, cfg.gamma_f_min_dB, cfg.gamma_f_max_dB));
  }
  return t;
}

RescaleResult rescale_infeasible(const Eigen::VectorXd& gamma_f,
                                 const Eigen::MatrixXd& F) {
  RescaleResult r;
  r.rho_before = spectral_radius(gamma_f.asDiagonal() * F).rho;
  r.gamma_f = gamma_f;
  if (r.rho_before >= 1.0) {
    r.gamma_f /= r.rho_before * (1.0 + 1e-3);
    r.scaled = true;
  }
  return r;
}

double cellular_target_rule(const GainMatrix& gm, const Eigen::VectorXd& gamma_f,
                            double kappa, double delta_c_dB, double gamma_c_min) {
  const double best = max_cellular_sinr(gamma_f, gm, kappa);
  return std::max(gamma_c_min, best / db_to_linear(delta_c_dB));
}

NetworkGeometry make_layout(const ExperimentConfig& cfg, int n_femto,
                            const Placement& where, std::uint64_t layout_seed) {
  if (cfg.layout == LayoutKind::Grid) {
    return make_grid_layout(n_femto, where.d_norm, where.df_norm, cfg.layout_params);
  }
  return make_random_layout(n_femto, where.df_norm, where.d_norm, layout_seed,
                            cfg.layout_params);
}

namespace {

/// Runs fn(k) for k in [0, count) on `threads` workers. Results must be
/// written to per-index slots; the first exception is rethrown.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

double mean_db(const Eigen::VectorXd& v) { return linear_to_db(v.array()).mean(); }

std::uint64_t group_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t a,
                         std::uint64_t b = 0) {
  return stream_seed(stream_seed(stream_seed(master, tag), a), b);
}

void finish_summary(GroupSummary& s) {
  if (s.trials == 0) return;
  s.mean_target_dB /= s.trials;
  s.mean_sinr_dB /= s.trials;
  s.frac_degraded /= s.trials;
  s.mean_reduction /= s.trials;
  s.protected_frac /= s.trials;
  s.improvement = (s.mean_sinr_dB - s.mean_target_dB) / s.mean_target_dB;
}

constexpr std::uint64_t kTagExpOne = 1;
constexpr std::uint64_t kTagExpTwo = 2;
constexpr std::uint64_t kTagLayout = 3;
constexpr std::uint64_t kTagCdf = 4;

}  // namespace

ExperimentOneResult experiment_one(const ExperimentConfig& cfg) {
  cfg.validate();
  const double sigma2 =
      calibrate_noise(cfg.propagation, cfg.layout_params.cell_radius, cfg.p_max);
  const double gamma_c_min = db_to_linear(cfg.gamma_c_min_dB);
  const int pairs = static_cast<int>(cfg.ab_pairs.size());

  ExperimentOneResult result;
  for (const int n : cfg.n_values) {
    const std::uint64_t layout_seed = group_seed(cfg.seed, kTagLayout, n);
    const NetworkGeometry geom = make_layout(cfg, n, cfg.placement, layout_seed);
    const GainMatrix gm = build_gain_matrix(geom, cfg.propagation);
    const Eigen::MatrixXd F = gm.F();
    const KappaRule kappa_rule;

    std::vector<AdaptationRow> rows(static_cast<std::size_t>(pairs * cfg.trials));
    parallel_for(cfg.trials, cfg.threads, [&](int trial) {
      const std::uint64_t seed = group_seed(cfg.seed, kTagExpOne, n, trial);
      Rng rng(seed);
      const SinrTargets drawn = sample_targets(cfg, n, rng);
      const RescaleResult rescaled = rescale_infeasible(drawn.gamma_f, F);
      const double rho_femto = spectral_radius(rescaled.gamma_f.asDiagonal() * F).rho;
      const double kappa = kappa_rule(rho_femto);

      SinrTargets targets;
      targets.gamma_f = rescaled.gamma_f;
      targets.gamma_c = cellular_target_rule(gm, targets.gamma_f, kappa,
                                             cfg.delta_c_dB, gamma_c_min);
      const FeasibilityReport feas = is_feasible(targets, gm);

      for (int k = 0; k < pairs; ++k) {
        GameParams params = GameParams::uniform(n, cfg.ab_pairs[k].a,
                                                cfg.ab_pairs[k].b, cfg.p_max, sigma2);
        params.max_iter = cfg.game_max_iter;
        params.conv_tol = cfg.conv_tol;
        const EquilibriumResult eq = run_to_equilibrium(gm, targets, params);

        AdaptationRow& row = rows[static_cast<std::size_t>(k * cfg.trials + trial)];
        row.n_femto = n;
        row.a = cfg.ab_pairs[k].a;
        row.b = cfg.ab_pairs[k].b;
        row.trial = trial;
        row.seed = seed;
        row.rho_initial = feas.rho;
        row.feasible = feas.feasible;
        row.rescaled = rescaled.scaled;
        row.kappa = kappa;
        row.gamma0_target_dB = linear_to_db(targets.gamma_c);
        row.gamma0_dB = linear_to_db(eq.state.sinr(0));
        row.mean_target_dB = mean_db(targets.gamma_f);
        row.mean_raw_target_dB = mean_db(drawn.gamma_f);
        row.mean_sinr_dB = mean_db(eq.state.sinr.tail(n));
        row.converged = eq.converged;
        row.iters = eq.iters;
      }
    });

    for (int k = 0; k < pairs; ++k) {
      GroupSummary s;
      std::ostringstream name;
      name << "n=" << n << ";a=" << cfg.ab_pairs[k].a << ";b=" << cfg.ab_pairs[k].b;
      s.group = name.str();
      s.protected_frac = 0.0;
      for (int t = 0; t < cfg.trials; ++t) {
        const AdaptationRow& row = rows[static_cast<std::size_t>(k * cfg.trials + t)];
        ++s.trials;
        s.mean_target_dB += row.mean_target_dB;
        s.mean_sinr_dB += row.mean_sinr_dB;
        s.protected_frac += row.gamma0_dB >= row.gamma0_target_dB - 1e-9 ? 1.0 : 0.0;
      }
      finish_summary(s);
      result.summary.push_back(s);
    }
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  return result;
}

ExperimentTwoResult experiment_two(const ExperimentConfig& cfg) {
  cfg.validate();
  const double sigma2 =
      calibrate_noise(cfg.propagation, cfg.layout_params.cell_radius, cfg.p_max);

  ExperimentTwoResult result;
  for (std::size_t pi = 0; pi < cfg.placements.size(); ++pi) {
    const Placement where = cfg.placements[pi];
    for (const int n : cfg.n_values) {
      const std::uint64_t layout_seed = group_seed(cfg.seed, kTagLayout, n, pi + 1);
      const NetworkGeometry geom = make_layout(cfg, n, where, layout_seed);
      const GainMatrix gm = build_gain_matrix(geom, cfg.propagation);
      const Eigen::MatrixXd F = gm.F();
      GameParams params = GameParams::uniform(n, cfg.protection_ab.a,
                                              cfg.protection_ab.b, cfg.p_max, sigma2);
      params.max_iter = cfg.game_max_iter;
      params.conv_tol = cfg.conv_tol;

      std::vector<ProtectionRow> rows(static_cast<std::size_t>(cfg.trials));
      parallel_for(cfg.trials, cfg.threads, [&](int trial) {
        const std::uint64_t seed = group_seed(cfg.seed, kTagExpTwo, n, trial);
        Rng rng(seed);
        const SinrTargets drawn = sample_targets(cfg, n, rng);
        const RescaleResult rescaled = rescale_infeasible(drawn.gamma_f, F);
        SinrTargets targets{drawn.gamma_c, rescaled.gamma_f};
        const FeasibilityReport feas = is_feasible(targets, gm);
        const ProtectionOutcome out = run_protection(gm, targets, params, cfg.protection);

        ProtectionRow& row = rows[static_cast<std::size_t>(trial)];
        row.d_norm = where.d_norm;
        row.df_norm = where.df_norm;
        row.n_femto = n;
        row.trial = trial;
        row.seed = seed;
        row.rho_initial = feas.rho;
        row.feasible = feas.feasible;
        row.rescaled = rescaled.scaled;
        row.gamma0_target_dB = linear_to_db(targets.gamma_c);
        row.gamma0_dB = linear_to_db(out.final_state.sinr(0));
        row.protected_ok = out.protected_ok;
        row.epochs = out.epochs;
        row.mean_target_dB = mean_db(targets.gamma_f);
        row.mean_sinr_dB = out.metrics.mean_sinr_dB;
        row.frac_degraded = out.metrics.frac_degraded;
        row.mean_reduction = out.metrics.mean_reduction;
      });

      GroupSummary s;
      std::ostringstream name;
      name << "D=" << where.d_norm << ";Df=" << where.df_norm << ";n=" << n;
      s.group = name.str();
      s.protected_frac = 0.0;
      for (const auto& row : rows) {
        ++s.trials;
        s.mean_target_dB += row.mean_target_dB;
        s.mean_sinr_dB += row.mean_sinr_dB;
        s.frac_degraded += row.frac_degraded;
        s.mean_reduction += row.mean_reduction;
        s.protected_frac += row.protected_ok ? 1.0 : 0.0;
      }
      finish_summary(s);
      result.summary.push_back(s);
      result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
  }
  return result;
}

namespace {

struct CsvPrecision {
  explicit CsvPrecision(std::ostream& os) : os_(os), old_(os.precision(10)) {}
  ~CsvPrecision() { os_.precision(old_); }
  std::ostream& os_;
  std::streamsize old_;
};

}  // namespace

void write_csv(std::ostream& os, const std::vector<AdaptationRow>& rows) {
  CsvPrecision guard(os);
  os << "# schema: exp1_trials v1\n";
  os << "n_femto,a,b,trial,seed,rho_initial,feasible,rescaled,kappa,"
        "gamma0_target_dB,gamma0_dB,mean_target_dB,mean_raw_target_dB,"
        "mean_sinr_dB,converged,iters\n";
  for (const auto& r : rows) {
    os << r.n_femto << ',' << r.a << ',' << r.b << ',' << r.trial << ',' << r.seed
       << ',' << r.rho_initial << ',' << r.feasible << ',' << r.rescaled << ','
       << r.kappa << ',' << r.gamma0_target_dB << ',' << r.gamma0_dB << ','
       << r.mean_target_dB << ',' << r.mean_raw_target_dB << ',' << r.mean_sinr_dB
       << ',' << r.converged << ',' << r.iters << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<ProtectionRow>& rows) {
  CsvPrecision guard(os);
  os << "# schema: exp2_trials v1\n";
  os << "d_norm,df_norm,n_femto,trial,seed,rho_initial,feasible,rescaled,"
        "gamma0_target_dB,gamma0_dB,protected,epochs,mean_target_dB,"
        "mean_sinr_dB,frac_degraded,mean_reduction_pct\n";
  for (const auto& r : rows) {
    os << r.d_norm << ',' << r.df_norm << ',' << r.n_femto << ',' << r.trial << ','
       << r.seed << ',' << r.rho_initial << ',' << r.feasible << ',' << r.rescaled
       << ',' << r.gamma0_target_dB << ',' << r.gamma0_dB << ',' << r.protected_ok
       << ',' << r.epochs << ',' << r.mean_target_dB << ',' << r.mean_sinr_dB << ','
       << r.frac_degraded << ',' << 100.0 * r.mean_reduction << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<GroupSummary>& summary) {
  CsvPrecision guard(os);
  os << "# schema: summary v1\n";
  os << "group,trials,mean_target_dB,mean_sinr_dB,improvement_pct,"
        "frac_degraded,mean_reduction_pct,protected_frac\n";
  for (const auto& s : summary) {
    os << s.group << ',' << s.trials << ',' << s.mean_target_dB << ','
       << s.mean_sinr_dB << ',' << 100.0 * s.improvement << ',' << s.frac_degraded
       << ',' << 100.0 * s.mean_reduction << ',' << s.protected_frac << '\n';
  }
}

void contour_experiment(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  CsvPrecision guard(os);
  os << "# schema: contours v1\n";
  os << "d_norm,df_norm,gamma_f_dB,gamma_c_dB,kappa,bound_dB\n";
  for (std::size_t pi = 0; pi < cfg.placements.size(); ++pi) {
    const Placement where = cfg.placements[pi];
    const NetworkGeometry geom =
        make_layout(cfg, cfg.contour_n_femto, where,
                    group_seed(cfg.seed, kTagLayout, cfg.contour_n_femto, pi + 1));
    const GainMatrix gm = build_gain_matrix(geom, cfg.propagation);
    const auto grid =
        default_contour_grid(gm, db_to_linear(cfg.gamma_f_min_dB - 20.0),
                             db_to_linear(cfg.gamma_f_max_dB + 20.0), cfg.contour_points);
    const ParetoContour contour = pareto_contour(grid, gm);
    for (const auto& pt : contour.points) {
      os << where.d_norm << ',' << where.df_norm << ',' << linear_to_db(pt.gamma_f)
         << ',' << linear_to_db(pt.gamma_c) << ',' << pt.kappa << ','
         << linear_to_db(pt.bound) << '\n';
    }
  }
}

void link_budget_curves(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  CsvPrecision guard(os);
  os << "# schema: link_budget_curves v1\n";
  os << "n_femto,alpha,d_norm,L_dB\n";
  for (const int n : cfg.n_values) {
    for (const double alpha : cfg.alphas) {
      const PropagationParams prop = cfg.propagation.with_outdoor_exponent(alpha);
      for (int k = 1; k <= 19; ++k) {
        const double d = 0.05 * k;
        const NetworkGeometry geom = make_grid_layout(n, d, d, cfg.layout_params);
        os << n << ',' << alpha << ',' << d << ','
           << link_budget(build_gain_matrix(geom, prop)).dB << '\n';
      }
    }
  }
}

void link_budget_cdf(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  CsvPrecision guard(os);
  os << "# schema: link_budget_cdf v1\n";
  os << "n_femto,d_norm,df_norm,L_dB,cdf\n";
  for (const int n : cfg.n_values) {
    for (std::size_t pi = 0; pi < cfg.placements.size(); ++pi) {
      const Placement where = cfg.placements[pi];
      std::vector<double> values(static_cast<std::size_t>(cfg.cdf_layouts));
      parallel_for(cfg.cdf_layouts, cfg.threads, [&](int k) {
        const auto seed = group_seed(cfg.seed, kTagCdf, n * 1000 + pi, k);
        const NetworkGeometry geom =
            make_random_layout(n, where.df_norm, where.d_norm, seed, cfg.layout_params);
        values[static_cast<std::size_t>(k)] =
            link_budget(build_gain_matrix(geom, cfg.propagation)).dB;
      });
      std::sort(values.begin(), values.end());
      for (std::size_t k = 0; k < values.size(); ++k) {
        os << n << ',' << where.d_norm << ',' << where.df_norm << ',' << values[k]
           << ',' << static_cast<double>(k + 1) / values.size() << '\n';
      }
    }
  }
}

TableTwoScenario table_two_scenario(const ExperimentConfig& cfg) {
  static const double kTargetsDb[] = {25.3945, 27.8943, 22.6351, 27.1217, 14.0872,
                                      14.4560, 28.3470, 25.7148, 17.9488, 8.4026,
                                      28.3375, 12.3944, 8.6965,  19.4412, 20.3513,
                                      26.7008};
  constexpr double kCellularTargetDb = 21.0034;

  TableTwoScenario s;
  s.geometry = make_grid_layout(16, 0.1, 0.1, cfg.layout_params);
  s.gains = build_gain_matrix(s.geometry, cfg.propagation);
  s.targets = SinrTargets::from_db(kCellularTargetDb,
                                   Eigen::Map<const Eigen::VectorXd>(kTargetsDb, 16));
  const double sigma2 =
      calibrate_noise(cfg.propagation, cfg.layout_params.cell_radius, cfg.p_max);
  s.game = GameParams::uniform(16, 1.0, 1.0, cfg.p_max, sigma2);
  s.protection = cfg.protection;
  return s;
}

TableTwoResult run_table_two(const TableTwoScenario& scenario) {
  TableTwoResult r;
  r.rho_initial = is_feasible(scenario.targets, scenario.gains).rho;
  r.outcome = run_protection(scenario.gains, scenario.targets, scenario.game,
                             scenario.protection);
  Eigen::VectorXd effective(scenario.gains.size());
  effective << r.outcome.final_state.sinr(0), r.outcome.working_targets;
  r.rho_final = is_feasible(effective, scenario.gains).rho;
  return r;
}

void write_table_two_csv(std::ostream& os, const TableTwoScenario& scenario,
                         const TableTwoResult& result) {
  CsvPrecision guard(os);
  const double rc = scenario.geometry.cell_radius;
  const Eigen::VectorXd targets = scenario.targets.diagonal();
  os << "# schema: table2 v1; rho_initial=" << result.rho_initial
     << "; rho_final=" << result.rho_final << "; epochs=" << result.outcome.epochs
     << "; protected=" << result.outcome.protected_ok << '\n';
  os << "epoch,user,d0i_norm,target_dB,working_dB,p_dBm\n";
  for (const auto& rec : result.outcome.trace) {
    for (Eigen::Index i = 0; i < scenario.gains.size(); ++i) {
      const double d0i =
          i == 0 ? distance(scenario.geometry.macro_bs, scenario.geometry.cellular_user)
                 : distance(scenario.geometry.macro_bs, scenario.geometry.base_station(i));
      const double working =
          i == 0 ? rec.state.sinr(0) : rec.working_targets(i - 1);
      os << rec.epoch << ',' << i << ',' << d0i / rc << ',' << linear_to_db(targets(i))
         << ',' << linear_to_db(working) << ',' << watts_to_dbm(rec.state.p(i)) << '\n';
    }
  }
}

}  // namespace femtopc
