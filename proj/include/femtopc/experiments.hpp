#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "femtopc/channel.hpp"
#include "femtopc/feasibility.hpp"
#include "femtopc/geometry.hpp"
#include "femtopc/pareto.hpp"
#include "femtopc/protection.hpp"
#include "femtopc/random.hpp"

namespace femtopc {

enum class LayoutKind { Grid, Random };

/// Normalized (fractions of R_c) cellular-user and femtocell-cluster distances.
struct Placement {
  double d_norm = 0.9;
  double df_norm = 0.9;
};

struct CoefficientPair {
  double a = 1.0;
  double b = 1.0;
};

/// Everything an experiment run needs. Defaults follow the reference system
/// parameters (R_c = 1 km, R_f = 30 m, 500 m grid, 2 GHz, 1 W, ...).
struct ExperimentConfig {
  LayoutKind layout = LayoutKind::Grid;
  LayoutParams layout_params;
  PropagationParams propagation;
  double p_max = 1.0;

  std::vector<int> n_values{4, 16, 64};
  Placement placement;                       ///< experiment 1 and single runs
  std::vector<Placement> placements{{0.1, 0.1}, {0.1, 0.5}, {0.9, 0.9}};

  double gamma_c_min_dB = 3.0;
  double gamma_c_max_dB = 10.0;
  double gamma_f_min_dB = 5.0;
  double gamma_f_max_dB = 25.0;
  double delta_c_dB = 5.0;

  std::vector<CoefficientPair> ab_pairs{{0.1, 1.0}, {1.0, 1.0}, {10.0, 1.0}, {1e3, 1.0}};
  CoefficientPair protection_ab{1.0, 1.0};
  int game_max_iter = 5000;
  double conv_tol = 1e-9;
  ProtectionConfig protection;

  std::vector<double> alphas{3.5, 4.0};
  int contour_points = 200;
  int contour_n_femto = 16;
  int cdf_layouts = 1000;

  int trials = 5000;
  std::uint64_t seed = 1;
  int threads = 1;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Noise power giving a cell-edge user (distance R_c) a 20 dB SNR at p_max.
double calibrate_noise(const PropagationParams& params, double cell_radius,
                       double p_max);

/// Femtocell targets i.i.d. uniform in [gamma_f_min, gamma_f_max] dB and a
/// cellular target uniform in [gamma_c_min, gamma_c_max] dB. The cellular
/// target is drawn first.
SinrTargets sample_targets(const ExperimentConfig& cfg, Eigen::Index n_femto, Rng& rng);

struct RescaleResult {
  Eigen::VectorXd gamma_f;
  double rho_before = 0.0;
  bool scaled = false;
};

/// Divides every femtocell target by rho(Gamma_f F)(1 + 1e-3) when
/// rho(Gamma_f F) >= 1, otherwise returns them unchanged.
RescaleResult rescale_infeasible(const Eigen::VectorXd& gamma_f,
                                 const Eigen::MatrixXd& F);

/// max{Gamma_c_min, max_cellular_sinr(Gamma_f, kappa) / Delta_c} (linear).
double cellular_target_rule(const GainMatrix& gm, const Eigen::VectorXd& gamma_f,
                            double kappa, double delta_c_dB, double gamma_c_min);

NetworkGeometry make_layout(const ExperimentConfig& cfg, int n_femto,
                            const Placement& where, std::uint64_t layout_seed);

/// One experiment-1 trial (adaptation without protection).
struct AdaptationRow {
  int n_femto = 0;
  double a = 0.0, b = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double rho_initial = 0.0;  ///< rho(Gamma G) at the targets actually used
  bool feasible = false;
  bool rescaled = false;
  double kappa = 0.0;
  double gamma0_target_dB = 0.0;
  double gamma0_dB = 0.0;
  double mean_target_dB = 0.0;      ///< femtocell minimum targets in force
  double mean_raw_target_dB = 0.0;  ///< as drawn, before rescaling
  double mean_sinr_dB = 0.0;
  bool converged = false;
  int iters = 0;
};

/// One experiment-2 trial (adaptation with link-quality protection).
struct ProtectionRow {
  double d_norm = 0.0, df_norm = 0.0;
  int n_femto = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double rho_initial = 0.0;
  bool feasible = false;
  bool rescaled = false;
  double gamma0_target_dB = 0.0;
  double gamma0_dB = 0.0;
  bool protected_ok = false;
  int epochs = 0;
  double mean_target_dB = 0.0;
  double mean_sinr_dB = 0.0;
  double frac_degraded = 0.0;
  double mean_reduction = 0.0;
};

/// Per-group averages over trials.
struct GroupSummary {
  std::string group;
  int trials = 0;
  double mean_target_dB = 0.0;
  double mean_sinr_dB = 0.0;
  double improvement = 0.0;  ///< (mean_sinr_dB - mean_target_dB) / mean_target_dB
  double frac_degraded = 0.0;
  double mean_reduction = 0.0;
  double protected_frac = 1.0;
};

struct ExperimentOneResult {
  std::vector<AdaptationRow> rows;       ///< ordered by (n, pair, trial)
  std::vector<GroupSummary> summary;     ///< one per (n, pair)
};

struct ExperimentTwoResult {
  std::vector<ProtectionRow> rows;       ///< ordered by (placement, n, trial)
  std::vector<GroupSummary> summary;     ///< one per (placement, n)
};

ExperimentOneResult experiment_one(const ExperimentConfig& cfg);
ExperimentTwoResult experiment_two(const ExperimentConfig& cfg);

void write_csv(std::ostream& os, const std::vector<AdaptationRow>& rows);
void write_csv(std::ostream& os, const std::vector<ProtectionRow>& rows);
void write_csv(std::ostream& os, const std::vector<GroupSummary>& summary);

/// Pareto contours for every placement; CSV columns
/// d_norm,df_norm,gamma_f_dB,gamma_c_dB,kappa,bound_dB.
void contour_experiment(const ExperimentConfig& cfg, std::ostream& os);

/// Link budget of grid layouts with the cellular user at the grid centre,
/// for each N and alpha over d_norm = 0.05 ... 0.95.
/// CSV: n_femto,alpha,d_norm,L_dB.
void link_budget_curves(const ExperimentConfig& cfg, std::ostream& os);

/// Empirical CDF of L_dB over random layouts (cdf_layouts per N and
/// placement). CSV: n_femto,d_norm,df_norm,L_dB,cdf.
void link_budget_cdf(const ExperimentConfig& cfg, std::ostream& os);

/// Reference 16-femtocell protection scenario: grid at D = D_f = 0.1 with
/// fixed minimum targets.
struct TableTwoScenario {
  NetworkGeometry geometry;
  GainMatrix gains;
  SinrTargets targets;
  GameParams game;
  ProtectionConfig protection;
};

TableTwoScenario table_two_scenario(const ExperimentConfig& cfg = {});

struct TableTwoResult {
  double rho_initial = 0.0;
  double rho_final = 0.0;  ///< rho(diag(gamma_0, working targets) G) at the end
  ProtectionOutcome outcome;
};

TableTwoResult run_table_two(const TableTwoScenario& scenario);

/// Long-format CSV: epoch,user,d0i_norm,target_dB,working_dB,p_dBm.
/// For user 0 working_dB is the achieved SINR at the end of the epoch.
void write_table_two_csv(std::ostream& os, const TableTwoScenario& scenario,
                         const TableTwoResult& result);

}  // namespace femtopc
