#pragma once

#include <functional>
#include <iosfwd>

#include <Eigen/Core>

#include "femtopc/channel.hpp"
#include "femtopc/feasibility.hpp"

namespace femtopc {

/// Utility coefficients and iteration controls of the power-control game.
/// a and b are per-femtocell (length N); sigma2 is the receiver noise power.
struct GameParams {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double p_max = 1.0;
  double sigma2 = 0.0;
  int max_iter = 1000;
  double conv_tol = 1e-9;

  /// Identical coefficients at every femtocell.
  static GameParams uniform(Eigen::Index n_femto, double a, double b,
                            double p_max, double sigma2);
};

struct GameState {
  Eigen::VectorXd p;     ///< transmit powers (W), length N+1
  Eigen::VectorXd sinr;  ///< achieved SINRs (linear)
  int iter = 0;
};

/// State with every user at p_max.
GameState full_power_state(const GainMatrix& gm, const GameParams& params);

/// State at the given powers with SINRs filled in.
GameState make_state(Eigen::VectorXd p, const GainMatrix& gm, double sigma2);

/// I_i(p_{-i}) = sum_{j != i} p_j g_ij + sigma^2.
double interference(Eigen::Index i, const Eigen::VectorXd& p, const GainMatrix& gm,
                    double sigma2);

/// Equilibrium SINR of femtocell i (i >= 1) before the power cap:
/// [Gamma_i + ln(a_i g_ii / (b_i g_0i)) / a_i]^+.
double femto_equilibrium_sinr(Eigen::Index i, const GainMatrix& gm,
                              const SinrTargets& targets, const GameParams& params);

/// Per-user SINR that the power update chases: Gamma_0 for the cellular user,
/// femto_equilibrium_sinr for each femtocell.
Eigen::VectorXd equilibrium_targets(const GainMatrix& gm, const SinrTargets& targets,
                                    const GameParams& params);

/// One synchronous (Jacobi) update
///
///     p_i <- min{ target_i I_i(p^(k)) / g_ii, p_max }
///
/// which equals p_i target_i / gamma_i and stays defined at p_i = 0.
GameState power_update(const GameState& state, const GainMatrix& gm,
                       const Eigen::VectorXd& working_targets,
                       const GameParams& params);

struct EquilibriumResult {
  GameState state;
  bool converged = false;
  int iters = 0;
};

/// Observer called after every update with the new state.
using IterationObserver = std::function<void(const GameState&)>;

/// Iterate power_update until the largest relative power change drops below
/// conv_tol or max_iter updates have run.
EquilibriumResult run_to_equilibrium(const GameState& initial, const GainMatrix& gm,
                                     const Eigen::VectorXd& working_targets,
                                     const GameParams& params,
                                     const IterationObserver& observer = {});

/// Convenience: start at p_max and chase equilibrium_targets(targets).
EquilibriumResult run_to_equilibrium(const GainMatrix& gm, const SinrTargets& targets,
                                     const GameParams& params);

/// U_0 = -(gamma_0 - Gamma_0)^2.
double utility_cellular(double gamma_0, double target_0);

/// U_i = 1 - exp(-a_i (gamma_i - Gamma_i)) - b_i p_i g_0i / I_i(p_{-i}).
double utility_femto(Eigen::Index i, const Eigen::VectorXd& p, const GainMatrix& gm,
                     const SinrTargets& targets, const GameParams& params);

/// CSV trace rows: iter,user_id,p_W,sinr_dB.
void write_trace_header(std::ostream& os);
void write_trace_rows(std::ostream& os, const GameState& state);

}  // namespace femtopc
