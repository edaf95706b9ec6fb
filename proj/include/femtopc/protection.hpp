#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "femtopc/channel.hpp"
#include "femtopc/feasibility.hpp"
#include "femtopc/game.hpp"

namespace femtopc {

/// How the cellular tolerance test gamma_0 >= (1 - eps) Gamma_0 is read.
enum class ToleranceMode {
  Decibel,  ///< gamma_0,dB >= (1 - eps) Gamma_0,dB
  Linear,   ///< gamma_0 >= (1 - eps) Gamma_0
};

struct ProtectionConfig {
  double epsilon = 0.05;
  double t_dB = 0.8;         ///< working-target cut per epoch for dominant femtocells
  double delta_y_dB = 3.0;   ///< threshold cut per epoch
  std::optional<double> y0;  ///< initial threshold (W); default max_i p_i g_0i / delta_y
  int M = 1000;              ///< game iterations per epoch
  int max_epochs = 200;
  ToleranceMode mode = ToleranceMode::Decibel;
};

/// Linear SINR the cellular user must reach under `cfg`.
double cellular_threshold(double target_0, const ProtectionConfig& cfg);

struct FemtoMetrics {
  double mean_sinr_dB = 0.0;     ///< mean over femtocells of 10 log10 gamma_i
  double frac_degraded = 0.0;    ///< share of femtocells with gamma_i < Gamma_i
  double mean_reduction = 0.0;   ///< sum over degraded of dB shortfall / Gamma_i,dB, over N
};

/// Femtocells whose interference at the macrocell p_i g_0i exceeds y.
/// Returned as femtocell indices (1..N), ascending.
std::vector<Eigen::Index> dominant_set(const GameState& state, const GainMatrix& gm,
                                       double y);

/// Sufficient condition for a cut by factor t over the set `dominant` to lift
/// the cellular user to `threshold`:
///
///     (1 - 1/t) sum_{i in dominant} p_i g_0i
///         >= p_max g_00 (1/gamma_0 - 1/threshold)
bool sufficient_reduction_check(const GameState& state, const GainMatrix& gm,
                                const std::vector<Eigen::Index>& dominant, double t,
                                double threshold, double p_max);

/// Smallest t > 1 satisfying sufficient_reduction_check; +inf when no cut of
/// this set suffices, 1 when the cellular user already meets the threshold.
double required_reduction_factor(const GameState& state, const GainMatrix& gm,
                                 const std::vector<Eigen::Index>& dominant,
                                 double threshold, double p_max);

/// Per-femtocell outcome metrics from achieved SINRs and the original
/// minimum targets. A femtocell counts as degraded when it falls short of
/// its target by more than `slack` (relative).
FemtoMetrics compute_metrics(const GameState& final_state, const SinrTargets& original,
                             double slack = 1e-9);

struct EpochRecord {
  int epoch = 0;
  double y = 0.0;  ///< threshold used for this epoch's cut (W); 0 when no cut
  std::vector<Eigen::Index> dominant;
  double gamma0_dB = 0.0;
  double mean_femto_target_dB = 0.0;
  Eigen::VectorXd working_targets;  ///< femtocell working targets in force during the epoch (linear)
  GameState state;                  ///< game state at the end of the epoch
};

struct ProtectionOutcome {
  GameState final_state;
  bool protected_ok = false;
  int epochs = 0;  ///< number of target cuts applied
  Eigen::VectorXd working_targets;  ///< final femtocell working targets (linear)
  FemtoMetrics metrics;
  std::vector<EpochRecord> trace;   ///< one record per equilibrium check
};

/// Cellular link-quality protection. Each epoch restarts every user at
/// p_max and runs M game updates; if the cellular user misses its threshold
/// every femtocell in the dominant set cuts its working target by t_dB and y
/// drops by delta_y_dB. Stops on success or after max_epochs cuts.
ProtectionOutcome run_protection(const GainMatrix& gm, const SinrTargets& targets,
                                 const GameParams& game_params,
                                 const ProtectionConfig& cfg);

/// CSV: epoch,y_dBm,n_dominant,gamma0_dB,mean_femto_target_dB.
void write_epoch_trace_csv(std::ostream& os, const ProtectionOutcome& outcome);

}  // namespace femtopc
