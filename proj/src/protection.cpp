#include "femtopc/protection.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "femtopc/units.hpp"

namespace femtopc {

double cellular_threshold(double target_0, const ProtectionConfig& cfg) {
  if (cfg.mode == ToleranceMode::Decibel) {
    return db_to_linear((1.0 - cfg.epsilon) * linear_to_db(target_0));
  }
  return (1.0 - cfg.epsilon) * target_0;
}

std::vector<Eigen::Index> dominant_set(const GameState& state, const GainMatrix& gm,
                                       double y) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 1; i < gm.size(); ++i) {
    if (state.p(i) * gm.raw(0, i) > y) out.push_back(i);
  }
  return out;
}

namespace {

double dominant_interference(const GameState& state, const GainMatrix& gm,
                             const std::vector<Eigen::Index>& dominant) {
  double sum = 0.0;
  for (const Eigen::Index i : dominant) sum += state.p(i) * gm.raw(0, i);
  return sum;
}

double required_relief(const GameState& state, const GainMatrix& gm, double threshold,
                       double p_max) {
  return p_max * gm.raw(0, 0) * (1.0 / state.sinr(0) - 1.0 / threshold);
}

}  // namespace

bool sufficient_reduction_check(const GameState& state, const GainMatrix& gm,
                                const std::vector<Eigen::Index>& dominant, double t,
                                double threshold, double p_max) {
  return (1.0 - 1.0 / t) * dominant_interference(state, gm, dominant) >=
         required_relief(state, gm, threshold, p_max);
}

double required_reduction_factor(const GameState& state, const GainMatrix& gm,
                                 const std::vector<Eigen::Index>& dominant,
                                 double threshold, double p_max) {
  const double relief = required_relief(state, gm, threshold, p_max);
  if (relief <= 0.0) return 1.0;
  const double available = dominant_interference(state, gm, dominant);
  if (relief >= available) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - relief / available);
}

FemtoMetrics compute_metrics(const GameState& final_state, const SinrTargets& original,
                             double slack) {
  FemtoMetrics m;
  const Eigen::Index n = original.femto_count();
  if (n == 0) return m;
  double sum_db = 0.0;
  double reduction = 0.0;
  Eigen::Index degraded = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const double gamma = final_state.sinr(i);
    const double target = original.gamma_f(i - 1);
    const double gamma_db = linear_to_db(gamma);
    sum_db += gamma_db;
    if (gamma < target * (1.0 - slack)) {
      ++degraded;
      const double target_db = linear_to_db(target);
      reduction += (target_db - gamma_db) / target_db;
    }
  }
  m.mean_sinr_dB = sum_db / n;
  m.frac_degraded = static_cast<double>(degraded) / n;
  m.mean_reduction = reduction / n;
  return m;
}

namespace {

double mean_db(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return linear_to_db(v.array()).mean();
}

}  // namespace

ProtectionOutcome run_protection(const GainMatrix& gm, const SinrTargets& targets,
                                 const GameParams& game_params,
                                 const ProtectionConfig& cfg) {
  const double threshold = cellular_threshold(targets.gamma_c, cfg);
  const double cut = db_to_linear(-cfg.t_dB);
  const double y_step = db_to_linear(cfg.delta_y_dB);

  GameParams epoch_params = game_params;
  epoch_params.max_iter = cfg.M;

  Eigen::VectorXd working = equilibrium_targets(gm, targets, game_params);
  std::optional<double> y = cfg.y0;

  ProtectionOutcome out;
  for (int epoch = 0;; ++epoch) {
    const EquilibriumResult eq = run_to_equilibrium(
        full_power_state(gm, epoch_params), gm, working, epoch_params);
    out.final_state = eq.state;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.gamma0_dB = linear_to_db(eq.state.sinr(0));
    rec.state = eq.state;

    rec.working_targets = working.tail(gm.femto_count());
    rec.mean_femto_target_dB = mean_db(rec.working_targets);

    const bool flag = eq.state.sinr(0) >= threshold;
    if (!flag && epoch < cfg.max_epochs) {
      if (!y) {
        double strongest = 0.0;
        for (Eigen::Index i = 1; i < gm.size(); ++i) {
          strongest = std::max(strongest, eq.state.p(i) * gm.raw(0, i));
        }
        y = strongest / y_step;
      }
      rec.y = *y;
      rec.dominant = dominant_set(eq.state, gm, *y);
      for (const Eigen::Index i : rec.dominant) working(i) *= cut;
      *y /= y_step;
      ++out.epochs;
    }
    out.trace.push_back(std::move(rec));

    if (flag) {
      out.protected_ok = true;
      break;
    }
    if (epoch >= cfg.max_epochs) break;
  }
  out.working_targets = working.tail(gm.femto_count());
  out.metrics = compute_metrics(out.final_state, targets);
  return out;
}

void write_epoch_trace_csv(std::ostream& os, const ProtectionOutcome& outcome) {
  const auto old_precision = os.precision(12);
  os << "# schema: protection_epochs v1\n";
  os << "epoch,y_dBm,n_dominant,gamma0_dB,mean_femto_target_dB\n";
  for (const auto& rec : outcome.trace) {
    os << rec.epoch << ',';
    if (rec.y > 0.0) {
      os << watts_to_dbm(rec.y);
    } else {
      os << "nan";
    }
    os << ',' << rec.dominant.size() << ',' << rec.gamma0_dB << ','
       << rec.mean_femto_target_dB << '\n';
  }
  os.precision(old_precision);
}

}  // namespace femtopc
