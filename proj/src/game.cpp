#include "femtopc/game.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "femtopc/units.hpp"

namespace femtopc {

GameParams GameParams::uniform(Eigen::Index n_femto, double a, double b,
                               double p_max, double sigma2) {
  GameParams params;
  params.a = Eigen::VectorXd::Constant(n_femto, a);
  params.b = Eigen::VectorXd::Constant(n_femto, b);
  params.p_max = p_max;
  params.sigma2 = sigma2;
  return params;
}

GameState make_state(Eigen::VectorXd p, const GainMatrix& gm, double sigma2) {
  GameState s;
  s.sinr = achieved_sinr(p, gm, sigma2);
  s.p = std::move(p);
  return s;
}

GameState full_power_state(const GainMatrix& gm, const GameParams& params) {
  return make_state(Eigen::VectorXd::Constant(gm.size(), params.p_max), gm,
                    params.sigma2);
}

double interference(Eigen::Index i, const Eigen::VectorXd& p, const GainMatrix& gm,
                    double sigma2) {
  return gm.raw().row(i).dot(p) - gm.raw(i, i) * p(i) + sigma2;
}

double femto_equilibrium_sinr(Eigen::Index i, const GainMatrix& gm,
                              const SinrTargets& targets, const GameParams& params) {
  if (i < 1 || i > gm.femto_count()) {
    throw std::out_of_range("femto_equilibrium_sinr: not a femtocell index");
  }
  const double a = params.a(i - 1);
  const double b = params.b(i - 1);
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("femto_equilibrium_sinr: a_i and b_i must be > 0");
  }
  const double g_cross = gm.raw(0, i);
  if (!(g_cross > 0.0)) {
    throw std::domain_error(
        "femto_equilibrium_sinr: g_0i = 0, femtocell invisible to the macrocell");
  }
  const double excess = std::log(a * gm.raw(i, i) / (b * g_cross)) / a;
  return std::max(targets.gamma_f(i - 1) + excess, 0.0);
}

Eigen::VectorXd equilibrium_targets(const GainMatrix& gm, const SinrTargets& targets,
                                    const GameParams& params) {
  Eigen::VectorXd out(gm.size());
  out(0) = targets.gamma_c;
  for (Eigen::Index i = 1; i < gm.size(); ++i) {
    out(i) = femto_equilibrium_sinr(i, gm, targets, params);
  }
  return out;
}

GameState power_update(const GameState& state, const GainMatrix& gm,
                       const Eigen::VectorXd& working_targets,
                       const GameParams& params) {
  const Eigen::VectorXd& own = gm.raw().diagonal();
  const Eigen::VectorXd received = gm.raw() * state.p;
  const Eigen::ArrayXd interf =
      (received - own.cwiseProduct(state.p)).array() + params.sigma2;

  Eigen::VectorXd next =
      (working_targets.array() * interf / own.array()).min(params.p_max).max(0.0);
  GameState out = make_state(std::move(next), gm, params.sigma2);
  out.iter = state.iter + 1;
  return out;
}

namespace {

double max_relative_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a(i)), std::abs(b(i)));
    if (scale > 0.0) worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

}  // namespace

EquilibriumResult run_to_equilibrium(const GameState& initial, const GainMatrix& gm,
                                     const Eigen::VectorXd& working_targets,
                                     const GameParams& params,
                                     const IterationObserver& observer) {
  EquilibriumResult result;
  result.state = initial;
  for (int k = 0; k < params.max_iter; ++k) {
    GameState next = power_update(result.state, gm, working_targets, params);
    const double change = max_relative_change(next.p, result.state.p);
    result.state = std::move(next);
    ++result.iters;
    if (observer) observer(result.state);
    if (change < params.conv_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

EquilibriumResult run_to_equilibrium(const GainMatrix& gm, const SinrTargets& targets,
                                     const GameParams& params) {
  return run_to_equilibrium(full_power_state(gm, params), gm,
                            equilibrium_targets(gm, targets, params), params);
}

double utility_cellular(double gamma_0, double target_0) {
  const double d = gamma_0 - target_0;
  return -d * d;
}

double utility_femto(Eigen::Index i, const Eigen::VectorXd& p, const GainMatrix& gm,
                     const SinrTargets& targets, const GameParams& params) {
  const double interf = interference(i, p, gm, params.sigma2);
  const double gamma = p(i) * gm.raw(i, i) / interf;
  const double a = params.a(i - 1);
  const double b = params.b(i - 1);
  const double reward = 1.0 - std::exp(-a * (gamma - targets.gamma_f(i - 1)));
  return reward - b * p(i) * gm.raw(0, i) / interf;
}

void write_trace_header(std::ostream& os) {
  os << "# schema: game_trace v1\n";
  os << "iter,user_id,p_W,sinr_dB\n";
}

void write_trace_rows(std::ostream& os, const GameState& state) {
  const auto old_precision = os.precision(12);
  for (Eigen::Index i = 0; i < state.p.size(); ++i) {
    os << state.iter << ',' << i << ',' << state.p(i) << ','
       << linear_to_db(state.sinr(i)) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace femtopc
