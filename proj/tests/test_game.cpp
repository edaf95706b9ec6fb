#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "femtopc/experiments.hpp"
#include "femtopc/game.hpp"
#include "femtopc/random.hpp"
#include "oracles.hpp"

using namespace femtopc;

namespace {

struct Instance {
  GainMatrix gm;
  SinrTargets targets;
  double sigma2 = 0.0;
};

// Grid network with feasible targets whose centralized powers fit under 1 W.
Instance feasible_grid(int n, double d, double df, double gamma_f_dB = 10.0,
                       double gamma_c_dB = 5.0) {
  const PropagationParams prop;
  Instance inst{build_gain_matrix(make_grid_layout(n, d, df), prop),
                SinrTargets::from_db(gamma_c_dB, Eigen::VectorXd::Constant(n, gamma_f_dB)),
                calibrate_noise(prop, 1000.0, 1.0)};
  REQUIRE(is_feasible(inst.targets, inst.gm).feasible);
  REQUIRE(solve_centralized(inst.targets, inst.gm, inst.sigma2).maxCoeff() < 1.0);
  return inst;
}

}  // namespace

TEST_CASE("interference examples") {
  Eigen::Matrix2d raw;
  raw << 1e-10, 1e-12, 1e-11, 1e-9;
  const GainMatrix gm(raw);
  CHECK(interference(0, Eigen::Vector2d::Zero(), gm, 1e-13) == 1e-13);
  CHECK(interference(0, Eigen::Vector2d(0.7, 1.0), gm, 1e-13) ==
        doctest::Approx(1.1e-12).epsilon(1e-14));

  Rng rng(2);
  const auto big = oracle::random_gains(rng, 6);
  Eigen::VectorXd p(7);
  for (int i = 0; i < 7; ++i) p(i) = uniform01(rng);
  for (int i = 0; i < 7; ++i) {
    double direct = 0.5;
    for (int j = 0; j < 7; ++j) {
      if (j != i) direct += p(j) * big.raw(i, j);
    }
    CHECK(interference(i, p, big, 0.5) == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("femtocell equilibrium SINR") {
  Eigen::Matrix2d raw;
  raw << 1.0, 0.25, 0.1, 2.0;
  const GainMatrix gm(raw);
  const SinrTargets t{3.0, Eigen::VectorXd::Constant(1, 7.0)};

  // a g_11 = b g_01 gives no excess.
  CHECK(femto_equilibrium_sinr(1, gm, t, GameParams::uniform(1, 1.0, 8.0, 1.0, 1e-3)) ==
        doctest::Approx(7.0));

  // a g_11 = e b g_01 gives excess 1/a, the largest over all a.
  const double a_star = std::numbers::e * 0.25 / 2.0;
  const double best =
      femto_equilibrium_sinr(1, gm, t, GameParams::uniform(1, a_star, 1.0, 1.0, 1e-3)) - 7.0;
  CHECK(best == doctest::Approx(1.0 / a_star));
  for (double a = 0.01; a < 100.0; a *= 1.7) {
    const double excess =
        femto_equilibrium_sinr(1, gm, t, GameParams::uniform(1, a, 1.0, 1.0, 1e-3)) - 7.0;
    CHECK(excess <= best + 1e-12);
  }

  // Large a approaches the minimum target.
  CHECK(femto_equilibrium_sinr(1, gm, t, GameParams::uniform(1, 1e9, 1.0, 1.0, 1e-3)) ==
        doctest::Approx(7.0).epsilon(1e-8));

  // Clipped at zero when the log term is very negative.
  CHECK(femto_equilibrium_sinr(1, gm, t, GameParams::uniform(1, 1e-3, 1.0, 1.0, 1e-3)) == 0.0);

  Eigen::Matrix2d blind = raw;
  blind(0, 1) = 0.0;
  CHECK_THROWS_AS(
      femto_equilibrium_sinr(1, GainMatrix(blind), t, GameParams::uniform(1, 1.0, 1.0, 1.0, 1e-3)),
      std::domain_error);
  CHECK_THROWS_AS(femto_equilibrium_sinr(0, gm, t, GameParams::uniform(1, 1.0, 1.0, 1.0, 1e-3)),
                  std::out_of_range);
}

TEST_CASE("equilibrium excess grows with the own-to-macrocell gain ratio") {
  const auto inst = feasible_grid(16, 0.5, 0.5);
  const auto params = GameParams::uniform(16, 1.0, 1.0, 1.0, inst.sigma2);
  const auto targets = equilibrium_targets(inst.gm, inst.targets, params);
  CHECK(targets(0) == inst.targets.gamma_c);
  for (int i = 1; i <= 16; ++i) {
    for (int j = 1; j <= 16; ++j) {
      const double ri = inst.gm.raw(i, i) / inst.gm.raw(0, i);
      const double rj = inst.gm.raw(j, j) / inst.gm.raw(0, j);
      if (ri > rj) CHECK(targets(i) >= targets(j));
    }
  }
}

TEST_CASE("fixed point is reached, stable, and independent of the start") {
  const auto inst = feasible_grid(16, 0.9, 0.9);
  auto params = GameParams::uniform(16, 1.0, 1.0, 1.0, inst.sigma2);
  params.max_iter = 100000;
  params.conv_tol = 1e-13;
  const auto working = equilibrium_targets(inst.gm, inst.targets, params);

  const auto from_max = run_to_equilibrium(full_power_state(inst.gm, params), inst.gm,
                                           working, params);
  const auto from_low = run_to_equilibrium(
      make_state(Eigen::VectorXd::Constant(17, 1e-15), inst.gm, inst.sigma2), inst.gm,
      working, params);
  REQUIRE(from_max.converged);
  REQUIRE(from_low.converged);
  CHECK(((from_max.state.p - from_low.state.p).cwiseQuotient(from_max.state.p))
            .cwiseAbs()
            .maxCoeff() < 1e-6);

  const auto once = power_update(from_max.state, inst.gm, working, params);
  CHECK(((once.p - from_max.state.p).cwiseQuotient(from_max.state.p)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(once.iter == from_max.state.iter + 1);

  // First-order condition for femtocells below the cap.
  for (int i = 1; i <= 16; ++i) {
    if (from_max.state.p(i) >= params.p_max) continue;
    const double gamma = from_max.state.sinr(i);
    const double lhs = std::exp(-(gamma - inst.targets.gamma_f(i - 1))) * inst.gm.raw(i, i);
    CHECK(lhs == doctest::Approx(inst.gm.raw(0, i)).epsilon(1e-8));
  }
}

TEST_CASE("zero power start never divides by zero") {
  const auto inst = feasible_grid(4, 0.5, 0.5);
  const auto params = GameParams::uniform(4, 1.0, 1.0, 1.0, inst.sigma2);
  const auto working = equilibrium_targets(inst.gm, inst.targets, params);
  const auto zero = make_state(Eigen::VectorXd::Zero(5), inst.gm, inst.sigma2);
  const auto next = power_update(zero, inst.gm, working, params);
  CHECK(next.p.allFinite());
  CHECK((next.p.array() > 0.0).all());
  for (int i = 0; i < 5; ++i) {
    CHECK(next.p(i) == doctest::Approx(working(i) * inst.sigma2 / inst.gm.raw(i, i)));
  }
}

TEST_CASE("large reward steepness recovers the minimum targets") {
  const auto inst = feasible_grid(16, 0.9, 0.9);
  auto params = GameParams::uniform(16, 1e6, 1.0, 1.0, inst.sigma2);
  params.max_iter = 100000;
  params.conv_tol = 1e-13;
  const auto eq = run_to_equilibrium(inst.gm, inst.targets, params);
  REQUIRE(eq.converged);
  const Eigen::VectorXd gamma = inst.targets.diagonal();
  CHECK(((eq.state.sinr - gamma).cwiseQuotient(gamma)).cwiseAbs().maxCoeff() < 1e-4);

  const auto working = equilibrium_targets(inst.gm, inst.targets, params);
  const auto p = solve_centralized(working, inst.gm, NoiseModel(inst.sigma2, working, inst.gm));
  CHECK(((eq.state.p - p).cwiseQuotient(p)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("cellular user rails at full power when its target is out of reach") {
  auto inst = feasible_grid(16, 0.9, 0.9);
  inst.targets.gamma_c = 1e6;
  auto params = GameParams::uniform(16, 1.0, 1.0, 1.0, inst.sigma2);
  params.max_iter = 5000;
  const auto eq = run_to_equilibrium(inst.gm, inst.targets, params);
  CHECK(eq.state.p(0) == params.p_max);
  CHECK(eq.state.sinr(0) < 1e6);
}

TEST_CASE("macrocell alone") {
  Eigen::MatrixXd raw(1, 1);
  raw << 2e-12;
  const GainMatrix gm(raw);
  const auto params = GameParams::uniform(0, 1.0, 1.0, 1.0, 1e-13);
  SinrTargets t{5.0, Eigen::VectorXd()};
  auto eq = run_to_equilibrium(gm, t, params);
  CHECK(eq.converged);
  CHECK(eq.state.p(0) == doctest::Approx(5.0 * 1e-13 / 2e-12));
  t.gamma_c = 1000.0;
  eq = run_to_equilibrium(gm, t, params);
  CHECK(eq.state.p(0) == 1.0);
}

TEST_CASE("update map is a standard interference function") {
  const auto inst = feasible_grid(16, 0.5, 0.3);
  const auto params = GameParams::uniform(16, 1.0, 1.0, 1.0, inst.sigma2);
  const auto working = equilibrium_targets(inst.gm, inst.targets, params);
  auto f = [&](const Eigen::VectorXd& p) {
    return power_update(make_state(p, inst.gm, inst.sigma2), inst.gm, working, params).p;
  };
  Rng rng(99);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd lo(17), hi(17);
    for (int i = 0; i < 17; ++i) {
      lo(i) = std::pow(10.0, uniform(rng, -8.0, 0.0));
      hi(i) = std::min(1.0, lo(i) * uniform(rng, 1.0, 10.0));
    }
    const double alpha = uniform(rng, 1.01, 5.0);
    const auto f_lo = f(lo);
    CHECK((f_lo.array() > 0.0).all());
    CHECK(((f(hi) - f_lo).array() >= 0.0).all());
    CHECK(((alpha * f_lo - f(Eigen::VectorXd(alpha * lo))).array() > 0.0).all());
  }
}

TEST_CASE("utilities") {
  CHECK(utility_cellular(4.0, 4.0) == 0.0);
  CHECK(utility_cellular(3.0, 4.0) == -1.0);
  CHECK(utility_cellular(6.0, 4.0) == -4.0);

  const auto inst = feasible_grid(4, 0.5, 0.5);
  const auto params = GameParams::uniform(4, 1.0, 1.0, 1.0, inst.sigma2);
  SinrTargets zero = inst.targets;
  zero.gamma_f.setZero();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(5, 0.1);
  p(2) = 0.0;
  CHECK(utility_femto(2, p, inst.gm, zero, params) == 0.0);

  // Concave along the femtocell's own power, probed around the target.
  p(2) = 0.0;
  const double x0 = inst.targets.gamma_f(1) * interference(2, p, inst.gm, inst.sigma2) /
                    inst.gm.raw(2, 2);
  const double h = 1e-2 * x0;
  for (double x = 0.5 * x0; x < 2.0 * x0; x *= 1.1) {
    auto u = [&](double pi) {
      Eigen::VectorXd q = p;
      q(2) = pi;
      return utility_femto(2, q, inst.gm, inst.targets, params);
    };
    CHECK(u(x + h) - 2.0 * u(x) + u(x - h) < 0.0);
  }
}

TEST_CASE("trace CSV") {
  std::ostringstream os;
  write_trace_header(os);
  Eigen::Matrix2d raw;
  raw << 1.0, 0.1, 0.1, 1.0;
  const GainMatrix gm(raw);
  write_trace_rows(os, make_state(Eigen::Vector2d(1.0, 0.5), gm, 0.01));
  const std::string text = os.str();
  CHECK(text.find("iter,user_id,p_W,sinr_dB\n") != std::string::npos);
  CHECK(text.find("0,1,0.5,") != std::string::npos);
}
