#include <cmath>
#include <sstream>

#include "doctest.h"
#include "femtopc/experiments.hpp"
#include "femtopc/units.hpp"
#include "oracles.hpp"

using namespace femtopc;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.trials = 6;
  cfg.n_values = {4, 16};
  cfg.ab_pairs = {{0.1, 1.0}, {10.0, 1.0}};
  cfg.placements = {{0.9, 0.9}, {0.1, 0.5}};
  cfg.game_max_iter = 2000;
  cfg.protection.M = 200;
  cfg.seed = 77;
  return cfg;
}

template <typename Rows>
std::string to_csv(const Rows& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

}  // namespace

TEST_CASE("noise calibration") {
  const PropagationParams p;
  const double sigma2 = calibrate_noise(p, 1000.0, 1.0);
  CHECK(sigma2 == doctest::Approx(1.574e-17).epsilon(1e-3));
  CHECK(calibrate_noise(p, 1000.0, 2.0) == doctest::Approx(2.0 * sigma2));
  const auto geom = make_grid_layout(1, 1.0, 0.5);
  CHECK(linear_to_db(gain(0, 0, geom, p) / sigma2) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("target sampling") {
  ExperimentConfig cfg;
  cfg.gamma_f_min_dB = cfg.gamma_f_max_dB = 5.0;
  cfg.gamma_c_min_dB = cfg.gamma_c_max_dB = 7.0;
  Rng rng(1);
  const auto fixed = sample_targets(cfg, 8, rng);
  CHECK(linear_to_db(fixed.gamma_c) == doctest::Approx(7.0));
  for (int i = 0; i < 8; ++i) CHECK(linear_to_db(fixed.gamma_f(i)) == doctest::Approx(5.0));

  ExperimentConfig wide;
  Rng a(123), b(123);
  const auto draw = sample_targets(wide, 10000, a);
  CHECK(draw.gamma_f == sample_targets(wide, 10000, b).gamma_f);
  const double mean = linear_to_db(draw.gamma_f.array()).mean();
  CHECK(std::abs(mean - 15.0) < 0.1);
  CHECK(linear_to_db(draw.gamma_f.array()).minCoeff() >= 5.0);
  CHECK(linear_to_db(draw.gamma_f.array()).maxCoeff() <= 25.0);
}

TEST_CASE("infeasible femtocell targets are divided down") {
  Eigen::Matrix2d F;
  F << 0.0, 1.0, 1.0, 0.0;
  const auto r = rescale_infeasible(Eigen::Vector2d(2.0, 2.0), F);
  CHECK(r.scaled);
  CHECK(r.rho_before == doctest::Approx(2.0));
  CHECK(r.gamma_f(0) == doctest::Approx(1.0 / 1.001));
  CHECK(spectral_radius(Eigen::MatrixXd(r.gamma_f.asDiagonal() * F)).rho ==
        doctest::Approx(1.0 / 1.001));

  const auto same = rescale_infeasible(Eigen::Vector2d(0.5, 0.5), F);
  CHECK_FALSE(same.scaled);
  CHECK(same.gamma_f == Eigen::Vector2d(0.5, 0.5));

  Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    Eigen::MatrixXd m = oracle::random_nonnegative(rng, 6, 0.8);
    m.diagonal().setZero();
    Eigen::VectorXd g(6);
    for (int i = 0; i < 6; ++i) g(i) = uniform(rng, 0.1, 20.0);
    const auto out = rescale_infeasible(g, m);
    CHECK(spectral_radius(Eigen::MatrixXd(out.gamma_f.asDiagonal() * m)).rho < 1.0);
  }
}

TEST_CASE("cellular target rule") {
  Eigen::Matrix2d raw;
  raw << 1.0, 0.5, 0.02, 1.0;
  const GainMatrix gm(raw);
  const Eigen::VectorXd gf = Eigen::VectorXd::Constant(1, 4.0);
  const double best = max_cellular_sinr(gf, gm, 0.9);  // 20.25

  CHECK(cellular_target_rule(gm, gf, 0.9, 0.0, 2.0) == doctest::Approx(best));
  CHECK(cellular_target_rule(gm, gf, 0.9, 5.0, 2.0) ==
        doctest::Approx(best / db_to_linear(5.0)));
  CHECK(cellular_target_rule(gm, gf, 0.9, 5.0, 2.0) <= best);
  CHECK(cellular_target_rule(gm, Eigen::VectorXd::Constant(1, 1e4), 0.9, 5.0,
                             db_to_linear(3.0)) == doctest::Approx(db_to_linear(3.0)));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_values = {5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.layout = LayoutKind::Random;
  CHECK_NOTHROW(cfg.validate());
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.trials = 1;
  cfg.gamma_c_min_dB = 20.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("experiment one rows") {
  const auto cfg = small_config();
  const auto res = experiment_one(cfg);
  REQUIRE(res.rows.size() == 2 * 2 * 6);
  REQUIRE(res.summary.size() == 4);
  for (const auto& row : res.rows) {
    CHECK(row.converged);
    CHECK(row.feasible == (row.rho_initial < 1.0));
    CHECK(row.gamma0_target_dB >= cfg.gamma_c_min_dB - 1e-9);
    if (!row.rescaled) CHECK(row.mean_target_dB == doctest::Approx(row.mean_raw_target_dB));
    CHECK(row.mean_target_dB <= row.mean_raw_target_dB + 1e-9);
  }
  // Trial t of a group replays from its stored seed, common across (a, b) pairs.
  CHECK(res.rows[0].seed == res.rows[6].seed);
  CHECK(res.rows[0].mean_raw_target_dB == res.rows[6].mean_raw_target_dB);
}

TEST_CASE("experiment two rows") {
  const auto cfg = small_config();
  const auto res = experiment_two(cfg);
  REQUIRE(res.rows.size() == 2 * 2 * 6);
  REQUIRE(res.summary.size() == 4);
  for (const auto& row : res.rows) {
    CHECK(row.gamma0_target_dB >= 3.0 - 1e-9);
    CHECK(row.gamma0_target_dB <= 10.0 + 1e-9);
    if (row.protected_ok) CHECK(row.gamma0_dB >= 0.95 * row.gamma0_target_dB - 1e-9);
    CHECK(row.frac_degraded >= 0.0);
    CHECK(row.frac_degraded <= 1.0);
    CHECK(row.mean_reduction >= 0.0);
  }
}

TEST_CASE("experiment output is independent of the thread count") {
  auto cfg = small_config();
  const std::string one_a = to_csv(experiment_one(cfg).rows);
  const std::string two_a = to_csv(experiment_two(cfg).rows);
  cfg.threads = 3;
  CHECK(to_csv(experiment_one(cfg).rows) == one_a);
  CHECK(to_csv(experiment_two(cfg).rows) == two_a);
  cfg.seed = 78;
  CHECK(to_csv(experiment_one(cfg).rows) != one_a);
}

TEST_CASE("contour and link-budget emitters") {
  auto cfg = small_config();
  cfg.contour_points = 10;
  cfg.cdf_layouts = 5;
  std::ostringstream contours, curves, cdf;
  contour_experiment(cfg, contours);
  link_budget_curves(cfg, curves);
  link_budget_cdf(cfg, cdf);
  CHECK(contours.str().find("d_norm,df_norm,gamma_f_dB,gamma_c_dB,kappa,bound_dB\n") !=
        std::string::npos);
  CHECK(curves.str().find("n_femto,alpha,d_norm,L_dB\n") != std::string::npos);
  CHECK(cdf.str().find("n_femto,d_norm,df_norm,L_dB,cdf\n") != std::string::npos);
}

TEST_CASE("reference protection scenario") {
  const auto scenario = table_two_scenario();
  CHECK(scenario.targets.femto_count() == 16);
  CHECK(linear_to_db(scenario.targets.gamma_c) == doctest::Approx(21.0034));
  const auto result = run_table_two(scenario);
  CHECK(result.rho_initial > 1.0);
  CHECK(std::abs(result.rho_initial / 4.4391 - 1.0) < 0.15);
  CHECK(result.outcome.protected_ok);
  CHECK(result.rho_final < 1.0);

  ExperimentConfig from_ap;
  from_ap.propagation.cross_link_origin = CrossLinkOrigin::AccessPoint;
  const auto ap = table_two_scenario(from_ap);
  CHECK(is_feasible(ap.targets, ap.gains).rho == doctest::Approx(4.4391).epsilon(1e-4));
  const auto first = run_protection(ap.gains, ap.targets, ap.game, ap.protection);
  CHECK(first.trace.front().gamma0_dB == doctest::Approx(7.8979).epsilon(1e-4));

  std::ostringstream os;
  write_table_two_csv(os, scenario, result);
  CHECK(os.str().find("epoch,user,d0i_norm,target_dB,working_dB,p_dBm\n") != std::string::npos);
}
