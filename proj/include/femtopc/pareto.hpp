#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "femtopc/channel.hpp"

namespace femtopc {

/// Choice of the target spectral radius kappa for a given rho(Gamma_f F).
///
/// The default rule is kappa = max{1 - 1e-4, rho + (1 - 1e-4)(1 - rho)},
/// which always lands strictly between rho and 1 for rho < 1.
struct KappaRule {
  std::optional<double> fixed;

  static KappaRule constant(double kappa) { return KappaRule{kappa}; }
  double operator()(double rho_femto) const;
};

/// Highest cellular target keeping rho(diag(Gamma_c, Gamma_f) G) = kappa:
///
///     Gamma_c = kappa^2 / (q_c^T [I - (Gamma_f / kappa) F]^{-1} Gamma_f q_f)
///
/// Requires rho(Gamma_f F) < kappa < 1; throws InfeasibleTargets otherwise.
/// Returns +inf when the femtocells are invisible to the macrocell.
double max_cellular_sinr(const Eigen::VectorXd& gamma_f, const GainMatrix& gm,
                         double kappa);

/// Necessary bound Gamma_c <= 1 / (q_c^T Gamma_f q_f); +inf for a zero
/// denominator.
double cellular_upper_bound(const Eigen::VectorXd& gamma_f, const GainMatrix& gm);

struct ParetoPoint {
  double gamma_c = 0.0;
  double gamma_f = 0.0;  ///< common femtocell target
  double kappa = 0.0;
  double bound = 0.0;    ///< cellular_upper_bound at the same gamma_f
};

struct ParetoContour {
  std::vector<ParetoPoint> points;
  std::vector<std::string> skipped;  ///< one diagnostic per rejected target
};

/// Pareto frontier for a common femtocell target, one point per grid value.
/// Values with gamma_f >= 1 / rho(F) are skipped with a diagnostic.
ParetoContour pareto_contour(const std::vector<double>& gamma_f_grid,
                             const GainMatrix& gm,
                             const KappaRule& kappa_rule = {});

/// n values log-spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

/// Default contour grid: 200 log-spaced points from gamma_f_min up to
/// 0.999 / rho(F) (or gamma_f_max when F has no coupling).
std::vector<double> default_contour_grid(const GainMatrix& gm, double gamma_f_min,
                                         double gamma_f_max, int n = 200);

/// CSV: gamma_f_dB,gamma_c_dB,kappa,bound_dB.
void write_contour_csv(std::ostream& os, const ParetoContour& contour);

}  // namespace femtopc
