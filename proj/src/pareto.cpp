#include "femtopc/pareto.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "femtopc/errors.hpp"
#include "femtopc/feasibility.hpp"
#include "femtopc/units.hpp"

namespace femtopc {

double KappaRule::operator()(double rho_femto) const {
  if (fixed) return *fixed;
  constexpr double margin = 1e-4;
  return std::max(1.0 - margin, rho_femto + (1.0 - margin) * (1.0 - rho_femto));
}

double max_cellular_sinr(const Eigen::VectorXd& gamma_f, const GainMatrix& gm,
                         double kappa) {
  const Eigen::Index n = gm.femto_count();
  if (gamma_f.size() != n) {
    throw std::invalid_argument("max_cellular_sinr: target count mismatch");
  }
  if (!(kappa < 1.0)) {
    throw std::invalid_argument("max_cellular_sinr: kappa must be < 1");
  }
  const Eigen::MatrixXd gamma_F = gamma_f.asDiagonal() * gm.F();
  const double rho_femto = n > 0 ? spectral_radius(gamma_F).rho : 0.0;
  if (!(kappa > rho_femto)) {
    throw InfeasibleTargets("max_cellular_sinr: kappa <= rho(Gamma_f F)",
                            rho_femto);
  }
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - gamma_F / kappa;
  const Eigen::VectorXd rhs = gamma_f.cwiseProduct(gm.q_f());
  const Eigen::VectorXd x = system.partialPivLu().solve(rhs);
  const double denom = gm.q_c().dot(x);
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return kappa * kappa / denom;
}

double cellular_upper_bound(const Eigen::VectorXd& gamma_f, const GainMatrix& gm) {
  const double denom = gm.q_c().dot(gamma_f.cwiseProduct(gm.q_f()));
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

ParetoContour pareto_contour(const std::vector<double>& gamma_f_grid,
                             const GainMatrix& gm, const KappaRule& kappa_rule) {
  const Eigen::Index n = gm.femto_count();
  const double rho_F = spectral_radius(Eigen::MatrixXd(gm.F())).rho;
  ParetoContour contour;
  for (const double gf : gamma_f_grid) {
    if (!(gf > 0.0) || gf * rho_F >= 1.0) {
      std::ostringstream msg;
      msg << "gamma_f=" << gf << " outside (0, 1/rho(F)) with rho(F)=" << rho_F;
      contour.skipped.push_back(msg.str());
      continue;
    }
    const Eigen::VectorXd common = Eigen::VectorXd::Constant(n, gf);
    const double rho_femto = gf * rho_F;
    const double kappa = kappa_rule(rho_femto);
    if (!(kappa > rho_femto) || !(kappa < 1.0)) {
      std::ostringstream msg;
      msg << "gamma_f=" << gf << ": kappa=" << kappa
          << " not in (rho(Gamma_f F), 1)";
      contour.skipped.push_back(msg.str());
      continue;
    }
    contour.points.push_back({max_cellular_sinr(common, gm, kappa), gf, kappa,
                              cellular_upper_bound(common, gm)});
  }
  return contour;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(std::exp(a + (b - a) * k / (n - 1)));
  return out;
}

std::vector<double> default_contour_grid(const GainMatrix& gm, double gamma_f_min,
                                         double gamma_f_max, int n) {
  const double rho_F = spectral_radius(Eigen::MatrixXd(gm.F())).rho;
  const double hi = rho_F > 0.0 ? 0.999 / rho_F : gamma_f_max;
  return log_grid(gamma_f_min, hi, n);
}

void write_contour_csv(std::ostream& os, const ParetoContour& contour) {
  const auto old_precision = os.precision(12);
  os << "# schema: pareto_contour v1\n";
  os << "gamma_f_dB,gamma_c_dB,kappa,bound_dB\n";
  for (const auto& pt : contour.points) {
    os << linear_to_db(pt.gamma_f) << ',' << linear_to_db(pt.gamma_c) << ','
       << pt.kappa << ',' << linear_to_db(pt.bound) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace femtopc
