#include "femtopc/channel.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "femtopc/units.hpp"

namespace femtopc {

double PropagationParams::cellular_loss_db(double f_MHz) {
  return 30.0 * std::log10(f_MHz) - 71.0;
}

PropagationParams PropagationParams::at_frequency(double f_MHz) {
  PropagationParams p;
  p.f_MHz = f_MHz;
  p.K_c_dB = cellular_loss_db(f_MHz);
  p.K_fo_dB = p.K_c_dB;
  return p;
}

PropagationParams PropagationParams::with_outdoor_exponent(double alpha) const {
  PropagationParams p = *this;
  p.alpha_c = alpha;
  p.alpha_fo = alpha;
  return p;
}

GainMatrix::GainMatrix(Eigen::MatrixXd raw) : raw_(std::move(raw)) {
  if (raw_.rows() != raw_.cols() || raw_.rows() < 1) {
    throw std::invalid_argument("gain matrix must be square and non-empty");
  }
  if (!raw_.allFinite() || (raw_.array() < 0.0).any()) {
    throw std::invalid_argument("gains must be finite and nonnegative");
  }
  const Eigen::VectorXd own = raw_.diagonal();
  if ((own.array() <= 0.0).any()) {
    throw std::invalid_argument("zero own-link gain: degenerate geometry");
  }
  normalized_ = own.cwiseInverse().asDiagonal() * raw_;
  normalized_.diagonal().setZero();
}

namespace {

double attenuation(double loss_dB) { return db_to_linear(-loss_dB); }

double path_term(double d, double exponent) {
  return std::min(std::pow(d, -exponent), 1.0);
}

/// Origin of user j's links to other cells.
Point cross_transmitter(Eigen::Index j, const NetworkGeometry& geom,
                        const PropagationParams& params) {
  if (j > 0 && params.cross_link_origin == CrossLinkOrigin::AccessPoint) {
    return geom.base_station(j);
  }
  return geom.user(j);
}

}  // namespace

double gain(Eigen::Index i, Eigen::Index j, const NetworkGeometry& geom,
            const PropagationParams& params) {
  const double wall = attenuation(params.W_dB);
  if (i == j) {
    if (i == 0) {
      const double d = gain_distance(geom.macro_bs, geom.cellular_user);
      return attenuation(params.K_c_dB) * path_term(d, params.alpha_c);
    }
    return attenuation(params.K_fi_dB) *
           std::pow(geom.femto_radius, -params.beta);
  }
  const double d =
      gain_distance(geom.base_station(i), cross_transmitter(j, geom, params));
  if (i == 0) {
    return attenuation(params.K_fo_dB) * wall * path_term(d, params.alpha_fo);
  }
  if (j == 0) {
    return attenuation(params.K_c_dB) * wall * path_term(d, params.alpha_c);
  }
  return attenuation(params.K_fo_dB) * wall * wall *
         path_term(d, params.alpha_fo);
}

GainMatrix build_gain_matrix(const NetworkGeometry& geom,
                             const PropagationParams& params) {
  const Eigen::Index n = geom.femto_count() + 1;
  Eigen::MatrixXd raw(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) raw(i, j) = gain(i, j, geom, params);
  }
  return GainMatrix(std::move(raw));
}

namespace {

LinkBudget budget_from_product(double product) {
  LinkBudget lb;
  if (product > 0.0) {
    lb.linear = 1.0 / product;
    lb.dB = -linear_to_db(product);
  }
  return lb;
}

}  // namespace

LinkBudget link_budget(const GainMatrix& gm) {
  return budget_from_product(gm.q_c().dot(gm.q_f()));
}

LinkBudget link_budget_closed_form(const NetworkGeometry& geom,
                                   const PropagationParams& params) {
  const double alpha = params.alpha_c;
  const double wall = attenuation(params.W_dB);
  const double own_femto =
      attenuation(params.K_fi_dB) * std::pow(geom.femto_radius, -params.beta);
  const double d = gain_distance(geom.macro_bs, geom.cellular_user);

  double cross = 0.0;
  for (Eigen::Index i = 1; i <= geom.femto_count(); ++i) {
    const double d0i =
        gain_distance(geom.macro_bs, cross_transmitter(i, geom, params));
    const double di0 = gain_distance(geom.base_station(i), geom.cellular_user);
    cross += std::pow(d0i, -alpha) * std::pow(di0, -alpha);
  }
  const double scale =
      own_femto / (wall * wall * attenuation(params.K_fo_dB)) * std::pow(d, -alpha);
  if (cross <= 0.0) return LinkBudget{};
  return budget_from_product(cross / scale);
}

bool link_budget_slope_check(const NetworkGeometry& geom,
                             const PropagationParams& params, double alpha) {
  double weight_sum = 0.0;
  double weighted_log = 0.0;
  for (Eigen::Index i = 1; i <= geom.femto_count(); ++i) {
    const double product =
        gain_distance(geom.macro_bs, cross_transmitter(i, geom, params)) *
        gain_distance(geom.base_station(i), geom.cellular_user);
    const double w = std::pow(product, -alpha);
    weight_sum += w;
    weighted_log += w * std::log(product);
  }
  const double d = gain_distance(geom.macro_bs, geom.cellular_user);
  return weighted_log / weight_sum > std::log(d);
}

void write_gain_csv(std::ostream& os, const GainMatrix& gm, bool normalized) {
  const Eigen::MatrixXd& m = normalized ? gm.normalized() : gm.raw();
  const auto old_precision = os.precision(17);
  os << "# schema: gain_matrix v1 (" << (normalized ? "normalized" : "raw")
     << ")\n";
  os << "N," << gm.femto_count() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace femtopc
