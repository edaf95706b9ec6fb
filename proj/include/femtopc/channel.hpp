#pragma once

#include <iosfwd>
#include <limits>

#include <Eigen/Core>

#include "femtopc/geometry.hpp"

namespace femtopc {

/// Where a femtocell user's cross-tier and cross-femtocell links start.
enum class CrossLinkOrigin {
  User,         ///< the user's own position on its AP circle
  AccessPoint,  ///< the user's AP (R_f enters only the own-link gain)
};

/// Path-loss model parameters. Losses are in dB and applied as attenuation
/// (a loss of x dB multiplies the gain by 10^(-x/10)).
struct PropagationParams {
  double alpha_c = 4.0;   ///< outdoor exponent, cellular user links
  double alpha_fo = 4.0;  ///< outdoor exponent, femtocell user to other BS
  double beta = 3.0;      ///< indoor exponent
  double K_c_dB = cellular_loss_db(2000.0);
  double K_fi_dB = 37.0;
  double K_fo_dB = cellular_loss_db(2000.0);
  double W_dB = 5.0;  ///< partition (wall) loss
  double f_MHz = 2000.0;
  CrossLinkOrigin cross_link_origin = CrossLinkOrigin::User;

  /// Fixed cellular loss 30 log10(f_MHz) - 71.
  static double cellular_loss_db(double f_MHz);

  /// Defaults with K_c and K_fo derived from the carrier frequency.
  static PropagationParams at_frequency(double f_MHz);

  /// Same parameters with alpha_c = alpha_fo = alpha.
  PropagationParams with_outdoor_exponent(double alpha) const;
};

/// Raw and normalized uplink gain matrices of an (N+1)-cell network.
///
/// raw(i, j) is the gain from user j to base station i. The normalized
/// matrix G has G(i, j) = raw(i, j) / raw(i, i) off the diagonal and zeros on
/// it, and splits into
///
///     G = [ 0    q_c^T ]
///         [ q_f  F     ]
class GainMatrix {
 public:
  GainMatrix() = default;

  /// Throws std::invalid_argument on a non-square, negative, non-finite or
  /// zero-diagonal input.
  explicit GainMatrix(Eigen::MatrixXd raw);

  Eigen::Index size() const { return raw_.rows(); }
  Eigen::Index femto_count() const { return raw_.rows() - 1; }

  const Eigen::MatrixXd& raw() const { return raw_; }
  const Eigen::MatrixXd& normalized() const { return normalized_; }

  double raw(Eigen::Index i, Eigen::Index j) const { return raw_(i, j); }

  /// Femtocell-to-femtocell block.
  auto F() const {
    return normalized_.bottomRightCorner(femto_count(), femto_count());
  }
  /// Femtocell users into the macrocell: [G_01 ... G_0N]^T.
  auto q_c() const { return normalized_.row(0).tail(femto_count()).transpose(); }
  /// Cellular user into each femtocell: [G_10 ... G_N0]^T.
  auto q_f() const { return normalized_.col(0).tail(femto_count()); }

 private:
  Eigen::MatrixXd raw_;
  Eigen::MatrixXd normalized_;
};

/// Gain from user j to base station i under the five-case path-loss model.
double gain(Eigen::Index i, Eigen::Index j, const NetworkGeometry& geom,
            const PropagationParams& params);

GainMatrix build_gain_matrix(const NetworkGeometry& geom,
                             const PropagationParams& params);

struct LinkBudget {
  double linear = std::numeric_limits<double>::infinity();
  double dB = std::numeric_limits<double>::infinity();

  bool unbounded() const { return linear == std::numeric_limits<double>::infinity(); }
};

/// L = 1 / (q_c^T q_f). A zero product reports an unbounded budget.
LinkBudget link_budget(const GainMatrix& gm);

/// Closed-form link budget for equal outdoor exponents (alpha_c == alpha_fo),
/// evaluated from distances rather than from the assembled matrix.
LinkBudget link_budget_closed_form(const NetworkGeometry& geom,
                                   const PropagationParams& params);

/// True when the dB link budget increases with the common outdoor exponent
/// at `alpha`: the interference-weighted mean of ln(D_0i D_i0) exceeds ln D.
bool link_budget_slope_check(const NetworkGeometry& geom,
                             const PropagationParams& params, double alpha);

/// CSV export: schema line, "N,<n>" line, then the dense matrix row-major
/// (raw gains, or G when `normalized` is set).
void write_gain_csv(std::ostream& os, const GainMatrix& gm,
                    bool normalized = false);

}  // namespace femtopc
