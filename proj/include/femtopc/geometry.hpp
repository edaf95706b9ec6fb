#pragma once

#include <cstdint>
#include <iosfwd>

#include <Eigen/Core>

namespace femtopc {

using Point = Eigen::Vector2d;

/// Fixed dimensions of the two-tier deployment, in meters.
struct LayoutParams {
  double cell_radius = 1000.0;
  double femto_radius = 30.0;
  double grid_size = 500.0;
};

/// Positions of every transmitter and receiver in one macrocell.
///
/// Index 0 is the macrocell (base station and its scheduled user); index
/// i >= 1 is femtocell i. Femtocell positions are stored column-wise.
struct NetworkGeometry {
  Point macro_bs = Point::Zero();
  double cell_radius = 0.0;
  Eigen::Matrix2Xd femto_aps;
  double femto_radius = 0.0;
  Point cellular_user = Point::Zero();
  Eigen::Matrix2Xd femto_users;
  double grid_extent = 0.0;

  Eigen::Index femto_count() const { return femto_aps.cols(); }

  /// Receiver position of base station i (0 = macrocell).
  Point base_station(Eigen::Index i) const {
    return i == 0 ? macro_bs : Point(femto_aps.col(i - 1));
  }
  /// Transmitter position of the user scheduled in cell j.
  Point user(Eigen::Index j) const {
    return j == 0 ? cellular_user : Point(femto_users.col(j - 1));
  }
};

/// Euclidean distance.
double distance(const Point& a, const Point& b);

/// Distance used in path-loss evaluation: clamped below at the 1 m
/// reference distance.
double gain_distance(const Point& a, const Point& b);

/// (N+1)x(N+1) matrix D with D(i, j) = distance from user j to base
/// station i, unclamped.
Eigen::MatrixXd distance_matrix(const NetworkGeometry& geom);

/// sqrt(N) x sqrt(N) femtocell grid centred at df_norm * R_c on the x axis.
///
/// Grid spacing is grid_size / (sqrt(N) - 1). APs are ordered column by
/// column (x outer, y inner). Femtocell user i (1-based) sits on its AP
/// circle at angle 2*pi*i/N. The cellular user is at (d_norm * R_c, 0).
NetworkGeometry make_grid_layout(int n_femto, double d_norm, double df_norm,
                                 const LayoutParams& params = {});

/// APs i.i.d. uniform on the disc of radius grid_size / sqrt(pi) centred at
/// (df_norm * R_c, 0); femtocell users at uniform random angles.
NetworkGeometry make_random_layout(int n_femto, double df_norm, double d_norm,
                                   std::uint64_t seed,
                                   const LayoutParams& params = {});

/// CSV export: id,x_m,y_m,kind.
void write_layout_csv(std::ostream& os, const NetworkGeometry& geom);

}  // namespace femtopc
