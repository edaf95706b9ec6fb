#include "femtopc/geometry.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "femtopc/random.hpp"

namespace femtopc {

namespace {

Point on_circle(const Point& centre, double radius, double angle) {
  return centre + radius * Point(std::cos(angle), std::sin(angle));
}

void check_fraction(double x, const char* name) {
  if (!(x > 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
  }
}

}  // namespace

double distance(const Point& a, const Point& b) { return (a - b).norm(); }

double gain_distance(const Point& a, const Point& b) {
  return std::max(distance(a, b), 1.0);
}

Eigen::MatrixXd distance_matrix(const NetworkGeometry& geom) {
  const Eigen::Index n = geom.femto_count() + 1;
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point bs = geom.base_station(i);
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = distance(bs, geom.user(j));
  }
  return d;
}

NetworkGeometry make_grid_layout(int n_femto, double d_norm, double df_norm,
                                 const LayoutParams& params) {
  if (n_femto < 1) throw std::invalid_argument("n_femto must be >= 1");
  const int side = static_cast<int>(std::lround(std::sqrt(n_femto)));
  if (side * side != n_femto) {
    throw std::invalid_argument("grid layout needs a perfect-square n_femto");
  }
  check_fraction(d_norm, "d_norm");
  check_fraction(df_norm, "df_norm");

  NetworkGeometry geom;
  geom.cell_radius = params.cell_radius;
  geom.femto_radius = params.femto_radius;
  geom.grid_extent = params.grid_size;
  geom.cellular_user = Point(d_norm * params.cell_radius, 0.0);
  geom.femto_aps.resize(2, n_femto);
  geom.femto_users.resize(2, n_femto);

  const Point centre(df_norm * params.cell_radius, 0.0);
  const double spacing = side > 1 ? params.grid_size / (side - 1) : 0.0;
  const double start = side > 1 ? -0.5 * params.grid_size : 0.0;
  for (int col = 0; col < side; ++col) {
    for (int row = 0; row < side; ++row) {
      const int k = col * side + row;
      const Point ap = centre + Point(start + col * spacing, start + row * spacing);
      geom.femto_aps.col(k) = ap;
      const double angle = 2.0 * std::numbers::pi * (k + 1) / n_femto;
      geom.femto_users.col(k) = on_circle(ap, params.femto_radius, angle);
    }
  }
  return geom;
}

NetworkGeometry make_random_layout(int n_femto, double df_norm, double d_norm,
                                   std::uint64_t seed,
                                   const LayoutParams& params) {
  if (n_femto < 1) throw std::invalid_argument("n_femto must be >= 1");
  check_fraction(d_norm, "d_norm");
  check_fraction(df_norm, "df_norm");

  NetworkGeometry geom;
  geom.cell_radius = params.cell_radius;
  geom.femto_radius = params.femto_radius;
  geom.grid_extent = params.grid_size;
  geom.cellular_user = Point(d_norm * params.cell_radius, 0.0);
  geom.femto_aps.resize(2, n_femto);
  geom.femto_users.resize(2, n_femto);

  Rng rng(seed);
  const Point centre(df_norm * params.cell_radius, 0.0);
  const double disc_radius = params.grid_size / std::sqrt(std::numbers::pi);
  for (int k = 0; k < n_femto; ++k) {
    const double r = disc_radius * std::sqrt(uniform01(rng));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    const Point ap = on_circle(centre, r, phi);
    geom.femto_aps.col(k) = ap;
    const double angle = 2.0 * std::numbers::pi * uniform01(rng);
    geom.femto_users.col(k) = on_circle(ap, params.femto_radius, angle);
  }
  return geom;
}

void write_layout_csv(std::ostream& os, const NetworkGeometry& geom) {
  const auto old_precision = os.precision(12);
  os << "# schema: layout v1\n";
  os << "id,x_m,y_m,kind\n";
  os << 0 << ',' << geom.macro_bs.x() << ',' << geom.macro_bs.y() << ",macro_bs\n";
  os << 0 << ',' << geom.cellular_user.x() << ',' << geom.cellular_user.y()
     << ",cell_user\n";
  for (Eigen::Index k = 0; k < geom.femto_count(); ++k) {
    os << k + 1 << ',' << geom.femto_aps(0, k) << ',' << geom.femto_aps(1, k)
       << ",femto_ap\n";
    os << k + 1 << ',' << geom.femto_users(0, k) << ',' << geom.femto_users(1, k)
       << ",femto_user\n";
  }
  os.precision(old_precision);
}

}  // namespace femtopc
