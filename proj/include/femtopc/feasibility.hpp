#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "femtopc/channel.hpp"
#include "femtopc/errors.hpp"
#include "femtopc/units.hpp"

namespace femtopc {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Minimum SINR targets (linear): one for the cellular user, one per
/// femtocell.
struct SinrTargets {
  double gamma_c = 1.0;
  Eigen::VectorXd gamma_f;

  Eigen::Index femto_count() const { return gamma_f.size(); }

  /// (N+1)-vector [gamma_c, gamma_f...], the diagonal of Gamma.
  Eigen::VectorXd diagonal() const {
    Eigen::VectorXd d(gamma_f.size() + 1);
    d << gamma_c, gamma_f;
    return d;
  }

  static SinrTargets from_db(double gamma_c_dB, const Eigen::VectorXd& gamma_f_dB) {
    return {db_to_linear(gamma_c_dB), db_to_linear(gamma_f_dB.array()).matrix()};
  }
};

/// AWGN power and the normalized noise vector eta_i = sigma^2 Gamma_i / g_ii.
struct NoiseModel {
  double sigma2 = 0.0;
  Eigen::VectorXd eta;

  NoiseModel(double noise_power, const Eigen::VectorXd& targets,
             const GainMatrix& gm)
      : sigma2(noise_power),
        eta(noise_power * targets.cwiseQuotient(gm.raw().diagonal())) {
    if (!(noise_power > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
  }
};

template <typename Scalar>
struct PerronRoot {
  Scalar rho = 0;
  Vector<Scalar> vector;  ///< nonnegative, unit 1-norm
  int iterations = 0;
};

/// Perron root of a nonnegative square matrix by shifted power iteration.
///
/// Iterates x <- (M + s_k I) x with s_k the current Collatz-Wielandt upper
/// bound. Shifting keeps x strictly positive and damps the peripheral
/// eigenvalues of periodic (e.g. bipartite) matrices, and never moves the
/// Perron eigenvector. Stops when the Collatz-Wielandt bracket
/// min_i (Mx)_i/x_i <= rho <= max_i (Mx)_i/x_i closes to tol relative, or,
/// for reducible matrices whose bracket need not close, when the residual
/// ||Mv - rho v||_inf has fallen well below tol ||M||_inf ||v||_inf.
template <typename Derived>
PerronRoot<typename Derived::Scalar> spectral_radius(
    const Eigen::MatrixBase<Derived>& m,
    typename Derived::Scalar tol = typename Derived::Scalar(1e-10),
    int max_iter = 100000) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = m.rows();
  if (n != m.cols() || n == 0) {
    throw std::invalid_argument("spectral_radius: matrix must be square");
  }
  if ((m.array() < Scalar(0)).any()) {
    throw std::invalid_argument("spectral_radius: matrix must be nonnegative");
  }
  const Matrix<Scalar> a = m;
  const Scalar norm_inf = a.rowwise().sum().maxCoeff();

  PerronRoot<Scalar> out;
  out.vector = Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  if (norm_inf == Scalar(0)) return out;

  Vector<Scalar> x = out.vector;
  Scalar shift = norm_inf;
  Scalar prev_estimate = std::numeric_limits<Scalar>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const Vector<Scalar> ax = a * x;
    const Scalar estimate = ax.sum() / x.sum();
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = Scalar(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x(i) > Scalar(0)) {
        const Scalar r = ax(i) / x(i);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      } else {
        lo = Scalar(0);
      }
    }

    out.rho = estimate;
    out.vector = x;
    out.iterations = it;
    if (hi - lo <= tol * hi) {
      out.rho = std::clamp(estimate, lo, hi);
      return out;
    }
    const Scalar residual = (ax - estimate * x).cwiseAbs().maxCoeff();
    if (residual <= Scalar(1e-3) * tol * norm_inf * x.maxCoeff() &&
        std::abs(estimate - prev_estimate) <= tol * std::max(estimate, Scalar(1e-300))) {
      return out;
    }
    prev_estimate = estimate;

    shift = std::max(hi, std::numeric_limits<Scalar>::min());
    x = ax + shift * x;
    x /= x.sum();
  }
  throw ConvergenceError("spectral_radius: no convergence",
                         static_cast<double>(out.rho),
                         out.vector.template cast<double>());
}

/// True when the directed graph of positive entries is strongly connected.
template <typename Derived>
bool is_irreducible(const Eigen::MatrixBase<Derived>& m) {
  const Eigen::Index n = m.rows();
  if (n <= 1) return true;
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!stack.empty()) {
      const Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        const auto w = transpose ? m(v, u) : m(u, v);
        if (w > 0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

struct FeasibilityReport {
  bool feasible = false;
  double rho = 0.0;
};

/// rho(Gamma G) < 1.
inline FeasibilityReport is_feasible(const Eigen::VectorXd& targets,
                                     const GainMatrix& gm) {
  const double rho = spectral_radius(targets.asDiagonal() * gm.normalized()).rho;
  return {rho < 1.0, rho};
}

inline FeasibilityReport is_feasible(const SinrTargets& targets,
                                     const GainMatrix& gm) {
  return is_feasible(targets.diagonal(), gm);
}

/// Pareto-minimal powers p* = (I - Gamma G)^{-1} eta meeting every target
/// with equality. Throws InfeasibleTargets when rho(Gamma G) >= 1.
inline Eigen::VectorXd solve_centralized(const Eigen::VectorXd& targets,
                                         const GainMatrix& gm,
                                         const NoiseModel& noise) {
  const Eigen::MatrixXd gamma_g = targets.asDiagonal() * gm.normalized();
  const double rho = spectral_radius(gamma_g).rho;
  if (!(rho < 1.0)) {
    throw InfeasibleTargets("solve_centralized: rho(Gamma G) >= 1", rho);
  }
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(gamma_g.rows(), gamma_g.cols()) - gamma_g;
  const Eigen::VectorXd p = system.partialPivLu().solve(noise.eta);
  const double residual = (system * p - noise.eta).cwiseAbs().maxCoeff();
  if (residual > 1e-9 * noise.eta.cwiseAbs().maxCoeff()) {
    throw std::runtime_error("solve_centralized: residual check failed");
  }
  return p;
}

inline Eigen::VectorXd solve_centralized(const SinrTargets& targets,
                                         const GainMatrix& gm, double sigma2) {
  const Eigen::VectorXd diag = targets.diagonal();
  return solve_centralized(diag, gm, NoiseModel(sigma2, diag, gm));
}

/// Largest common SIR 1/rho(G); +inf when rho(G) == 0.
template <typename Derived>
typename Derived::Scalar max_min_sir(const Eigen::MatrixBase<Derived>& g) {
  using Scalar = typename Derived::Scalar;
  const Scalar rho = spectral_radius(g).rho;
  return rho > Scalar(0) ? Scalar(1) / rho : std::numeric_limits<Scalar>::infinity();
}

/// Achieved SINRs p_i g_ii / (sum_{j != i} p_j g_ij + sigma^2).
inline Eigen::VectorXd achieved_sinr(const Eigen::VectorXd& p,
                                     const GainMatrix& gm, double sigma2) {
  const Eigen::VectorXd received = gm.raw() * p;
  const Eigen::VectorXd signal = gm.raw().diagonal().cwiseProduct(p);
  const Eigen::VectorXd interference =
      (received - signal).array() + sigma2;
  return signal.cwiseQuotient(interference);
}

}  // namespace femtopc
