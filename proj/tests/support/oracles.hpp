#pragma once

// Reference computations used only by tests. Each one takes a route
// independent of the library code it checks.

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "femtopc/channel.hpp"
#include "femtopc/random.hpp"

namespace oracle {

/// Largest eigenvalue modulus from a full dense eigendecomposition.
inline double dense_spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("EigenSolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// (I - A)^{-1} b as the truncated series sum_k A^k b.
inline Eigen::VectorXd neumann_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     double tol = 1e-12, int max_terms = 1000000) {
  Eigen::VectorXd term = b;
  Eigen::VectorXd sum = b;
  for (int k = 0; k < max_terms; ++k) {
    term = a * term;
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= tol * sum.cwiseAbs().maxCoeff()) return sum;
  }
  throw std::runtime_error("neumann_solve: series did not converge");
}

/// Boundary of a predicate that holds at lo and fails at hi.
inline double bisect(const std::function<bool(double)>& holds, double lo, double hi,
                     int iters = 200) {
  for (int k = 0; k < iters; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (holds(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Same boundary searched in log space, for ranges spanning decades.
inline double bisect_log(const std::function<bool(double)>& holds, double lo, double hi,
                         int iters = 200) {
  const double x = bisect([&](double e) { return holds(std::exp(e)); }, std::log(lo),
                          std::log(hi), iters);
  return std::exp(x);
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                  double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Pure power-law network with every femtocell alike: own link R_f, femto
/// users D_f from the macrocell, cellular user D_c from every AP and D from
/// its own BS, femtocells D_ff apart.
inline femtopc::GainMatrix symmetric_gains(int n, double D, double D_f, double D_c,
                                           double R_f, double D_ff, double alpha) {
  Eigen::MatrixXd raw = Eigen::MatrixXd::Constant(n + 1, n + 1, std::pow(D_ff, -alpha));
  raw(0, 0) = std::pow(D, -alpha);
  for (int i = 1; i <= n; ++i) {
    raw(0, i) = std::pow(D_f, -alpha);
    raw(i, 0) = std::pow(D_c, -alpha);
    raw(i, i) = std::pow(R_f, -alpha);
  }
  return femtopc::GainMatrix(raw);
}

/// n x n nonnegative matrix; each entry is nonzero with probability density.
inline Eigen::MatrixXd random_nonnegative(femtopc::Rng& rng, int n, double density) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (femtopc::uniform01(rng) < density) m(i, j) = femtopc::uniform01(rng);
    }
  }
  return m;
}

/// Raw gains with unit own links and log-uniform cross gains in
/// [10^lo_exp, 10^hi_exp].
inline femtopc::GainMatrix random_gains(femtopc::Rng& rng, int n_femto,
                                        double lo_exp = -4.0, double hi_exp = -1.0) {
  const int n = n_femto + 1;
  Eigen::MatrixXd raw(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      raw(i, j) = i == j ? 1.0 : std::pow(10.0, femtopc::uniform(rng, lo_exp, hi_exp));
    }
  }
  return femtopc::GainMatrix(raw);
}

}  // namespace oracle
