#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace femtopc {

/// Power iteration ran out of budget. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate,
                   Eigen::VectorXd last_vector)
      : std::runtime_error(what),
        last_estimate_(last_estimate),
        last_vector_(std::move(last_vector)) {}

  double last_estimate() const { return last_estimate_; }
  const Eigen::VectorXd& last_vector() const { return last_vector_; }

 private:
  double last_estimate_;
  Eigen::VectorXd last_vector_;
};

/// SINR targets admit no nonnegative power allocation, or a spectral-radius
/// precondition failed. Carries the offending spectral radius.
class InfeasibleTargets : public std::domain_error {
 public:
  InfeasibleTargets(const std::string& what, double rho)
      : std::domain_error(what), rho_(rho) {}

  double rho() const { return rho_; }

 private:
  double rho_;
};

}  // namespace femtopc
