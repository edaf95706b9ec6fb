#pragma once

#include <cmath>
#include <concepts>

#include <Eigen/Core>

namespace femtopc {

template <std::floating_point Scalar>
inline Scalar db_to_linear(Scalar db) {
  return std::pow(Scalar(10), db / Scalar(10));
}

template <std::floating_point Scalar>
inline Scalar linear_to_db(Scalar x) {
  return Scalar(10) * std::log10(x);
}

template <std::floating_point Scalar>
inline Scalar watts_to_dbm(Scalar w) {
  return linear_to_db(w) + Scalar(30);
}

/// Elementwise dB -> linear on an Eigen vector expression.
template <typename Derived>
inline auto db_to_linear(const Eigen::ArrayBase<Derived>& db) {
  using Scalar = typename Derived::Scalar;
  return (db * (std::log(Scalar(10)) / Scalar(10))).exp();
}

template <typename Derived>
inline auto linear_to_db(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Scalar(10) * x.log10();
}

}  // namespace femtopc
