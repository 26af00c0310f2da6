#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <functional>

namespace accm {

/// Central-difference step 1e-6 * max(1, |x|).
inline double fd_step(const Eigen::VectorXd& x) {
  return 1e-6 * std::max(1.0, x.norm());
}

/// Central finite-difference Jacobian of a vector field.
inline Eigen::MatrixXd numerical_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& x, double step = 0.0) {
  const double h = step > 0.0 ? step : fd_step(x);
  const Eigen::VectorXd f0 = fn(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return J;
}

/// Sum_i A_i v_i, e.g. the directional derivative of a matrix field.
inline Eigen::MatrixXd contract(const std::vector<Eigen::MatrixXd>& slices,
                                const Eigen::VectorXd& v) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(slices.front().rows(), slices.front().cols());
  for (std::size_t i = 0; i < slices.size(); ++i) out += slices[i] * v(static_cast<Eigen::Index>(i));
  return out;
}

/// Symmetric part (A + A^T) / 2.
template <typename Derived>
Eigen::MatrixXd sym(const Eigen::MatrixBase<Derived>& A) {
  return 0.5 * (A + A.transpose());
}

}  // namespace accm
