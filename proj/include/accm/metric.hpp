#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace accm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Parameter-dependent Riemannian metric, described through its dual W = M^-1.
///
/// `dual_dx` returns dim matrices dW/dx_i and `dual_dtheta` returns param_dim
/// matrices dW/dtheta_i. `w_lower` / `w_upper` are uniform eigenvalue bounds of
/// W on the region of interest; they enter the tube-bound overshoot
/// R = sqrt(w_upper / w_lower).
struct MetricField {
  std::string name;
  int dim = 0;
  int param_dim = 0;
  std::function<MatrixXd(const VectorXd& x, const VectorXd& theta)> dual;
  std::function<std::vector<MatrixXd>(const VectorXd& x, const VectorXd& theta)> dual_dx;
  std::function<std::vector<MatrixXd>(const VectorXd& x, const VectorXd& theta)> dual_dtheta;
  double w_lower = 1.0;
  double w_upper = 1.0;
};

/// W and M = W^-1 at one point.
struct MetricSample {
  MatrixXd dual;
  MatrixXd metric;
};

/// Evaluates W and inverts it. Throws Error(MetricError) when W is not
/// symmetric positive definite or not finite.
MetricSample evaluate_metric(const MetricField& field, const VectorXd& x, const VectorXd& theta);

/// M(x, theta) only.
MatrixXd metric_at(const MetricField& field, const VectorXd& x, const VectorXd& theta);

/// dM/dtheta_i = -M (dW/dtheta_i) M for every parameter.
std::vector<MatrixXd> metric_dtheta(const MetricField& field, const VectorXd& x,
                                    const VectorXd& theta);

/// Overshoot constant sqrt(w_upper / w_lower).
double overshoot_constant(const MetricField& field);

/// Flat metric W = I of the given dimension.
MetricField identity_metric(int dim, int param_dim = 0);

/// Constant metric W = W0 (must be SPD).
MetricField constant_metric(const MatrixXd& dual, int param_dim = 0);

/// Wraps a dual-metric function, supplying central finite-difference
/// derivatives in x and theta.
MetricField metric_from_dual(std::string name, int dim, int param_dim,
                             std::function<MatrixXd(const VectorXd&, const VectorXd&)> dual,
                             double w_lower, double w_upper);

/// Scans W on the supplied sample points and returns the extreme eigenvalues
/// (min, max) seen.
std::pair<double, double> scan_eigen_bounds(const MetricField& field,
                                            const std::vector<VectorXd>& xs,
                                            const std::vector<VectorXd>& thetas);

}  // namespace accm
