#include "accm/example_system.hpp"

#include <cmath>

namespace accm::example {

SystemModel make_system() {
  SystemModel model;
  model.name = kSystemName;
  model.n = 3;
  model.m = 1;
  model.p_m = 2;
  model.p_em = 1;
  model.f = [](const VectorXd& x) -> VectorXd {
    return (VectorXd(3) << x(2), x(0) * x(0) - x(1), std::tanh(x(1))).finished();
  };
  model.B = [](const VectorXd&) -> MatrixXd { return (MatrixXd(3, 1) << 0, 0, 1).finished(); };
  model.phi = [](const VectorXd& x) -> MatrixXd {
    return (MatrixXd(2, 1) << x(2), x(0) * x(0)).finished();
  };
  model.varrho = [](const VectorXd& x) -> MatrixXd {
    return (MatrixXd(1, 3) << x(0), 0, 0).finished();
  };
  model.varrho_dx1 = [](const VectorXd&) -> VectorXd { return VectorXd::Ones(1); };
  model.indicator = VectorXd::Ones(1);
  model.theta_true_m = (VectorXd(2) << -0.5, -1.5).finished();
  model.theta_true_em = (VectorXd(1) << -1.0).finished();
  model.f_jacobian = [](const VectorXd& x) -> MatrixXd {
    const double sech = 1.0 / std::cosh(x(1));
    MatrixXd J = MatrixXd::Zero(3, 3);
    J(0, 2) = 1.0;
    J(1, 0) = 2.0 * x(0);
    J(1, 1) = -1.0;
    J(2, 1) = sech * sech;
    return J;
  };
  model.b_jacobian = [](const VectorXd&) {
    return std::vector<MatrixXd>{MatrixXd::Zero(3, 3)};
  };
  return model;
}

MatrixXd dual_metric(double x1, double th1) {
  MatrixXd W(3, 3);
  W << 1.42, 0.0, 1.42 * (th1 - 1.0),
       0.0, 6.21, -2.85 * x1,
       1.42 * (th1 - 1.0), -2.85 * x1, 1.42 * th1 * th1 - 2.84 * th1 + 1.30 * x1 * x1 + 5.79;
  return W;
}

MatrixXd dual_metric_dx1(double x1, double) {
  MatrixXd D = MatrixXd::Zero(3, 3);
  D(1, 2) = D(2, 1) = -2.85;
  D(2, 2) = 2.60 * x1;
  return D;
}

MatrixXd dual_metric_dth1(double, double th1) {
  MatrixXd D = MatrixXd::Zero(3, 3);
  D(0, 2) = D(2, 0) = 1.42;
  D(2, 2) = 2.84 * th1 - 2.84;
  return D;
}

MetricField make_metric() {
  MetricField field;
  field.name = kSystemName;
  field.dim = 3;
  field.param_dim = 1;
  field.dual = [](const VectorXd& x, const VectorXd& th) { return dual_metric(x(0), th(0)); };
  field.dual_dx = [](const VectorXd& x, const VectorXd& th) {
    return std::vector<MatrixXd>{dual_metric_dx1(x(0), th(0)), MatrixXd::Zero(3, 3),
                                 MatrixXd::Zero(3, 3)};
  };
  field.dual_dtheta = [](const VectorXd& x, const VectorXd& th) {
    return std::vector<MatrixXd>{dual_metric_dth1(x(0), th(0))};
  };
  std::vector<VectorXd> xs;
  std::vector<VectorXd> thetas;
  for (int i = 0; i <= 120; ++i) xs.push_back(VectorXd::Constant(1, -3.0 + 0.05 * i).replicate(3, 1));
  for (int j = 0; j <= 80; ++j) thetas.push_back(VectorXd::Constant(1, -2.0 + 0.05 * j));
  const auto [lo, hi] = scan_eigen_bounds(field, xs, thetas);
  field.w_lower = lo;
  field.w_upper = hi;
  return field;
}

}  // namespace accm::example
