#include "accm/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "accm/error.hpp"
#include "accm/numerics.hpp"

namespace accm {

namespace {

std::string describe(const VectorXd& x, const VectorXd& theta) {
  std::ostringstream os;
  os << "x = [" << x.transpose() << "], theta = [" << theta.transpose() << "]";
  return os.str();
}

}  // namespace

MetricSample evaluate_metric(const MetricField& field, const VectorXd& x, const VectorXd& theta) {
  MetricSample out;
  out.dual = field.dual(x, theta);
  if (out.dual.rows() != field.dim || out.dual.cols() != field.dim) {
    throw Error(ErrorKind::MetricError, "dual metric has wrong shape at " + describe(x, theta));
  }
  if (!out.dual.allFinite()) {
    throw Error(ErrorKind::MetricError, "dual metric is not finite at " + describe(x, theta));
  }
  const MatrixXd sym = 0.5 * (out.dual + out.dual.transpose());
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::MetricError,
                "dual metric is not positive definite at " + describe(x, theta));
  }
  out.metric = llt.solve(MatrixXd::Identity(field.dim, field.dim));
  out.metric = 0.5 * (out.metric + out.metric.transpose()).eval();
  return out;
}

MatrixXd metric_at(const MetricField& field, const VectorXd& x, const VectorXd& theta) {
  return evaluate_metric(field, x, theta).metric;
}

std::vector<MatrixXd> metric_dtheta(const MetricField& field, const VectorXd& x,
                                    const VectorXd& theta) {
  const MatrixXd M = metric_at(field, x, theta);
  std::vector<MatrixXd> out;
  if (field.param_dim == 0) return out;
  const auto dW = field.dual_dtheta(x, theta);
  out.reserve(dW.size());
  for (const auto& d : dW) out.push_back(-M * d * M);
  return out;
}

double overshoot_constant(const MetricField& field) {
  return std::sqrt(field.w_upper / field.w_lower);
}

MetricField identity_metric(int dim, int param_dim) {
  return constant_metric(MatrixXd::Identity(dim, dim), param_dim);
}

MetricField constant_metric(const MatrixXd& dual, int param_dim) {
  const int dim = static_cast<int>(dual.rows());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(dual);
  if (dual.rows() != dual.cols() || !dual.allFinite() || !dual.isApprox(dual.transpose()) ||
      !(eig.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorKind::MetricError, "constant_metric: W must be symmetric positive definite");
  }
  MetricField field;
  field.name = dual.isIdentity() ? "identity" : "constant";
  field.dim = dim;
  field.param_dim = param_dim;
  field.dual = [dual](const VectorXd&, const VectorXd&) { return dual; };
  field.dual_dx = [dim](const VectorXd&, const VectorXd&) {
    return std::vector<MatrixXd>(dim, MatrixXd::Zero(dim, dim));
  };
  field.dual_dtheta = [dim, param_dim](const VectorXd&, const VectorXd&) {
    return std::vector<MatrixXd>(param_dim, MatrixXd::Zero(dim, dim));
  };
  field.w_lower = eig.eigenvalues().minCoeff();
  field.w_upper = eig.eigenvalues().maxCoeff();
  return field;
}

MetricField metric_from_dual(std::string name, int dim, int param_dim,
                             std::function<MatrixXd(const VectorXd&, const VectorXd&)> dual,
                             double w_lower, double w_upper) {
  MetricField field;
  field.name = std::move(name);
  field.dim = dim;
  field.param_dim = param_dim;
  field.dual = dual;
  field.dual_dx = [dual, dim](const VectorXd& x, const VectorXd& theta) {
    std::vector<MatrixXd> out;
    out.reserve(dim);
    for (int i = 0; i < dim; ++i) {
      const double h = fd_step(x);
      VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      out.push_back((dual(xp, theta) - dual(xm, theta)) / (2.0 * h));
    }
    return out;
  };
  field.dual_dtheta = [dual, param_dim](const VectorXd& x, const VectorXd& theta) {
    std::vector<MatrixXd> out;
    out.reserve(param_dim);
    for (int i = 0; i < param_dim; ++i) {
      const double h = fd_step(theta);
      VectorXd tp = theta, tm = theta;
      tp(i) += h;
      tm(i) -= h;
      out.push_back((dual(x, tp) - dual(x, tm)) / (2.0 * h));
    }
    return out;
  };
  field.w_lower = w_lower;
  field.w_upper = w_upper;
  return field;
}

std::pair<double, double> scan_eigen_bounds(const MetricField& field,
                                            const std::vector<VectorXd>& xs,
                                            const std::vector<VectorXd>& thetas) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& x : xs) {
    for (const auto& th : thetas) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(field.dual(x, th), Eigen::EigenvaluesOnly);
      lo = std::min(lo, eig.eigenvalues().minCoeff());
      hi = std::max(hi, eig.eigenvalues().maxCoeff());
    }
  }
  return {lo, hi};
}

}  // namespace accm
