#include "accm/verify.hpp"

#include <cmath>
#include <limits>

#include "accm/error.hpp"
#include "accm/numerics.hpp"

namespace accm {

void VerificationGrid::validate(int n, int p) const {
  if (static_cast<int>(x_axes.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, "verification grid: need one x axis per state");
  }
  if (static_cast<int>(theta_axes.size()) != p) {
    throw Error(ErrorKind::InvalidArgument,
                "verification grid: need one theta axis per metric parameter");
  }
  auto check = [](const GridAxis& a) {
    if (!std::isfinite(a.lower) || !std::isfinite(a.upper) || a.lower > a.upper) {
      throw Error(ErrorKind::InvalidArgument, "verification grid: invalid axis range");
    }
    if (a.count < 1 || (a.lower < a.upper && a.count < 2)) {
      throw Error(ErrorKind::InvalidArgument,
                  "verification grid: active axes need at least 2 samples");
    }
  };
  for (const auto& a : x_axes) check(a);
  for (const auto& a : theta_axes) check(a);
  if (!(eps_psd >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "verification grid: eps_psd must be >= 0");
  }
}

long long VerificationGrid::size() const {
  long long total = 1;
  for (const auto& a : x_axes) total *= a.count;
  for (const auto& a : theta_axes) total *= a.count;
  return total;
}

void VerificationGrid::point(long long flat, VectorXd& x, VectorXd& theta) const {
  x.resize(static_cast<Eigen::Index>(x_axes.size()));
  theta.resize(static_cast<Eigen::Index>(theta_axes.size()));
  for (int i = static_cast<int>(theta_axes.size()) - 1; i >= 0; --i) {
    const auto& a = theta_axes[i];
    theta(i) = a.value(static_cast<int>(flat % a.count));
    flat /= a.count;
  }
  for (int i = static_cast<int>(x_axes.size()) - 1; i >= 0; --i) {
    const auto& a = x_axes[i];
    x(i) = a.value(static_cast<int>(flat % a.count));
    flat /= a.count;
  }
}

VerificationGrid example_grid() {
  VerificationGrid grid;
  grid.x_axes = {{-3.0, 3.0, 61}, {0.0, 0.0, 1}, {0.0, 0.0, 1}};
  grid.theta_axes = {{-2.0, 2.0, 41}};
  grid.eps_psd = 1e-8;
  return grid;
}

MatrixXd annihilator(const MatrixXd& B) {
  Eigen::JacobiSVD<MatrixXd> svd(B, Eigen::ComputeFullU);
  const int rank = numerical_rank(B, 1e-12);
  return svd.matrixU().rightCols(B.rows() - rank);
}

double dual_ccm_eigenvalue(const SystemModel& model, const MetricField& metric,
                           const VectorXd& x, const VectorXd& theta, double lambda,
                           const VectorXd* theta_m) {
  const MatrixXd W = evaluate_metric(metric, x, theta).dual;

  VectorField total = [&model, &theta, theta_m](const VectorXd& y) -> VectorXd {
    VectorXd out = drift(model, y, theta);
    if (theta_m != nullptr && model.p_m > 0) {
      out -= model.B(y) * (model.phi(y).transpose() * *theta_m);
    }
    return out;
  };
  MatrixXd A = drift_jacobian(model, x);
  if (model.p_em > 0) {
    A -= numerical_jacobian(
        [&model, &theta](const VectorXd& y) -> VectorXd {
          return model.varrho(y).transpose() * theta;
        },
        x);
  }
  if (theta_m != nullptr && model.p_m > 0) {
    A -= numerical_jacobian(
        [&model, theta_m](const VectorXd& y) -> VectorXd {
          return model.B(y) * (model.phi(y).transpose() * *theta_m);
        },
        x);
  }
  const MatrixXd Wdot = contract(metric.dual_dx(x, theta), total(x));
  const MatrixXd Bp = annihilator(model.B(x));
  if (Bp.cols() == 0) return -std::numeric_limits<double>::infinity();
  const MatrixXd S = Bp.transpose() * (W * A.transpose() + A * W - Wdot + 2.0 * lambda * W) * Bp;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym(S), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

namespace {

ContractionReport scan(const SystemModel& model, const MetricField& metric,
                       const VerificationGrid& grid, double lambda, const VectorXd* theta_m) {
  grid.validate(model.n, metric.param_dim);
  ContractionReport report;
  report.lambda = lambda;
  report.max_eigenvalue = -std::numeric_limits<double>::infinity();
  VectorXd x, theta;
  const long long total = grid.size();
  for (long long i = 0; i < total; ++i) {
    grid.point(i, x, theta);
    const double ev = dual_ccm_eigenvalue(model, metric, x, theta, lambda, theta_m);
    if (ev > report.max_eigenvalue) {
      report.max_eigenvalue = ev;
      report.worst_index = i;
      report.worst_x = x;
      report.worst_theta = theta;
    }
  }
  report.pass = report.max_eigenvalue <= grid.eps_psd;
  return report;
}

}  // namespace

double certify_rate(const SystemModel& model, const MetricField& metric,
                    const VerificationGrid& grid, double lo, double hi, double resolution,
                    const VectorXd* theta_m) {
  auto passes = [&](double lambda) { return scan(model, metric, grid, lambda, theta_m).pass; };
  if (!passes(lo)) return lo;
  if (passes(hi)) return hi;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

ContractionReport check_dual_ccm(const SystemModel& model, const MetricField& metric,
                                 const VerificationGrid& grid, double lambda) {
  ContractionReport report = scan(model, metric, grid, lambda, nullptr);
  report.lambda_certified = certify_rate(model, metric, grid);
  return report;
}

double check_killing(const SystemModel& model, const MetricField& metric,
                     const VerificationGrid& grid) {
  grid.validate(model.n, metric.param_dim);
  double worst = 0.0;
  VectorXd x, theta;
  for (long long i = 0; i < grid.size(); ++i) {
    grid.point(i, x, theta);
    const MatrixXd W = evaluate_metric(metric, x, theta).dual;
    const auto dW = metric.dual_dx(x, theta);
    const MatrixXd B = model.B(x);
    const auto dB = input_jacobians(model, x);
    for (int k = 0; k < model.m; ++k) {
      const MatrixXd R = -contract(dW, B.col(k)) + W * dB[k].transpose() + dB[k] * W;
      worst = std::max(worst, R.norm());
    }
  }
  return worst;
}

double check_lemma4_identity(const SystemModel& model, const MetricField& metric,
                             const VerificationGrid& grid) {
  grid.validate(model.n, metric.param_dim);
  if (model.p_em == 0) return 0.0;
  if (metric.param_dim != model.p_em) {
    throw Error(ErrorKind::InvalidArgument,
                "check_lemma4_identity: metric parameters must match extended-matched parameters");
  }
  double worst = 0.0;
  VectorXd x, theta;
  for (long long i = 0; i < grid.size(); ++i) {
    grid.point(i, x, theta);
    const MatrixXd M = metric_at(metric, x, theta);
    const auto dM = metric_dtheta(metric, x, theta);
    const VectorXd bk = model.B(x) * model.indicator;
    const VectorXd r1 = model.varrho_dx1(x);
    for (int j = 0; j < model.p_em; ++j) {
      VectorXd r = VectorXd::Zero(model.n);
      r(0) = r1(j);
      const MatrixXd R = dM[j] + 2.0 * sym(M * bk * r.transpose());
      worst = std::max(worst, R.norm());
    }
  }
  return worst;
}

InvarianceReport check_matched_invariance(const SystemModel& model, const MetricField& metric,
                                          const VerificationGrid& grid, double lambda,
                                          const std::vector<VectorXd>& theta_samples) {
  InvarianceReport out;
  out.nominal = scan(model, metric, grid, lambda, nullptr);
  out.pass = true;
  for (const auto& th : theta_samples) {
    if (th.size() != model.p_m) {
      throw Error(ErrorKind::InvalidArgument,
                  "check_matched_invariance: matched parameter sample has wrong size");
    }
    out.perturbed.push_back(scan(model, metric, grid, lambda, &th));
    out.pass = out.pass && out.perturbed.back().pass == out.nominal.pass;
  }
  return out;
}

}  // namespace accm
