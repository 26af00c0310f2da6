#include "accm/system.hpp"

#include <algorithm>

#include "accm/error.hpp"
#include "accm/numerics.hpp"

namespace accm {

namespace {

void expect_shape(const MatrixXd& A, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (A.rows() != rows || A.cols() != cols) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("system model: ") + what + " has shape " + std::to_string(A.rows()) +
                    "x" + std::to_string(A.cols()) + ", expected " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
}

// Residual of projecting v onto the column span of A.
double span_residual(const MatrixXd& A, const VectorXd& v) {
  if (A.cols() == 0) return v.norm();
  const VectorXd coeffs = A.completeOrthogonalDecomposition().solve(v);
  return (A * coeffs - v).norm();
}

}  // namespace

void SystemModel::validate(const VectorXd& x) const {
  if (n <= 0 || m <= 0 || p_m < 0 || p_em < 0) {
    throw Error(ErrorKind::InvalidArgument, "system model: invalid dimensions");
  }
  expect_shape(f(x), n, 1, "f");
  expect_shape(B(x), n, m, "B");
  if (p_m > 0) expect_shape(phi(x), p_m, m, "phi");
  if (p_em > 0) {
    expect_shape(varrho(x), p_em, n, "varrho");
    expect_shape(varrho_dx1(x), p_em, 1, "varrho_dx1");
  }
  expect_shape(indicator, m, 1, "indicator");
  expect_shape(theta_true_m, p_m, 1, "theta_true_m");
  expect_shape(theta_true_em, p_em, 1, "theta_true_em");
}

VectorXd drift(const SystemModel& model, const VectorXd& x, const VectorXd& theta_em) {
  VectorXd out = model.f(x);
  if (model.p_em > 0) out -= model.varrho(x).transpose() * theta_em;
  return out;
}

VectorXd dynamics(const SystemModel& model, const VectorXd& x, const VectorXd& u,
                  const VectorXd& theta_m, const VectorXd& theta_em) {
  VectorXd input = u;
  if (model.p_m > 0) input -= model.phi(x).transpose() * theta_m;
  return drift(model, x, theta_em) + model.B(x) * input;
}

MatrixXd drift_jacobian(const SystemModel& model, const VectorXd& x) {
  if (model.f_jacobian) return model.f_jacobian(x);
  return numerical_jacobian(model.f, x);
}

std::vector<MatrixXd> input_jacobians(const SystemModel& model, const VectorXd& x) {
  if (model.b_jacobian) return model.b_jacobian(x);
  std::vector<MatrixXd> out;
  out.reserve(model.m);
  for (int i = 0; i < model.m; ++i) {
    out.push_back(numerical_jacobian([&](const VectorXd& y) -> VectorXd { return model.B(y).col(i); },
                                     x));
  }
  return out;
}

VectorXd ad(const VectorField& f, const VectorField& g, const VectorXd& x) {
  return numerical_jacobian(f, x) * g(x) - numerical_jacobian(g, x) * f(x);
}

MatrixXd ad_f_B(const SystemModel& model, const VectorXd& x) {
  const MatrixXd A = drift_jacobian(model, x);
  const MatrixXd B = model.B(x);
  const VectorXd fx = model.f(x);
  const auto dB = input_jacobians(model, x);
  MatrixXd out(model.n, model.m);
  for (int i = 0; i < model.m; ++i) out.col(i) = A * B.col(i) - dB[i] * fx;
  return out;
}

MatrixXd controllability_matrix(const SystemModel& model, const VectorXd& x) {
  MatrixXd C(model.n, model.n * model.m);
  for (int i = 0; i < model.m; ++i) {
    VectorField g = [&model, i](const VectorXd& y) -> VectorXd { return model.B(y).col(i); };
    C.col(i * model.n) = g(x);
    for (int k = 1; k < model.n; ++k) {
      // nested brackets are built on finite differences of finite differences,
      // so use a coarser step at each level
      VectorField prev = g;
      const double h = 1e-4;
      g = [&model, prev, h](const VectorXd& y) -> VectorXd {
        const MatrixXd A = numerical_jacobian(model.f, y, h);
        const MatrixXd dg = numerical_jacobian(prev, y, h);
        return A * prev(y) - dg * model.f(y);
      };
      C.col(i * model.n + k) = g(x);
    }
  }
  return C;
}

int numerical_rank(const MatrixXd& A, double rel_tol) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

MatchingReport check_matching(const SystemModel& model, const std::vector<VectorXd>& samples) {
  MatchingReport report;
  for (const auto& x : samples) {
    if (!x.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "check_matching: non-finite sample");
    }
    MatchingSample s;
    s.x = x;
    const MatrixXd B = model.B(x);
    if (model.p_m > 0) {
      const MatrixXd phi = model.phi(x);
      for (int i = 0; i < model.p_m; ++i) {
        const VectorXd dir = B * phi.row(i).transpose();
        s.matched_residual = std::max(s.matched_residual, span_residual(B, dir));
      }
    }
    const MatrixXd adB = ad_f_B(model, x);
    if (model.p_em > 0) {
      const MatrixXd rho = model.varrho(x);
      for (int i = 0; i < model.p_em; ++i) {
        s.extended_residual =
            std::max(s.extended_residual, span_residual(adB, rho.row(i).transpose()));
      }
    }
    MatrixXd stacked(model.n, 2 * model.m);
    stacked << B, adB;
    s.independent = numerical_rank(stacked, 1e-9) == std::min<int>(model.n, 2 * model.m);
    report.max_matched_residual = std::max(report.max_matched_residual, s.matched_residual);
    report.max_extended_residual = std::max(report.max_extended_residual, s.extended_residual);
    report.all_independent = report.all_independent && s.independent;
    report.samples.push_back(std::move(s));
  }
  return report;
}

}  // namespace accm
