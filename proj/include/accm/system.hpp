#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace accm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using VectorField = std::function<VectorXd(const VectorXd&)>;
using MatrixField = std::function<MatrixXd(const VectorXd&)>;

/// Uncertain control-affine system
///
///   xdot = f(x) - varrho(x)^T theta_em + B(x) [u - phi(x)^T theta_m].
///
/// Shapes: B is n x m, phi is p_m x m (column i feeds input channel i),
/// varrho is p_em x n (row i is varrho_i). `varrho_dx1(x)(i)` is the
/// x1-derivative of the leading entry of varrho_i, the non-zero entry of the
/// row vector r_i = [d varrho_i / d x1, 0, ..., 0]. `indicator` selects the
/// input column b_k = B * indicator through which the extended-matched terms
/// are cancelled.
///
/// `f_jacobian` and `b_jacobian` are optional analytic derivatives
/// (b_jacobian returns d b_i / d x for every column); when empty, central
/// finite differences are used.
struct SystemModel {
  std::string name;
  int n = 0;
  int m = 0;
  int p_m = 0;
  int p_em = 0;
  VectorField f;
  MatrixField B;
  MatrixField phi;
  MatrixField varrho;
  VectorField varrho_dx1;
  VectorXd indicator;
  VectorXd theta_true_m;
  VectorXd theta_true_em;
  MatrixField f_jacobian;
  std::function<std::vector<MatrixXd>(const VectorXd&)> b_jacobian;

  /// Throws Error(InvalidArgument) if the callables disagree with the
  /// declared dimensions at x.
  void validate(const VectorXd& x) const;
};

struct Setpoint {
  VectorXd x_d;
  VectorXd u_d;
  VectorXd x_d_dot;

  static Setpoint origin(int n, int m) {
    return {VectorXd::Zero(n), VectorXd::Zero(m), VectorXd::Zero(n)};
  }
};

/// xdot = f(x) - varrho(x)^T theta_em + B(x) [u - phi(x)^T theta_m].
VectorXd dynamics(const SystemModel& model, const VectorXd& x, const VectorXd& u,
                  const VectorXd& theta_m, const VectorXd& theta_em);

/// Nominal drift with the extended-matched term at theta_em:
/// f(x) - varrho(x)^T theta_em.
VectorXd drift(const SystemModel& model, const VectorXd& x, const VectorXd& theta_em);

/// df/dx, analytic when supplied.
MatrixXd drift_jacobian(const SystemModel& model, const VectorXd& x);

/// d b_i / d x for each input column, analytic when supplied.
std::vector<MatrixXd> input_jacobians(const SystemModel& model, const VectorXd& x);

/// ad_f g = (df/dx) g - (dg/dx) f by central finite differences.
VectorXd ad(const VectorField& f, const VectorField& g, const VectorXd& x);

/// ad_f B, one column per input, with f the nominal drift.
MatrixXd ad_f_B(const SystemModel& model, const VectorXd& x);

/// [b_1, ad_f b_1, ..., ad_f^{n-1} b_1, ...] for each column of B.
MatrixXd controllability_matrix(const SystemModel& model, const VectorXd& x);

/// Numerical rank via SVD with relative tolerance.
int numerical_rank(const MatrixXd& A, double rel_tol = 1e-6);

struct MatchingSample {
  VectorXd x;
  double matched_residual = 0.0;
  double extended_residual = 0.0;
  bool independent = true;
};

struct MatchingReport {
  std::vector<MatchingSample> samples;
  double max_matched_residual = 0.0;
  double max_extended_residual = 0.0;
  bool all_independent = true;
};

/// Checks the matching structure at each sample: every matched direction
/// B phi^T e_i lies in span{B}, every varrho_i^T lies in span{ad_f B}, and
/// [B, ad_f B] has full column rank.
MatchingReport check_matching(const SystemModel& model, const std::vector<VectorXd>& samples);

}  // namespace accm
