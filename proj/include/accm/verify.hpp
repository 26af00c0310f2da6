#pragma once

#include <Eigen/Dense>

#include <vector>

#include "accm/metric.hpp"
#include "accm/system.hpp"

namespace accm {

struct GridAxis {
  double lower = 0.0;
  double upper = 0.0;
  int count = 1;

  double value(int i) const {
    return count == 1 ? lower : lower + (upper - lower) * static_cast<double>(i) / (count - 1);
  }
};

/// Tensor grid over state and metric-parameter space. An axis with
/// lower == upper is inactive and may have a single sample; an active axis
/// needs at least two.
struct VerificationGrid {
  std::vector<GridAxis> x_axes;
  std::vector<GridAxis> theta_axes;
  double eps_psd = 1e-8;

  void validate(int n, int p) const;
  long long size() const;
  /// Point with lexicographic index `flat` (x axes first, last axis fastest).
  void point(long long flat, VectorXd& x, VectorXd& theta) const;
};

/// Grid used for the built-in example: x1 in [-3, 3] (61), x2 = x3 = 0,
/// th1 in [-2, 2] (41).
VerificationGrid example_grid();

struct ContractionReport {
  double lambda = 0.0;
  double max_eigenvalue = 0.0;
  VectorXd worst_x;
  VectorXd worst_theta;
  long long worst_index = -1;
  double lambda_certified = 0.0;
  double killing_residual_max = 0.0;
  double lemma4_residual_max = 0.0;
  bool pass = false;
};

/// Largest eigenvalue of
///   B_perp^T (W A^T + A W - Wdot + 2 lambda W) B_perp
/// at one point, where A and Wdot use the drift f - varrho^T theta minus the
/// optional matched term B phi^T theta_m.
double dual_ccm_eigenvalue(const SystemModel& model, const MetricField& metric,
                           const VectorXd& x, const VectorXd& theta, double lambda,
                           const VectorXd* theta_m = nullptr);

/// Orthonormal basis of the null space of B^T.
MatrixXd annihilator(const MatrixXd& B);

/// Scans the dual CCM condition over the grid. Also fills lambda_certified by
/// bisection on [0, 5].
ContractionReport check_dual_ccm(const SystemModel& model, const MetricField& metric,
                                 const VerificationGrid& grid, double lambda);

/// Largest lambda in [lo, hi] (to `resolution`) for which the scan passes.
double certify_rate(const SystemModel& model, const MetricField& metric,
                    const VerificationGrid& grid, double lo = 0.0, double hi = 5.0,
                    double resolution = 1e-3, const VectorXd* theta_m = nullptr);

/// max over grid and inputs of || -d_{b_i} W + W (db_i/dx)^T + (db_i/dx) W ||_F.
double check_killing(const SystemModel& model, const MetricField& metric,
                     const VerificationGrid& grid);

/// max over grid and extended-matched parameters of
/// || dM/dtheta_i + 2 sym(M b_k r_i^T) ||_F with r_i = varrho_dx1_i e_1.
double check_lemma4_identity(const SystemModel& model, const MetricField& metric,
                             const VerificationGrid& grid);

struct InvarianceReport {
  ContractionReport nominal;
  std::vector<ContractionReport> perturbed;
  bool pass = false;
};

/// Repeats the dual CCM scan with the matched term added to the drift for each
/// sampled theta_m; passes iff every pass/fail verdict equals the nominal one.
InvarianceReport check_matched_invariance(const SystemModel& model, const MetricField& metric,
                                          const VerificationGrid& grid, double lambda,
                                          const std::vector<VectorXd>& theta_samples);

}  // namespace accm
