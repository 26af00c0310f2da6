#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "accm/control.hpp"

namespace accm {

struct SimulationOptions {
  double horizon = 20.0;         // T
  double dt = 1e-3;              // RK4 step
  double control_period = 1e-2;  // zero-order hold interval
  double dt_log = 1e-2;          // logging interval, a multiple of control_period
  std::optional<double> blowup_radius;  // default 10 (1 + |x0|)

  void validate() const;
};

struct LogRow {
  double t = 0.0;
  VectorXd x;
  VectorXd x_d;
  VectorXd u;
  VectorXd u_ccm;
  VectorXd theta_m;
  VectorXd theta_em;
  double energy = 0.0;
  double slack = 0.0;
  bool geodesic_converged = false;
  int geodesic_iterations = 0;
};

enum class SimulationStatus { Completed, Diverged };

struct TrajectoryLog {
  std::vector<LogRow> rows;
  SimulationStatus status = SimulationStatus::Completed;
  double end_time = 0.0;
  int geodesic_warnings = 0;
  std::string first_warning;
};

/// Closed-loop run with the plant at its true parameters. The controller is
/// evaluated every control period and held across the RK4 substeps; the
/// estimates move with the held rates and are clamped to their bounds when
/// projection is enabled. Stops early with status Diverged once |x| exceeds
/// the blow-up radius.
TrajectoryLog simulate(const ControllerContext& ctx, const ControllerConfig& config,
                       const Setpoint& setpoint, const VectorXd& x0, const VectorXd& theta_m0,
                       const VectorXd& theta_em0, const SimulationOptions& options);

struct EnergyRateSample {
  double t = 0.0;
  double energy = 0.0;
  double energy_rate = 0.0;  // centred finite difference
  double bound = 0.0;        // -2 lambda E + K |theta_tilde_inf|^2
  double violation = 0.0;    // energy_rate - bound
};

struct EnergyRateProbe {
  std::vector<EnergyRateSample> samples;
  double max_violation = 0.0;
  /// max over samples of violation / max(1, E)
  double max_scaled_violation = 0.0;
};

/// Checks Edot <= -2 lambda E + K |theta_tilde_inf|^2 along a log using
/// centred differences of the logged energy.
EnergyRateProbe energy_rate_probe(const TrajectoryLog& log, double lambda, double K,
                                  double theta_tilde_inf_norm);

/// |x(t) - x_d| <= R |x(0) - x_d| e^{-lambda t}
///                 + R sqrt(K / (2 lambda)) |theta_tilde_inf| (1 - e^{-2 lambda t})^{1/2}.
double tube_bound(double t, double initial_error, double R, double lambda, double K,
                  double theta_tilde_inf_norm);

/// max_t |x(t) - x_d(t)|.
double peak_error(const TrajectoryLog& log);

}  // namespace accm
