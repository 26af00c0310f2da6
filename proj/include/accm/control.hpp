#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

#include "accm/geodesic.hpp"
#include "accm/metric.hpp"
#include "accm/system.hpp"

namespace accm {

struct ParameterBounds {
  VectorXd lower;
  VectorXd upper;

  VectorXd midpoint() const { return 0.5 * (lower + upper); }
  /// Per-coordinate widths theta+ - theta-.
  VectorXd width() const { return upper - lower; }
};

enum class DeadzoneNorm { Euclidean, Metric };

struct ControllerConfig {
  double lambda = 0.1;
  VectorXd gamma_m;   // diagonal of Gamma_m
  VectorXd gamma_em;  // diagonal of Gamma_em
  double kappa = 1.0;
  double deadzone = 0.0;
  DeadzoneNorm deadzone_norm = DeadzoneNorm::Euclidean;
  std::optional<ParameterBounds> bounds_m;
  std::optional<ParameterBounds> bounds_em;

  bool adapt_m = true;
  bool adapt_em = true;
  bool robust = false;
  bool use_deadzone = false;
  bool use_projection = false;

  void validate(const SystemModel& model) const;
};

/// Closed-loop state: time, plant state and both parameter estimates.
struct AdaptiveState {
  double t = 0.0;
  VectorXd x;
  VectorXd theta_m;
  VectorXd theta_em;
};

struct ControlOutput {
  VectorXd u;
  VectorXd u_ccm;
  VectorXd theta_dot_m;
  VectorXd theta_dot_em;
  double energy = 0.0;
  double constraint_slack = 0.0;
  bool geodesic_converged = false;
  int geodesic_iterations = 0;
  bool geodesic_fallback = false;
};

struct MinNormResult {
  VectorXd u_ccm;
  double slack = 0.0;
  VectorXd a;
  double b = 0.0;
};

/// Minimum-norm point of the half-space {u : a^T u <= b}. Throws
/// Error(InfeasibleConstraint) if b < 0 while ||a|| <= 1e-12.
VectorXd min_norm_halfspace(const VectorXd& a, double b);

/// Pointwise min-norm input. With gamma(0) = x_d and gamma(1) = x the energy
/// decrease constraint is written as a^T u <= b with
///
///   a = 2 B(x)^T M(x) gamma_s(1)
///   b = -2 lambda E - 2 gamma_s(1)^T M(x) [f(x) - varrho(x)^T theta_em + B(x) u_d]
///       + 2 gamma_s(0)^T M(x_d) xdot_d,
///
/// so that a satisfied constraint gives Edot <= -2 lambda E for the modelled
/// dynamics. Both sides carry the factor 2 of the first variation; the
/// solution is unchanged by it.
MinNormResult min_norm_input(const Geodesic& geo, const MetricField& metric,
                             const VectorXd& theta_em, const SystemModel& model,
                             const Setpoint& setpoint, double lambda);

/// -Gamma_m phi(x) B(x)^T M(gamma(1)) gamma_s(1).
VectorXd adapt_matched(const Geodesic& geo, const MetricField& metric, const VectorXd& theta_em,
                       const SystemModel& model, const VectorXd& gamma_m);

/// Per-channel robust term -kappa b_i^T M(gamma(1)) gamma_s(1) ||phi_i||^2.
VectorXd robust_term(const Geodesic& geo, const MetricField& metric, const VectorXd& theta_em,
                     const SystemModel& model, double kappa);

/// Energy-bound constant K = m / (2 kappa).
double robust_bound_constant(int m, double kappa);

/// -Gamma_em varrho(x) M(gamma(1)) gamma_s(1).
VectorXd adapt_extended(const Geodesic& geo, const MetricField& metric, const VectorXd& theta_em,
                        const SystemModel& model, const VectorXd& gamma_em);

/// indicator * sum_i rate_i * int_0^1 r_i(gamma(s)) . gamma_s(s) ds by the
/// basis quadrature, r_i = [d varrho_i / d x1, 0, ..., 0].
VectorXd extended_feedforward(const Geodesic& geo, const VectorXd& theta_dot_em,
                              const SystemModel& model, const CurveBasis& basis);

/// Zeroes both rates when the tangent measure is <= deadzone (inclusive).
void apply_deadzone(VectorXd& theta_dot_m, VectorXd& theta_dot_em, double tangent_measure,
                    double deadzone);

/// Zeroes outward rates of estimates sitting on a bound. Throws
/// Error(InvariantViolation) if an estimate lies outside its bounds by more
/// than 1e-9.
VectorXd apply_projection(const VectorXd& theta, const VectorXd& theta_dot,
                          const ParameterBounds& bounds);

/// Per-cycle controller state owned by the caller (geodesic warm start).
struct ControllerCache {
  std::optional<Geodesic> last_geodesic;
};

struct ControllerContext {
  const SystemModel& model;
  const MetricField& metric;
  const CurveBasis& basis;
  GeodesicOptions geodesic_options;
};

/// One controller evaluation: geodesic x_d -> x, adaptation rates, rate
/// filters, min-norm input, extended-matched feedforward, matched
/// certainty-equivalence term and optional robust term.
ControlOutput combined_step(const AdaptiveState& state, const ControllerConfig& config,
                            const ControllerContext& ctx, const Setpoint& setpoint,
                            ControllerCache* cache = nullptr, std::string* warning = nullptr);

}  // namespace accm
