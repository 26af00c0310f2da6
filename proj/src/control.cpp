#include "accm/control.hpp"

#include <cmath>

#include "accm/error.hpp"

namespace accm {

namespace {

void check_bounds(const std::optional<ParameterBounds>& bounds, int p, const char* which) {
  if (!bounds) return;
  if (bounds->lower.size() != p || bounds->upper.size() != p) {
    throw Error(ErrorKind::InvalidArgument, std::string("controller: ") + which +
                                                " bounds have the wrong dimension");
  }
  if ((bounds->lower.array() > bounds->upper.array()).any()) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("controller: ") + which + " lower bound exceeds upper bound");
  }
}

}  // namespace

void ControllerConfig::validate(const SystemModel& model) const {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "controller: lambda must be > 0");
  if (gamma_m.size() != model.p_m || gamma_em.size() != model.p_em) {
    throw Error(ErrorKind::InvalidArgument, "controller: adaptation gain dimension mismatch");
  }
  if ((gamma_m.array() <= 0.0).any() || (gamma_em.array() <= 0.0).any()) {
    throw Error(ErrorKind::InvalidArgument, "controller: adaptation gains must be positive");
  }
  if (kappa < 0.0 || (robust && !(kappa > 0.0))) {
    throw Error(ErrorKind::InvalidArgument, "controller: kappa must be > 0 in robust mode");
  }
  if (!(deadzone >= 0.0)) throw Error(ErrorKind::InvalidArgument, "controller: deadzone < 0");
  check_bounds(bounds_m, model.p_m, "matched");
  check_bounds(bounds_em, model.p_em, "extended-matched");
  if (use_projection && ((model.p_m > 0 && !bounds_m) || (model.p_em > 0 && !bounds_em))) {
    throw Error(ErrorKind::InvalidArgument, "controller: projection requires parameter bounds");
  }
}

VectorXd min_norm_halfspace(const VectorXd& a, double b) {
  if (b >= 0.0) return VectorXd::Zero(a.size());
  const double aa = a.squaredNorm();
  if (std::sqrt(aa) <= 1e-12) {
    // both sides vanish quadratically at the target; a violation at this
    // level is round-off, not a loss of controllability
    if (b >= -1e-12) return VectorXd::Zero(a.size());
    throw Error(ErrorKind::InfeasibleConstraint,
                "min-norm controller: energy decrease constraint is infeasible (|a| = " +
                    std::to_string(std::sqrt(aa)) + ", b = " + std::to_string(b) + ")");
  }
  return (b / aa) * a;
}

MinNormResult min_norm_input(const Geodesic& geo, const MetricField& metric,
                             const VectorXd& theta_em, const SystemModel& model,
                             const Setpoint& setpoint, double lambda) {
  const VectorXd& x = geo.end();
  const auto co = first_variation_terms(geo, metric, theta_em);
  const MatrixXd B = model.B(x);
  MinNormResult r;
  r.a = 2.0 * B.transpose() * co.at_end;
  const VectorXd drift_x = drift(model, x, theta_em) + B * setpoint.u_d;
  r.b = -2.0 * lambda * geo.energy - 2.0 * co.at_end.dot(drift_x);
  if (setpoint.x_d_dot.size() == x.size()) r.b += 2.0 * co.at_start.dot(setpoint.x_d_dot);
  r.u_ccm = min_norm_halfspace(r.a, r.b);
  r.slack = r.a.dot(r.u_ccm) - r.b;
  return r;
}

VectorXd adapt_matched(const Geodesic& geo, const MetricField& metric, const VectorXd& theta_em,
                       const SystemModel& model, const VectorXd& gamma_m) {
  if (model.p_m == 0) return VectorXd::Zero(0);
  const VectorXd x = geo.end();
  const VectorXd co = metric_at(metric, x, theta_em) * geo.tangent1;
  return -(gamma_m.asDiagonal() * (model.phi(x) * (model.B(x).transpose() * co)));
}

VectorXd robust_term(const Geodesic& geo, const MetricField& metric, const VectorXd& theta_em,
                     const SystemModel& model, double kappa) {
  const VectorXd x = geo.end();
  const VectorXd co = metric_at(metric, x, theta_em) * geo.tangent1;
  const VectorXd bm = model.B(x).transpose() * co;
  VectorXd out = VectorXd::Zero(model.m);
  if (model.p_m == 0) return out;
  const MatrixXd phi = model.phi(x);
  for (int i = 0; i < model.m; ++i) out(i) = -kappa * bm(i) * phi.col(i).squaredNorm();
  return out;
}

double robust_bound_constant(int m, double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorKind::InvalidArgument, "robust bound needs kappa > 0");
  return static_cast<double>(m) / (2.0 * kappa);
}

VectorXd adapt_extended(const Geodesic& geo, const MetricField& metric, const VectorXd& theta_em,
                        const SystemModel& model, const VectorXd& gamma_em) {
  if (model.p_em == 0) return VectorXd::Zero(0);
  const VectorXd x = geo.end();
  const VectorXd co = metric_at(metric, x, theta_em) * geo.tangent1;
  return -(gamma_em.asDiagonal() * (model.varrho(x) * co));
}

VectorXd extended_feedforward(const Geodesic& geo, const VectorXd& theta_dot_em,
                              const SystemModel& model, const CurveBasis& basis) {
  VectorXd out = VectorXd::Zero(model.m);
  if (model.p_em == 0 || theta_dot_em.isZero(0.0)) return out;
  const MatrixXd Y = geo.nodes * basis.interp.transpose();
  const MatrixXd V = geo.nodes * basis.interp_diff.transpose();
  double total = 0.0;
  for (Eigen::Index k = 0; k < basis.rule.order(); ++k) {
    const VectorXd r = model.varrho_dx1(Y.col(k));
    total += basis.rule.weights(k) * V(0, k) * theta_dot_em.dot(r);
  }
  return model.indicator * total;
}

void apply_deadzone(VectorXd& theta_dot_m, VectorXd& theta_dot_em, double tangent_measure,
                    double deadzone) {
  if (tangent_measure <= deadzone) {
    theta_dot_m.setZero();
    theta_dot_em.setZero();
  }
}

VectorXd apply_projection(const VectorXd& theta, const VectorXd& theta_dot,
                          const ParameterBounds& bounds) {
  constexpr double kSlack = 1e-9;
  VectorXd out = theta_dot;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double lo = bounds.lower(i);
    const double hi = bounds.upper(i);
    if (theta(i) > hi + kSlack || theta(i) < lo - kSlack) {
      throw Error(ErrorKind::InvariantViolation,
                  "projection: estimate " + std::to_string(i) + " = " + std::to_string(theta(i)) +
                      " is outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    if ((theta(i) >= hi && out(i) > 0.0) || (theta(i) <= lo && out(i) < 0.0)) out(i) = 0.0;
  }
  return out;
}

ControlOutput combined_step(const AdaptiveState& state, const ControllerConfig& config,
                            const ControllerContext& ctx, const Setpoint& setpoint,
                            ControllerCache* cache, std::string* warning) {
  const auto& model = ctx.model;
  const auto& metric = ctx.metric;
  if (!state.x.allFinite() || !state.theta_m.allFinite() || !state.theta_em.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "combined_step: non-finite state");
  }

  ControlOutput out;
  const Geodesic* warm = (cache && cache->last_geodesic) ? &*cache->last_geodesic : nullptr;
  Geodesic geo;
  try {
    geo = solve_geodesic(setpoint.x_d, state.x, metric, state.theta_em, ctx.basis,
                         ctx.geodesic_options, warm);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OptimizerDiverged) throw;
    geo = make_geodesic(chord(setpoint.x_d, state.x, ctx.basis), metric, state.theta_em,
                        ctx.basis);
    geo.converged = false;
    out.geodesic_fallback = true;
    if (warning) *warning = std::string("geodesic search failed, using chord: ") + e.what();
  }
  if (!geo.converged && warning && warning->empty()) {
    *warning = "geodesic search stopped before reaching the gradient tolerance";
  }
  if (cache) cache->last_geodesic = geo;
  out.energy = geo.energy;
  out.geodesic_converged = geo.converged;
  out.geodesic_iterations = geo.iterations;

  out.theta_dot_em = VectorXd::Zero(model.p_em);
  out.theta_dot_m = VectorXd::Zero(model.p_m);
  if (config.adapt_em) {
    out.theta_dot_em = adapt_extended(geo, metric, state.theta_em, model, config.gamma_em);
  }
  if (config.adapt_m) {
    out.theta_dot_m = adapt_matched(geo, metric, state.theta_em, model, config.gamma_m);
  }

  // rate filters act before the feedforward, which must see the applied rate
  if (config.use_deadzone) {
    const double measure = config.deadzone_norm == DeadzoneNorm::Euclidean
                               ? geo.tangent1.norm()
                               : std::sqrt(std::max(0.0, geo.energy));
    apply_deadzone(out.theta_dot_m, out.theta_dot_em, measure, config.deadzone);
  }
  if (config.use_projection) {
    if (config.bounds_m) out.theta_dot_m = apply_projection(state.theta_m, out.theta_dot_m, *config.bounds_m);
    if (config.bounds_em) {
      out.theta_dot_em = apply_projection(state.theta_em, out.theta_dot_em, *config.bounds_em);
    }
  }

  const MinNormResult mn = min_norm_input(geo, metric, state.theta_em, model, setpoint, config.lambda);
  out.u_ccm = mn.u_ccm;
  out.constraint_slack = mn.slack;

  out.u = setpoint.u_d + mn.u_ccm + extended_feedforward(geo, out.theta_dot_em, model, ctx.basis);
  if (model.p_m > 0) out.u += model.phi(state.x).transpose() * state.theta_m;
  if (config.robust) out.u += robust_term(geo, metric, state.theta_em, model, config.kappa);
  return out;
}

}  // namespace accm
