#include "accm/simulate.hpp"

#include <cmath>
#include <limits>

#include "accm/error.hpp"

namespace accm {

namespace {

long long ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double rounded = std::round(r);
  if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * std::max(1.0, r)) {
    throw Error(ErrorKind::InvalidArgument, std::string("simulation: ") + what);
  }
  return static_cast<long long>(rounded);
}

}  // namespace

void SimulationOptions::validate() const {
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "simulation: horizon and dt must be > 0");
  }
  if (dt > control_period) {
    throw Error(ErrorKind::InvalidArgument, "simulation: dt must not exceed the control period");
  }
  ratio(control_period, dt, "control period must be a multiple of dt");
  ratio(dt_log, control_period, "log interval must be a multiple of the control period");
  ratio(horizon, dt_log, "horizon must be a multiple of the log interval");
  if (blowup_radius && !(*blowup_radius > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "simulation: blow-up radius must be > 0");
  }
}

TrajectoryLog simulate(const ControllerContext& ctx, const ControllerConfig& config,
                       const Setpoint& setpoint, const VectorXd& x0, const VectorXd& theta_m0,
                       const VectorXd& theta_em0, const SimulationOptions& options) {
  options.validate();
  config.validate(ctx.model);
  const auto& model = ctx.model;
  if (x0.size() != model.n || theta_m0.size() != model.p_m || theta_em0.size() != model.p_em) {
    throw Error(ErrorKind::InvalidArgument, "simulation: initial state dimension mismatch");
  }

  const long long steps_per_control = ratio(options.control_period, options.dt, "control period");
  const long long steps_per_log = ratio(options.dt_log, options.dt, "log interval");
  const long long total_steps = ratio(options.horizon, options.dt, "horizon");
  const double radius = options.blowup_radius.value_or(10.0 * (1.0 + x0.norm()));

  AdaptiveState state{0.0, x0, theta_m0, theta_em0};
  if (config.use_projection) {
    if (config.bounds_m) apply_projection(state.theta_m, VectorXd::Zero(model.p_m), *config.bounds_m);
    if (config.bounds_em) {
      apply_projection(state.theta_em, VectorXd::Zero(model.p_em), *config.bounds_em);
    }
  }

  TrajectoryLog log;
  log.rows.reserve(static_cast<std::size_t>(total_steps / steps_per_log + 1));
  ControllerCache cache;
  ControlOutput held;

  auto rhs = [&](const VectorXd& x, const VectorXd& u) {
    return dynamics(model, x, u, model.theta_true_m, model.theta_true_em);
  };

  for (long long step = 0;; ++step) {
    state.t = static_cast<double>(step) * options.dt;
    if (step % steps_per_control == 0) {
      std::string warning;
      held = combined_step(state, config, ctx, setpoint, &cache, &warning);
      if (!warning.empty()) {
        if (log.geodesic_warnings == 0) log.first_warning = warning;
        ++log.geodesic_warnings;
      }
    }
    if (step % steps_per_log == 0) {
      LogRow row;
      row.t = state.t;
      row.x = state.x;
      row.x_d = setpoint.x_d;
      row.u = held.u;
      row.u_ccm = held.u_ccm;
      row.theta_m = state.theta_m;
      row.theta_em = state.theta_em;
      row.energy = held.energy;
      row.slack = held.constraint_slack;
      row.geodesic_converged = held.geodesic_converged;
      row.geodesic_iterations = held.geodesic_iterations;
      log.rows.push_back(std::move(row));
    }
    if (step == total_steps) break;

    const double h = options.dt;
    const VectorXd& x = state.x;
    const VectorXd k1 = rhs(x, held.u);
    const VectorXd k2 = rhs(x + 0.5 * h * k1, held.u);
    const VectorXd k3 = rhs(x + 0.5 * h * k2, held.u);
    const VectorXd k4 = rhs(x + h * k3, held.u);
    state.x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    // rates are constant over the hold, so every RK4 stage agrees
    state.theta_m += h * held.theta_dot_m;
    state.theta_em += h * held.theta_dot_em;
    if (config.use_projection) {
      if (config.bounds_m) {
        state.theta_m = state.theta_m.cwiseMax(config.bounds_m->lower).cwiseMin(config.bounds_m->upper);
      }
      if (config.bounds_em) {
        state.theta_em =
            state.theta_em.cwiseMax(config.bounds_em->lower).cwiseMin(config.bounds_em->upper);
      }
    }

    if (!state.x.allFinite() || state.x.norm() > radius) {
      log.status = SimulationStatus::Diverged;
      log.end_time = static_cast<double>(step + 1) * options.dt;
      return log;
    }
  }
  log.end_time = options.horizon;
  return log;
}

EnergyRateProbe energy_rate_probe(const TrajectoryLog& log, double lambda, double K,
                                  double theta_tilde_inf_norm) {
  EnergyRateProbe probe;
  probe.max_violation = -std::numeric_limits<double>::infinity();
  probe.max_scaled_violation = -std::numeric_limits<double>::infinity();
  const auto& rows = log.rows;
  const double offset = K * theta_tilde_inf_norm * theta_tilde_inf_norm;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    EnergyRateSample s;
    s.t = rows[i].t;
    s.energy = rows[i].energy;
    s.energy_rate = (rows[i + 1].energy - rows[i - 1].energy) / (rows[i + 1].t - rows[i - 1].t);
    s.bound = -2.0 * lambda * s.energy + offset;
    s.violation = s.energy_rate - s.bound;
    probe.max_violation = std::max(probe.max_violation, s.violation);
    probe.max_scaled_violation =
        std::max(probe.max_scaled_violation, s.violation / std::max(1.0, s.energy));
    probe.samples.push_back(s);
  }
  if (probe.samples.empty()) probe.max_violation = probe.max_scaled_violation = 0.0;
  return probe;
}

double tube_bound(double t, double initial_error, double R, double lambda, double K,
                  double theta_tilde_inf_norm) {
  return R * initial_error * std::exp(-lambda * t) +
         R * std::sqrt(K / (2.0 * lambda)) * theta_tilde_inf_norm *
             std::sqrt(1.0 - std::exp(-2.0 * lambda * t));
}

double peak_error(const TrajectoryLog& log) {
  double peak = 0.0;
  for (const auto& row : log.rows) peak = std::max(peak, (row.x - row.x_d).norm());
  return peak;
}

}  // namespace accm
