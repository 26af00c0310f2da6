#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "accm/config.hpp"
#include "accm/error.hpp"
#include "accm/output.hpp"
#include "accm/simulate.hpp"

using namespace accm;

namespace {

Scenario scenario(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return load_scenario_file(std::string(ACCM_CONFIG_DIR) + "/lopez_" + name + ".cfg", overrides);
}

TrajectoryLog run(const Scenario& s) {
  return simulate(s.context(), s.controller, s.setpoint, s.x0, s.theta_m0, s.theta_em0, s.sim);
}

VectorXd all_estimates(const LogRow& r) {
  VectorXd v(r.theta_m.size() + r.theta_em.size());
  v << r.theta_m, r.theta_em;
  return v;
}

double width_norm(const ControllerConfig& c) {
  VectorXd w(c.bounds_m->width().size() + c.bounds_em->width().size());
  w << c.bounds_m->width(), c.bounds_em->width();
  return w.norm();
}

}  // namespace

TEST(Simulate, EquilibriumStaysPut) {
  const Scenario s = scenario("adaptive", {"sim.x0=[0,0,0]", "sim.horizon=2"});
  const TrajectoryLog log = run(s);
  EXPECT_EQ(log.status, SimulationStatus::Completed);
  for (const auto& r : log.rows) {
    EXPECT_EQ(r.x.norm(), 0.0);
    EXPECT_EQ(r.energy, 0.0);
    EXPECT_EQ(r.theta_m, s.theta_m0);
    EXPECT_EQ(r.theta_em, s.theta_em0);
  }
  const EnergyRateProbe p = energy_rate_probe(log, 0.1, 0.5, 1.0);
  EXPECT_LE(p.max_violation, 0.0);
  for (const auto& sample : p.samples) EXPECT_GE(sample.bound, 0.0);
}

TEST(Simulate, BaselineDivergesBeforeTwoSeconds) {
  const TrajectoryLog log = run(scenario("baseline"));
  EXPECT_EQ(log.status, SimulationStatus::Diverged);
  EXPECT_LE(log.end_time, 2.0);
  EXPECT_GT(log.end_time, 0.5);
  EXPECT_LT(log.rows.back().t, log.end_time + 1e-12);
}

TEST(Simulate, AdaptiveRunConverges) {
  const TrajectoryLog log = run(scenario("adaptive"));
  ASSERT_EQ(log.status, SimulationStatus::Completed);
  for (const auto& r : log.rows) {
    if (r.t >= 15.0) EXPECT_LE(r.x.norm(), 0.05) << r.t;
    EXPECT_LT(all_estimates(r).cwiseAbs().maxCoeff(), 20.0);
  }
  EXPECT_LT(log.rows.back().x.norm(), 1e-3);
}

TEST(Simulate, RowCountAndMonotoneTime) {
  const Scenario s = scenario("adaptive", {"sim.horizon=3", "sim.dt_log=0.05"});
  const TrajectoryLog log = run(s);
  ASSERT_EQ(log.rows.size(), 61u);
  for (std::size_t i = 1; i < log.rows.size(); ++i) EXPECT_GT(log.rows[i].t, log.rows[i - 1].t);
  EXPECT_NEAR(log.rows.back().t, 3.0, 1e-12);
}

TEST(Simulate, Deterministic) {
  const Scenario s = scenario("adaptive", {"sim.horizon=5"});
  const TrajectoryLog a = run(s), b = run(s);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].x, b.rows[i].x);
    EXPECT_EQ(a.rows[i].u, b.rows[i].u);
    EXPECT_EQ(a.rows[i].theta_m, b.rows[i].theta_m);
    EXPECT_EQ(a.rows[i].theta_em, b.rows[i].theta_em);
    EXPECT_EQ(a.rows[i].energy, b.rows[i].energy);
  }
}

TEST(Simulate, HalvingTheStepBarelyMovesTheFinalState) {
  const TrajectoryLog coarse = run(scenario("adaptive"));
  const TrajectoryLog fine = run(scenario("adaptive", {"sim.dt=0.0005"}));
  ASSERT_EQ(fine.status, SimulationStatus::Completed);
  EXPECT_LE((coarse.rows.back().x - fine.rows.back().x).norm(), 1e-3);
}

TEST(Simulate, ProjectionKeepsEstimatesInsideBounds) {
  const Scenario s = scenario("projection");
  const TrajectoryLog log = run(s);
  ASSERT_EQ(log.status, SimulationStatus::Completed);
  const auto& bm = *s.controller.bounds_m;
  const auto& be = *s.controller.bounds_em;
  for (const auto& r : log.rows) {
    EXPECT_TRUE((r.theta_m.array() >= bm.lower.array()).all());
    EXPECT_TRUE((r.theta_m.array() <= bm.upper.array()).all());
    EXPECT_TRUE((r.theta_em.array() >= be.lower.array()).all());
    EXPECT_TRUE((r.theta_em.array() <= be.upper.array()).all());
  }
  EXPECT_LT(peak_error(log), peak_error(run(scenario("adaptive"))));
}

TEST(Simulate, ProjectionRejectsInitialEstimateOutsideBounds) {
  const Scenario s = scenario("projection", {"sim.theta_em0=[3]"});
  EXPECT_THROW(run(s), Error);
}

TEST(EnergyProbe, NominalControllerMeetsTheDecreaseConstraint) {
  // true parameters as estimates and no adaptation: only discretization error
  const Scenario s = scenario("baseline", {"sim.theta_m0=[-0.5,-1.5]", "sim.theta_em0=[-1]"});
  const TrajectoryLog log = run(s);
  ASSERT_EQ(log.status, SimulationStatus::Completed);
  const EnergyRateProbe p = energy_rate_probe(log, s.controller.lambda, 0.0, 0.0);
  EXPECT_LE(p.max_scaled_violation, 1e-2);
  for (const auto& r : log.rows) EXPECT_LE(r.slack, 1e-9);
}

TEST(EnergyProbe, DoubledRateInTheProbeIsViolated) {
  const Scenario s = scenario("baseline", {"sim.theta_m0=[-0.5,-1.5]", "sim.theta_em0=[-1]"});
  const TrajectoryLog log = run(s);
  const EnergyRateProbe p = energy_rate_probe(log, 2.0 * s.controller.lambda, 0.0, 0.0);
  EXPECT_GT(p.max_violation, 1e-3);
}

TEST(EnergyProbe, RobustRunRespectsTheBound) {
  const Scenario s = scenario("robust");
  const TrajectoryLog log = run(s);
  ASSERT_EQ(log.status, SimulationStatus::Completed);
  const double K = robust_bound_constant(s.model.m, s.controller.kappa);
  const EnergyRateProbe p = energy_rate_probe(log, s.controller.lambda, K, width_norm(s.controller));
  EXPECT_LE(p.max_scaled_violation, 1e-2);
}

TEST(TubeBound, RobustTrajectoryStaysInsideTheTube) {
  const Scenario s = scenario("robust");
  const TrajectoryLog log = run(s);
  const double K = robust_bound_constant(s.model.m, s.controller.kappa);
  const double R = overshoot_constant(s.metric);
  const double e0 = (s.x0 - s.setpoint.x_d).norm();
  for (const auto& r : log.rows) {
    EXPECT_LE((r.x - r.x_d).norm(),
              tube_bound(r.t, e0, R, s.controller.lambda, K, width_norm(s.controller)));
  }
}

TEST(TubeBound, ClosedForm) {
  EXPECT_DOUBLE_EQ(tube_bound(0.0, 2.0, 3.0, 0.5, 1.0, 4.0), 6.0);
  EXPECT_NEAR(tube_bound(1e9, 2.0, 3.0, 0.5, 1.0, 4.0), 12.0, 1e-12);
}

TEST(Options, Validation) {
  SimulationOptions o;
  EXPECT_NO_THROW(o.validate());
  o.dt = 0.02;
  EXPECT_THROW(o.validate(), Error);
  o = {};
  o.control_period = 0.0015;
  EXPECT_THROW(o.validate(), Error);
  o = {};
  o.horizon = 0.015;
  EXPECT_THROW(o.validate(), Error);
  o = {};
  o.blowup_radius = -1.0;
  EXPECT_THROW(o.validate(), Error);
}

TEST(Csv, HeaderAndRows) {
  const Scenario s = scenario("adaptive", {"sim.horizon=0.5"});
  const TrajectoryLog log = run(s);
  EXPECT_EQ(csv_header(log),
            "t,x1,x2,x3,xd1,xd2,xd3,u1,uccm1,theta_m1,theta_m2,theta_em1,E,slack,"
            "geodesic_converged,geodesic_iterations");
  std::ostringstream os;
  write_csv(os, log);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  EXPECT_EQ(lines, 1 + 51);
  EXPECT_EQ(log.rows.size(), 51u);
}
