#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "accm/error.hpp"
#include "accm/example_system.hpp"
#include "accm/geodesic.hpp"
#include "oracle_pairs.hpp"
#include "oracles.hpp"

using namespace accm;

namespace {

VectorXd v3(double a, double b, double c) { return (VectorXd(3) << a, b, c).finished(); }
VectorXd v1(double a) { return VectorXd::Constant(1, a); }

oracle::MetricFn example_M(double th) {
  return [th](const VectorXd& x) -> MatrixXd {
    return oracle::adjugate_inverse(oracle::example_dual(x(0), th));
  };
}

class GeodesicTest : public ::testing::Test {
 protected:
  MetricField metric = example::make_metric();
  CurveBasis basis = make_curve_basis();
};

}  // namespace

TEST(CurveBasis, Defaults) {
  const CurveBasis b = make_curve_basis();
  EXPECT_EQ(b.num_nodes(), 9);
  EXPECT_EQ(b.rule.order(), 17);
  EXPECT_THROW(make_curve_basis(1, 17), Error);
  EXPECT_THROW(make_curve_basis(9, 1), Error);
}

TEST_F(GeodesicTest, EnergyOfChordUnderFlatMetric) {
  const MetricField flat = identity_metric(3);
  const VectorXd p = v3(0.3, -1.0, 2.0), q = v3(-1.2, 0.5, 0.25);
  EXPECT_NEAR(curve_energy(chord(p, q, basis), flat, VectorXd(), basis), (q - p).squaredNorm(),
              1e-13);
}

TEST_F(GeodesicTest, EnergyOfChordUnderConstantMetric) {
  MatrixXd W0(3, 3);
  W0 << 2, 0.3, 0, 0.3, 1, -0.2, 0, -0.2, 0.5;
  const MetricField field = constant_metric(W0);
  const VectorXd p = v3(1, 2, 3), q = v3(-1, 0, 1);
  const MatrixXd M0 = W0.inverse();
  EXPECT_NEAR(curve_energy(chord(p, q, basis), field, VectorXd(), basis),
              (q - p).dot(M0 * (q - p)), 1e-12);
}

TEST_F(GeodesicTest, EnergyOfChordMatchesDenseTrapezoid) {
  // 1e4-panel trapezoid on the straight line (0,0,0) -> (1,0,0), theta = 0
  constexpr double kTrapezoid = 0.93319758930894603;
  const VectorXd p = v3(0, 0, 0), q = v3(1, 0, 0);
  const double e = curve_energy(chord(p, q, basis), metric, v1(0.0), basis);
  EXPECT_NEAR(e / kTrapezoid - 1.0, 0.0, 1e-6);
  EXPECT_NEAR(oracle::trapezoid_line_energy(example_M(0.0), p, q, 10000), kTrapezoid, 1e-15);
}

TEST_F(GeodesicTest, EnergyRejectsBadCurves) {
  EXPECT_THROW(curve_energy(MatrixXd::Zero(3, 1), metric, v1(0), basis), Error);
  EXPECT_THROW(curve_energy(MatrixXd::Zero(2, 9), metric, v1(0), basis), Error);
  MetricField broken = metric;
  broken.dual = [](const VectorXd&, const VectorXd&) { return MatrixXd(-MatrixXd::Identity(3, 3)); };
  try {
    curve_energy(chord(v3(0, 0, 0), v3(1, 0, 0), basis), broken, v1(0), basis);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MetricError);
  }
}

TEST_F(GeodesicTest, EnergyGradientMatchesFiniteDifferences) {
  MatrixXd nodes = chord(v3(1, -0.5, 0.3), v3(-0.7, 1.1, 1.4), basis);
  nodes.block(0, 1, 3, 7) += 0.2 * MatrixXd::Random(3, 7);
  MatrixXd grad;
  curve_energy_gradient(nodes, metric, v1(0.4), basis, grad);
  const double h = 1e-6;
  for (int k = 0; k < nodes.cols(); ++k) {
    for (int i = 0; i < 3; ++i) {
      MatrixXd a = nodes, b = nodes;
      a(i, k) += h;
      b(i, k) -= h;
      const double fd =
          (curve_energy(a, metric, v1(0.4), basis) - curve_energy(b, metric, v1(0.4), basis)) /
          (2 * h);
      EXPECT_NEAR(grad(i, k), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_F(GeodesicTest, CoincidentEndpoints) {
  const VectorXd p = v3(0.5, -0.2, 1.0);
  const Geodesic g = solve_geodesic(p, p, metric, v1(0.3), basis);
  EXPECT_EQ(g.energy, 0.0);
  EXPECT_EQ(g.iterations, 0);
  EXPECT_TRUE(g.converged);
  EXPECT_EQ(g.tangent0.norm(), 0.0);
  EXPECT_EQ(g.tangent1.norm(), 0.0);
  const auto co = first_variation_terms(g, metric, v1(0.3));
  EXPECT_EQ(co.at_end.norm(), 0.0);
  EXPECT_EQ(co.at_start.norm(), 0.0);
}

TEST_F(GeodesicTest, FlatGeodesicsAreChords) {
  const MetricField flat = identity_metric(3);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int t = 0; t < 20; ++t) {
    const VectorXd p = v3(U(rng), U(rng), U(rng)), q = v3(U(rng), U(rng), U(rng));
    const Geodesic g = solve_geodesic(p, q, flat, VectorXd(), basis);
    EXPECT_TRUE(g.converged);
    EXPECT_LT((g.nodes - chord(p, q, basis)).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(g.energy, (q - p).squaredNorm(), 1e-12);
    const auto co = first_variation_terms(g, flat, VectorXd());
    EXPECT_LT((co.at_end - (q - p)).norm(), 1e-10);
    EXPECT_LT((co.at_start - (q - p)).norm(), 1e-10);
  }
}

TEST_F(GeodesicTest, EndpointsArePinned) {
  const VectorXd p = v3(1, 1, 1), q = v3(0, 0, 0);
  const Geodesic g = solve_geodesic(p, q, metric, v1(1.0), basis);
  EXPECT_EQ((g.start() - p).norm(), 0.0);
  EXPECT_EQ((g.end() - q).norm(), 0.0);
}

TEST_F(GeodesicTest, MatchesRelaxationOracleForReferencePair) {
  // 200-segment relaxed polyline, theta = 1, (1,1,1) -> 0
  constexpr double kOracle = 1.2010399114909793;
  const Geodesic g = solve_geodesic(v3(1, 1, 1), v3(0, 0, 0), metric, v1(1.0), basis);
  EXPECT_TRUE(g.converged);
  EXPECT_LT(std::abs(g.energy / kOracle - 1.0), 1e-3);
  EXPECT_LE(g.energy, curve_energy(chord(v3(1, 1, 1), v3(0, 0, 0), basis), metric, v1(1.0), basis));
}

TEST_F(GeodesicTest, MatchesFrozenRelaxationOracle) {
  for (const auto& pr : oracle::kGeodesicPairs) {
    const VectorXd p = Eigen::Map<const VectorXd>(pr.p, 3), q = Eigen::Map<const VectorXd>(pr.q, 3);
    const Geodesic g = solve_geodesic(p, q, metric, v1(pr.theta), basis);
    EXPECT_TRUE(g.converged);
    EXPECT_LT(std::abs(g.energy / pr.energy - 1.0), 1e-3) << "E = " << g.energy;
  }
}

TEST_F(GeodesicTest, LiveRelaxationOracleAgrees) {
  const VectorXd p = v3(-0.5, 0.8, 1.2), q = v3(1.5, -0.4, -0.3);
  const double ref = oracle::relaxed_geodesic_energy(example_M(-0.7), p, q, 100);
  const Geodesic g = solve_geodesic(p, q, metric, v1(-0.7), basis);
  EXPECT_LT(std::abs(g.energy / ref - 1.0), 1e-3);
}

TEST_F(GeodesicTest, EndpointDerivativeIdentity) {
  const VectorXd p = v3(1, 0, 0), q = v3(0, 0, 0);
  const VectorXd th = v1(0.0);
  const Geodesic g = solve_geodesic(p, q, metric, th, basis);
  const auto co = first_variation_terms(g, metric, th);
  auto energy_q = [&](const VectorXd& qq) {
    return solve_geodesic(p, qq, metric, th, basis).energy;
  };
  auto energy_p = [&](const VectorXd& pp) {
    return solve_geodesic(pp, q, metric, th, basis).energy;
  };
  EXPECT_LT((oracle::fd_gradient(energy_q, q, 1e-5) - 2.0 * co.at_end).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_LT((oracle::fd_gradient(energy_p, p, 1e-5) + 2.0 * co.at_start).cwiseAbs().maxCoeff(),
            1e-4);
}

TEST_F(GeodesicTest, ConstantSpeedAndEnergyEqualsLengthSquared) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int t = 0; t < 25; ++t) {
    const VectorXd p = v3(U(rng), U(rng), U(rng)), q = v3(U(rng), U(rng), U(rng));
    const VectorXd th = v1(U(rng));
    const Geodesic g = solve_geodesic(p, q, metric, th, basis);
    EXPECT_TRUE(g.converged);
    EXPECT_LE(speed_constancy_residual(g, metric, th, basis), 1e-3);
    const double L = curve_length(g.nodes, metric, th, basis);
    EXPECT_LT(std::abs(g.energy / (L * L) - 1.0), 1e-3);
  }
}

TEST_F(GeodesicTest, BeatsPerturbedCurves) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-2, 2);
  std::normal_distribution<double> N(0, 1);
  for (int t = 0; t < 10; ++t) {
    const VectorXd p = v3(U(rng), U(rng), U(rng)), q = v3(U(rng), U(rng), U(rng));
    const VectorXd th = v1(U(rng));
    const Geodesic g = solve_geodesic(p, q, metric, th, basis);
    for (int k = 0; k < 30; ++k) {
      MatrixXd c = g.nodes;
      const double scale = std::pow(10.0, -1 - k % 4);
      for (int j = 1; j + 1 < c.cols(); ++j) {
        for (int i = 0; i < 3; ++i) c(i, j) += scale * N(rng);
      }
      EXPECT_LE(g.energy, curve_energy(c, metric, th, basis) + 1e-12);
    }
  }
}

TEST_F(GeodesicTest, QuadratureRefinementIsStable) {
  const CurveBasis fine = make_curve_basis(9, 33);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int t = 0; t < 10; ++t) {
    const VectorXd p = v3(U(rng), U(rng), U(rng)), q = v3(U(rng), U(rng), U(rng));
    const VectorXd th = v1(U(rng));
    const Geodesic g = solve_geodesic(p, q, metric, th, basis);
    const double e_fine = curve_energy(g.nodes, metric, th, fine);
    EXPECT_LT(std::abs(e_fine / g.energy - 1.0), 1e-6);
  }
}

TEST_F(GeodesicTest, WarmStartIsUsedForNearbyEndpoints) {
  const VectorXd p = v3(0, 0, 0), q = v3(1, 1, 1);
  const Geodesic first = solve_geodesic(p, q, metric, v1(0.5), basis);
  const VectorXd q2 = q + v3(0.01, -0.01, 0.02);
  const Geodesic warm = solve_geodesic(p, q2, metric, v1(0.5), basis, {}, &first);
  const Geodesic cold = solve_geodesic(p, q2, metric, v1(0.5), basis);
  EXPECT_TRUE(warm.warm_started);
  EXPECT_FALSE(cold.warm_started);
  EXPECT_LE(warm.iterations, cold.iterations);
  EXPECT_NEAR(warm.energy, cold.energy, 1e-10 * cold.energy);

  const Geodesic far = solve_geodesic(p, v3(-1, 2, 0), metric, v1(0.5), basis, {}, &first);
  EXPECT_FALSE(far.warm_started);
}

TEST_F(GeodesicTest, IterationCapReportsNotConverged) {
  GeodesicOptions opts;
  opts.max_iterations = 1;
  const Geodesic g = solve_geodesic(v3(2, -1, 1), v3(-2, 1, -1), metric, v1(1.5), basis, opts);
  EXPECT_FALSE(g.converged);
  EXPECT_EQ(g.iterations, 1);
  const double e_chord =
      curve_energy(chord(v3(2, -1, 1), v3(-2, 1, -1), basis), metric, v1(1.5), basis);
  EXPECT_LE(g.energy, e_chord);
}

TEST_F(GeodesicTest, OverflowingEnergyIsOptimizerDiverged) {
  const MetricField tiny = constant_metric(1e-300 * MatrixXd::Identity(3, 3));
  try {
    solve_geodesic(v3(0, 0, 0), v3(1e10, 0, 0), tiny, VectorXd(), basis);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OptimizerDiverged);
  }
}

TEST_F(GeodesicTest, RejectsNonFiniteOrMisSizedEndpoints) {
  EXPECT_THROW(solve_geodesic(v3(0, 0, 0), VectorXd::Zero(2), metric, v1(0), basis), Error);
  EXPECT_THROW(solve_geodesic(v3(0, 0, 0), v3(std::numeric_limits<double>::infinity(), 0, 0),
                              metric, v1(0), basis),
               Error);
}
