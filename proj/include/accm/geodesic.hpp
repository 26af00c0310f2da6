#pragma once

#include <Eigen/Dense>

#include <optional>

#include "accm/metric.hpp"
#include "accm/spectral.hpp"

namespace accm {

/// Discretization shared by every curve: Chebyshev-Gauss-Lobatto nodes on
/// [0, 1], the nodal differentiation matrix, and a Clenshaw-Curtis rule whose
/// abscissae are reached by barycentric interpolation of the nodal values.
struct CurveBasis {
  VectorXd nodes;           // N+1 node abscissae
  MatrixXd diff;            // (N+1)x(N+1), d/ds on nodal values
  QuadratureRule<double> rule;
  MatrixXd interp;          // K x (N+1), nodal values -> quadrature points
  MatrixXd interp_diff;     // K x (N+1), nodal values -> derivative at quadrature points

  Eigen::Index num_nodes() const { return nodes.size(); }
};

/// Defaults: 9 nodes, 17-point quadrature.
CurveBasis make_curve_basis(int num_nodes = 9, int quadrature_order = 17);

struct GeodesicOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
  /// Warm starts are used only if both endpoints moved by less than this
  /// fraction of the new chord length.
  double warm_start_fraction = 0.1;
};

/// A discretized curve with pinned endpoints. Column k of `nodes` is the
/// curve at basis.nodes(k).
struct Geodesic {
  MatrixXd nodes;
  double energy = 0.0;
  VectorXd tangent0;
  VectorXd tangent1;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool warm_started = false;

  VectorXd start() const { return nodes.col(0); }
  VectorXd end() const { return nodes.col(nodes.cols() - 1); }
};

/// Nodal values of the straight chord p -> q.
MatrixXd chord(const VectorXd& p, const VectorXd& q, const CurveBasis& basis);

/// Riemannian energy sum_k w_k c_s^T M(c) c_s of the curve with the given
/// nodal values.
double curve_energy(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                    const CurveBasis& basis);

/// Riemannian length by the same quadrature on sqrt(c_s^T M c_s).
double curve_length(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                    const CurveBasis& basis);

/// Energy and its gradient with respect to every nodal value (n x (N+1)).
double curve_energy_gradient(const MatrixXd& nodes, const MetricField& metric,
                             const VectorXd& theta, const CurveBasis& basis, MatrixXd& gradient);

/// Pointwise speed c_s^T M(c) c_s at each quadrature abscissa.
VectorXd curve_speed(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                     const CurveBasis& basis);

/// max_k |speed_k - E| / E; zero for a degenerate curve.
double speed_constancy_residual(const Geodesic& geo, const MetricField& metric,
                                const VectorXd& theta, const CurveBasis& basis);

/// Minimizes the curve energy over interior nodes with BFGS and an Armijo
/// backtracking line search. The initial curve is the chord, or `init` when
/// its endpoints are close enough to (p, q). Once the predicted decrease is
/// below the round-off of E the Armijo test is replaced by a full step that
/// must shrink the gradient. Returns converged = false if the
/// iteration cap or a stalled line search stops the search; throws
/// Error(OptimizerDiverged) on a non-finite energy.
Geodesic solve_geodesic(const VectorXd& p, const VectorXd& q, const MetricField& metric,
                        const VectorXd& theta, const CurveBasis& basis,
                        const GeodesicOptions& options = {},
                        const Geodesic* init = nullptr);

/// Wraps a curve (e.g. a fallback chord) into a Geodesic record.
Geodesic make_geodesic(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                       const CurveBasis& basis);

struct EndpointCotangents {
  VectorXd at_end;    // M(gamma(1)) gamma_s(1)
  VectorXd at_start;  // M(gamma(0)) gamma_s(0)
};

/// Endpoint co-tangents that appear in the first variation of energy.
EndpointCotangents first_variation_terms(const Geodesic& geo, const MetricField& metric,
                                         const VectorXd& theta);

}  // namespace accm
