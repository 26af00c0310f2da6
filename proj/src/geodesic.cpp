#include "accm/geodesic.hpp"

#include <cmath>
#include <limits>

#include "accm/error.hpp"

namespace accm {

namespace {

// Interior nodal values <-> flat decision vector, node-major.
VectorXd pack_interior(const MatrixXd& nodes) {
  const Eigen::Index n = nodes.rows();
  const Eigen::Index interior = nodes.cols() - 2;
  VectorXd z(n * interior);
  for (Eigen::Index j = 0; j < interior; ++j) z.segment(j * n, n) = nodes.col(j + 1);
  return z;
}

void unpack_interior(const VectorXd& z, MatrixXd& nodes) {
  const Eigen::Index n = nodes.rows();
  const Eigen::Index interior = nodes.cols() - 2;
  for (Eigen::Index j = 0; j < interior; ++j) nodes.col(j + 1) = z.segment(j * n, n);
}

VectorXd pack_gradient(const MatrixXd& grad) { return pack_interior(grad); }

// Gauss-Newton Hessian of the energy with M frozen along the current curve:
// block (a, b) = 2 sum_k w_k D(k, a) D(k, b) M_k over interior nodes.
MatrixXd frozen_metric_hessian(const MatrixXd& nodes, const MetricField& metric,
                               const VectorXd& theta, const CurveBasis& basis) {
  const Eigen::Index n = nodes.rows();
  const Eigen::Index interior = nodes.cols() - 2;
  const MatrixXd Y = nodes * basis.interp.transpose();
  MatrixXd H = MatrixXd::Zero(n * interior, n * interior);
  for (Eigen::Index k = 0; k < basis.rule.order(); ++k) {
    const MatrixXd M = metric_at(metric, Y.col(k), theta);
    const double wk = 2.0 * basis.rule.weights(k);
    for (Eigen::Index a = 0; a < interior; ++a) {
      const double da = basis.interp_diff(k, a + 1);
      for (Eigen::Index b = 0; b < interior; ++b) {
        H.block(a * n, b * n, n, n) += (wk * da * basis.interp_diff(k, b + 1)) * M;
      }
    }
  }
  return H;
}

}  // namespace

CurveBasis make_curve_basis(int num_nodes, int quadrature_order) {
  if (num_nodes < 2) {
    throw Error(ErrorKind::InvalidArgument, "curve basis needs at least 2 nodes");
  }
  CurveBasis basis;
  basis.nodes = cgl_nodes<double>(num_nodes);
  basis.diff = cgl_differentiation_matrix<double>(num_nodes);
  basis.rule = clenshaw_curtis<double>(quadrature_order);
  basis.interp = cgl_interpolation_matrix<double>(basis.nodes, basis.rule.abscissae);
  basis.interp_diff = basis.interp * basis.diff;
  return basis;
}

MatrixXd chord(const VectorXd& p, const VectorXd& q, const CurveBasis& basis) {
  MatrixXd nodes(p.size(), basis.num_nodes());
  for (Eigen::Index k = 0; k < basis.num_nodes(); ++k) {
    const double s = basis.nodes(k);
    nodes.col(k) = (1.0 - s) * p + s * q;
  }
  nodes.col(0) = p;
  nodes.col(basis.num_nodes() - 1) = q;
  return nodes;
}

VectorXd curve_speed(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                     const CurveBasis& basis) {
  const MatrixXd Y = nodes * basis.interp.transpose();
  const MatrixXd V = nodes * basis.interp_diff.transpose();
  VectorXd speed(basis.rule.order());
  for (Eigen::Index k = 0; k < speed.size(); ++k) {
    const MatrixXd M = metric_at(metric, Y.col(k), theta);
    speed(k) = V.col(k).dot(M * V.col(k));
  }
  return speed;
}

double curve_energy(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                    const CurveBasis& basis) {
  if (nodes.cols() < 2) {
    throw Error(ErrorKind::InvalidArgument, "curve_energy: curve needs at least 2 nodes");
  }
  if (nodes.rows() != metric.dim) {
    throw Error(ErrorKind::InvalidArgument, "curve_energy: metric dimension mismatch");
  }
  return basis.rule.integrate(curve_speed(nodes, metric, theta, basis));
}

double curve_length(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                    const CurveBasis& basis) {
  return basis.rule.integrate(curve_speed(nodes, metric, theta, basis).cwiseMax(0.0).cwiseSqrt());
}

double curve_energy_gradient(const MatrixXd& nodes, const MetricField& metric,
                             const VectorXd& theta, const CurveBasis& basis, MatrixXd& gradient) {
  const Eigen::Index n = nodes.rows();
  const Eigen::Index K = basis.rule.order();
  const MatrixXd Y = nodes * basis.interp.transpose();
  const MatrixXd V = nodes * basis.interp_diff.transpose();
  MatrixXd grad_v(n, K);
  MatrixXd grad_y(n, K);
  double energy = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const MetricSample sample = evaluate_metric(metric, Y.col(k), theta);
    const VectorXd mv = sample.metric * V.col(k);
    const double wk = basis.rule.weights(k);
    energy += wk * V.col(k).dot(mv);
    grad_v.col(k) = 2.0 * wk * mv;
    // v^T dM/dx_j v = -(Mv)^T dW/dx_j (Mv)
    const auto dW = metric.dual_dx(Y.col(k), theta);
    for (Eigen::Index j = 0; j < n; ++j) grad_y(j, k) = -wk * mv.dot(dW[j] * mv);
  }
  gradient = grad_v * basis.interp_diff + grad_y * basis.interp;
  return energy;
}

Geodesic make_geodesic(const MatrixXd& nodes, const MetricField& metric, const VectorXd& theta,
                       const CurveBasis& basis) {
  Geodesic geo;
  geo.nodes = nodes;
  geo.energy = curve_energy(nodes, metric, theta, basis);
  const MatrixXd tangents = nodes * basis.diff.transpose();
  geo.tangent0 = tangents.col(0);
  geo.tangent1 = tangents.col(tangents.cols() - 1);
  return geo;
}

double speed_constancy_residual(const Geodesic& geo, const MetricField& metric,
                                const VectorXd& theta, const CurveBasis& basis) {
  if (geo.energy <= 0.0) return 0.0;
  const VectorXd speed = curve_speed(geo.nodes, metric, theta, basis);
  return (speed.array() - geo.energy).abs().maxCoeff() / geo.energy;
}

Geodesic solve_geodesic(const VectorXd& p, const VectorXd& q, const MetricField& metric,
                        const VectorXd& theta, const CurveBasis& basis,
                        const GeodesicOptions& options, const Geodesic* init) {
  if (p.size() != metric.dim || q.size() != metric.dim) {
    throw Error(ErrorKind::InvalidArgument, "solve_geodesic: endpoint dimension mismatch");
  }
  if (!p.allFinite() || !q.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "solve_geodesic: endpoints must be finite");
  }
  const Eigen::Index n = p.size();
  const Eigen::Index count = basis.num_nodes();

  if ((q - p).norm() == 0.0) {
    Geodesic geo;
    geo.nodes = chord(p, q, basis);
    geo.tangent0 = VectorXd::Zero(n);
    geo.tangent1 = VectorXd::Zero(n);
    geo.converged = true;
    return geo;
  }

  MatrixXd nodes = chord(p, q, basis);
  bool warm = false;
  if (init != nullptr && init->nodes.rows() == n && init->nodes.cols() == count) {
    const double radius = options.warm_start_fraction * (q - p).norm();
    const VectorXd dp = p - init->start();
    const VectorXd dq = q - init->end();
    if (dp.norm() < radius && dq.norm() < radius) {
      for (Eigen::Index k = 0; k < count; ++k) {
        const double s = basis.nodes(k);
        nodes.col(k) = init->nodes.col(k) + (1.0 - s) * dp + s * dq;
      }
      nodes.col(0) = p;
      nodes.col(count - 1) = q;
      warm = true;
    }
  }

  Geodesic result;
  result.warm_started = warm;
  if (count <= 2) {
    result = make_geodesic(nodes, metric, theta, basis);
    result.converged = true;
    return result;
  }

  MatrixXd grad_full;
  double energy = curve_energy_gradient(nodes, metric, theta, basis, grad_full);
  if (!std::isfinite(energy)) {
    throw Error(ErrorKind::OptimizerDiverged, "solve_geodesic: non-finite initial energy");
  }
  VectorXd z = pack_interior(nodes);
  VectorXd g = pack_gradient(grad_full);

  const MatrixXd H0 = frozen_metric_hessian(nodes, metric, theta, basis);
  MatrixXd Hinv = H0.ldlt().solve(MatrixXd::Identity(H0.rows(), H0.cols()));

  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 50;
  constexpr double kFlat = 1e-13;

  int iter = 0;
  bool converged = g.norm() <= options.gradient_tolerance;
  MatrixXd trial_nodes = nodes;
  MatrixXd trial_grad;
  while (!converged && iter < options.max_iterations) {
    VectorXd dir = -Hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      // lost descent: restart from the preconditioner
      Hinv = H0.ldlt().solve(MatrixXd::Identity(H0.rows(), H0.cols()));
      dir = -Hinv * g;
      slope = g.dot(dir);
    }
    double alpha = 1.0;
    bool accepted = false;
    VectorXd z_new;
    double e_new = energy;
    if (-slope <= kFlat * std::max(1.0, std::abs(energy))) {
      // the predicted decrease is below energy round-off, so Armijo cannot
      // discriminate; take the full step if it shrinks the gradient
      z_new = z + dir;
      unpack_interior(z_new, trial_nodes);
      e_new = curve_energy_gradient(trial_nodes, metric, theta, basis, trial_grad);
      if (!std::isfinite(e_new)) {
        throw Error(ErrorKind::OptimizerDiverged, "solve_geodesic: non-finite energy in search");
      }
      accepted = pack_gradient(trial_grad).norm() < g.norm();
      if (!accepted) {
        ++iter;
        break;
      }
    }
    for (int h = 0; !accepted && -slope > kFlat * std::max(1.0, std::abs(energy)) &&
                    h < kMaxHalvings;
         ++h) {
      z_new = z + alpha * dir;
      unpack_interior(z_new, trial_nodes);
      e_new = curve_energy_gradient(trial_nodes, metric, theta, basis, trial_grad);
      if (!std::isfinite(e_new)) {
        throw Error(ErrorKind::OptimizerDiverged, "solve_geodesic: non-finite energy in search");
      }
      if (e_new <= energy + kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++iter;
    if (!accepted) break;  // stalled at round-off level

    const VectorXd g_new = pack_gradient(trial_grad);
    const VectorXd s = z_new - z;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const VectorXd Hy = Hinv * y;
      Hinv += (rho * rho * y.dot(Hy) + rho) * (s * s.transpose()) -
              rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    z = z_new;
    g = g_new;
    energy = e_new;
    nodes = trial_nodes;
    converged = g.norm() <= options.gradient_tolerance;
  }

  result = make_geodesic(nodes, metric, theta, basis);
  result.converged = converged;
  result.iterations = iter;
  result.gradient_norm = g.norm();
  result.warm_started = warm;
  return result;
}

EndpointCotangents first_variation_terms(const Geodesic& geo, const MetricField& metric,
                                         const VectorXd& theta) {
  EndpointCotangents out;
  out.at_end = metric_at(metric, geo.end(), theta) * geo.tangent1;
  out.at_start = metric_at(metric, geo.start(), theta) * geo.tangent0;
  return out;
}

}  // namespace accm
