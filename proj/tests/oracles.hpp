#pragma once
// Independent reference computations used only by the tests. Nothing here
// touches the spectral machinery under test.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

using MetricFn = std::function<MatrixXd(const VectorXd&)>;

/// Energy of the straight line p -> q by the composite trapezoid rule.
inline double trapezoid_line_energy(const MetricFn& M, const VectorXd& p, const VectorXd& q,
                                    int panels) {
  const VectorXd d = q - p;
  double sum = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double s = static_cast<double>(i) / panels;
    const double w = (i == 0 || i == panels) ? 0.5 : 1.0;
    sum += w * d.dot(M(p + s * d) * d);
  }
  return sum / panels;
}

/// Energy of a polyline with uniformly spaced parameter values: each segment
/// contributes (dx / h)^T M (dx / h) h, with M averaged by Simpson's rule.
inline double polyline_energy(const MetricFn& M, const std::vector<VectorXd>& pts) {
  const double h = 1.0 / static_cast<double>(pts.size() - 1);
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const VectorXd d = pts[i + 1] - pts[i];
    const MatrixXd Mavg =
        (M(pts[i]) + 4.0 * M(0.5 * (pts[i] + pts[i + 1])) + M(pts[i + 1])) / 6.0;
    e += d.dot(Mavg * d) / h;
  }
  return e;
}

/// Energy contribution of the two segments touching vertex i.
inline double local_energy(const MetricFn& M, const std::vector<VectorXd>& pts, std::size_t i,
                           const VectorXd& v, double h) {
  auto seg = [&](const VectorXd& a, const VectorXd& b) {
    const VectorXd d = b - a;
    const MatrixXd Mavg = (M(a) + 4.0 * M(0.5 * (a + b)) + M(b)) / 6.0;
    return d.dot(Mavg * d) / h;
  };
  return seg(pts[i - 1], v) + seg(v, pts[i + 1]);
}

/// Brute-force minimal energy between p and q: a polyline with `segments`
/// pieces, relaxed one vertex at a time (damped Newton on each vertex with
/// finite-difference derivatives), refined coarse to fine from the chord.
inline double relaxed_geodesic_energy(const MetricFn& M, const VectorXd& p, const VectorXd& q,
                                      int segments, int sweeps_per_level = 400) {
  const Eigen::Index n = p.size();
  std::vector<VectorXd> pts{p, q};
  int count = 1;
  while (count < segments) {
    const int next = std::min(segments, 2 * count);
    // resample the current polyline at `next` uniform parameters
    std::vector<VectorXd> fine(static_cast<std::size_t>(next) + 1);
    for (int k = 0; k <= next; ++k) {
      const double s = static_cast<double>(k) / next * count;
      const int j = std::min(static_cast<int>(std::floor(s)), count - 1);
      const double t = s - j;
      fine[static_cast<std::size_t>(k)] =
          (1.0 - t) * pts[static_cast<std::size_t>(j)] + t * pts[static_cast<std::size_t>(j) + 1];
    }
    pts = std::move(fine);
    count = next;
    const double h = 1.0 / count;
    const double step = 1e-5;
    for (int sweep = 0; sweep < sweeps_per_level; ++sweep) {
      double moved = 0.0;
      for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        auto f = [&](const VectorXd& v) { return local_energy(M, pts, i, v, h); };
        const VectorXd v0 = pts[i];
        const double f0 = f(v0);
        VectorXd g(n);
        MatrixXd H(n, n);
        for (Eigen::Index a = 0; a < n; ++a) {
          VectorXd ea = VectorXd::Zero(n);
          ea(a) = step;
          const double fp = f(v0 + ea), fm = f(v0 - ea);
          g(a) = (fp - fm) / (2.0 * step);
          H(a, a) = (fp - 2.0 * f0 + fm) / (step * step);
          for (Eigen::Index b = 0; b < a; ++b) {
            VectorXd eb = VectorXd::Zero(n);
            eb(b) = step;
            H(a, b) = H(b, a) =
                (f(v0 + ea + eb) - f(v0 + ea - eb) - f(v0 - ea + eb) + f(v0 - ea - eb)) /
                (4.0 * step * step);
          }
        }
        Eigen::LLT<MatrixXd> llt(H);
        VectorXd dv = llt.info() == Eigen::Success ? VectorXd(-llt.solve(g)) : VectorXd(-h * g);
        double alpha = 1.0;
        while (alpha > 1e-8 && f(v0 + alpha * dv) > f0) alpha *= 0.5;
        if (alpha > 1e-8) {
          pts[i] = v0 + alpha * dv;
          moved = std::max(moved, alpha * dv.norm());
        }
      }
      if (moved < 1e-10) break;
    }
  }
  return polyline_energy(M, pts);
}

/// Central-difference gradient of a scalar function.
inline VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x,
                            double h = 1e-6) {
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    VectorXd e = VectorXd::Zero(x.size());
    e(i) = h;
    g(i) = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return g;
}

/// Inverse of a 3x3 matrix by the adjugate formula.
inline Matrix3d adjugate_inverse(const Matrix3d& A) {
  Matrix3d adj;
  adj(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  adj(0, 1) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
  adj(0, 2) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
  adj(1, 0) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
  adj(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
  adj(1, 2) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
  adj(2, 0) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
  adj(2, 1) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
  adj(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const double det = A(0, 0) * adj(0, 0) + A(0, 1) * adj(1, 0) + A(0, 2) * adj(2, 0);
  return adj / det;
}

/// The example's dual metric written out directly from its closed form.
inline Matrix3d example_dual(double x1, double th1) {
  Matrix3d W;
  W << 1.42, 0.0, 1.42 * (th1 - 1.0),
       0.0, 6.21, -2.85 * x1,
       1.42 * (th1 - 1.0), -2.85 * x1, 1.42 * th1 * th1 - 2.84 * th1 + 1.30 * x1 * x1 + 5.79;
  return W;
}

}  // namespace oracle
