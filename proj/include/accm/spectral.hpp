#pragma once

// Chebyshev-Gauss-Lobatto machinery on the unit interval [0, 1]:
// nodes, spectral differentiation, barycentric interpolation and
// Clenshaw-Curtis quadrature. Node k sits at s_k = (1 - cos(pi k / N)) / 2,
// so s_0 = 0 and s_N = 1.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "accm/error.hpp"

namespace accm {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
struct QuadratureRule {
  Vector<Scalar> abscissae;
  Vector<Scalar> weights;

  Eigen::Index order() const { return abscissae.size(); }

  /// Applies the rule to samples taken at the abscissae.
  template <typename Derived>
  Scalar integrate(const Eigen::MatrixBase<Derived>& samples) const {
    return weights.dot(samples);
  }
};

/// Chebyshev-Gauss-Lobatto points mapped to [0, 1], increasing.
template <typename Scalar = double>
Vector<Scalar> cgl_nodes(Eigen::Index count) {
  if (count < 2) {
    throw Error(ErrorKind::InvalidArgument, "cgl_nodes: need at least 2 nodes");
  }
  const Eigen::Index N = count - 1;
  Vector<Scalar> s(count);
  for (Eigen::Index k = 0; k <= N; ++k) {
    const Scalar x = std::cos(std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(N));
    s(k) = (Scalar(1) - x) / Scalar(2);
  }
  // exact endpoints and midpoint
  s(0) = Scalar(0);
  s(N) = Scalar(1);
  if (N % 2 == 0) s(N / 2) = Scalar(0.5);
  return s;
}

/// Spectral differentiation matrix acting on nodal values at cgl_nodes(count),
/// scaled for d/ds on [0, 1].
template <typename Scalar = double>
Matrix<Scalar> cgl_differentiation_matrix(Eigen::Index count) {
  if (count < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "cgl_differentiation_matrix: need at least 2 nodes");
  }
  const Eigen::Index N = count - 1;
  Vector<Scalar> x(count);
  Vector<Scalar> c(count);
  for (Eigen::Index k = 0; k <= N; ++k) {
    x(k) = std::cos(std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(N));
    c(k) = ((k == 0 || k == N) ? Scalar(2) : Scalar(1)) * ((k % 2) ? Scalar(-1) : Scalar(1));
  }
  Matrix<Scalar> D = Matrix<Scalar>::Zero(count, count);
  for (Eigen::Index i = 0; i <= N; ++i) {
    for (Eigen::Index j = 0; j <= N; ++j) {
      if (i != j) D(i, j) = (c(i) / c(j)) / (x(i) - x(j));
    }
  }
  // negative-sum trick for the diagonal
  for (Eigen::Index i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
  // s = (1 - x) / 2  =>  d/ds = -2 d/dx
  return Scalar(-2) * D;
}

/// Interpolation matrix P with P * values(nodes) = values(points), using the
/// barycentric formula for Chebyshev-Gauss-Lobatto nodes.
template <typename Scalar = double>
Matrix<Scalar> cgl_interpolation_matrix(const Vector<Scalar>& nodes,
                                        const Vector<Scalar>& points) {
  const Eigen::Index count = nodes.size();
  const Eigen::Index N = count - 1;
  Vector<Scalar> w(count);
  for (Eigen::Index j = 0; j <= N; ++j) {
    w(j) = ((j % 2) ? Scalar(-1) : Scalar(1)) * ((j == 0 || j == N) ? Scalar(0.5) : Scalar(1));
  }
  Matrix<Scalar> P = Matrix<Scalar>::Zero(points.size(), count);
  for (Eigen::Index k = 0; k < points.size(); ++k) {
    Eigen::Index hit = -1;
    for (Eigen::Index j = 0; j < count; ++j) {
      if (std::abs(points(k) - nodes(j)) < Scalar(1e-14)) {
        hit = j;
        break;
      }
    }
    if (hit >= 0) {
      P(k, hit) = Scalar(1);
      continue;
    }
    Scalar denom = 0;
    for (Eigen::Index j = 0; j < count; ++j) {
      const Scalar t = w(j) / (points(k) - nodes(j));
      P(k, j) = t;
      denom += t;
    }
    P.row(k) /= denom;
  }
  return P;
}

/// Clenshaw-Curtis rule with `order` points on [0, 1]; exact for
/// polynomials of degree <= order - 1.
template <typename Scalar = double>
QuadratureRule<Scalar> clenshaw_curtis(Eigen::Index order) {
  if (order < 2) {
    throw Error(ErrorKind::InvalidArgument, "clenshaw_curtis: order must be >= 2");
  }
  const Eigen::Index N = order - 1;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  QuadratureRule<Scalar> rule;
  rule.abscissae = cgl_nodes<Scalar>(order);
  rule.weights = Vector<Scalar>::Zero(order);

  // weights on [-1, 1]; symmetric so the node ordering flip is harmless
  const Scalar NN = Scalar(N) * Scalar(N);
  if (N % 2 == 0) {
    rule.weights(0) = Scalar(1) / (NN - Scalar(1));
  } else {
    rule.weights(0) = Scalar(1) / NN;
  }
  rule.weights(N) = rule.weights(0);
  for (Eigen::Index i = 1; i < N; ++i) {
    const Scalar theta = pi * Scalar(i) / Scalar(N);
    Scalar v = 1;
    for (Eigen::Index k = 1; 2 * k < N; ++k) {
      v -= Scalar(2) * std::cos(Scalar(2 * k) * theta) / (Scalar(4 * k * k) - Scalar(1));
    }
    if (N % 2 == 0) v -= std::cos(Scalar(N) * theta) / (NN - Scalar(1));
    rule.weights(i) = Scalar(2) * v / Scalar(N);
  }
  rule.weights /= Scalar(2);
  return rule;
}

}  // namespace accm
