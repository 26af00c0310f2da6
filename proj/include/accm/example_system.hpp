#pragma once

// Built-in benchmark: a three-state system with one extended-matched and two
// matched uncertain parameters,
//
//   xdot = [x3, x1^2 - x2, tanh(x2)]^T - th1 [x1, 0, 0]^T
//          + [0, 0, 1]^T (u - th2 x3 - th3 x1^2),
//
// and its parameter-dependent dual metric W(x1, th1).

#include "accm/metric.hpp"
#include "accm/system.hpp"

namespace accm::example {

inline constexpr const char* kSystemName = "builtin.lopez_example";

/// True parameters (th1 | th2, th3) = (-1 | -0.5, -1.5).
SystemModel make_system();

/// Closed-form dual metric W(x1, th1).
MatrixXd dual_metric(double x1, double th1);

/// dW/dx1.
MatrixXd dual_metric_dx1(double x1, double th1);

/// dW/dth1.
MatrixXd dual_metric_dth1(double x1, double th1);

/// Metric field with analytic derivatives; eigenvalue bounds are scanned over
/// x1 in [-3, 3], th1 in [-2, 2].
MetricField make_metric();

}  // namespace accm::example
