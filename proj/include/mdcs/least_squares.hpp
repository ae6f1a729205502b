#pragma once

// Bounded Levenberg-Marquardt for small dense problems.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace mdcs {

// Fills the residual vector r(p) and, when J is non-null, its Jacobian dr/dp.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J)>;

struct LsqOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-10;  // on the residual sum of squares
  double step_tolerance = 1e-12;      // on |dp| relative to |p|
  double initial_damping = 1e-3;
};

struct LsqResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1 with s^2 = RSS / (m - n)
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
  std::vector<double> cost_history;  // RSS after every accepted step
  int iterations = 0;
  bool converged = false;
};

// Bounds are enforced by projecting every trial point onto [lower, upper].
LsqResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd p0,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              std::size_t residual_count, const LsqOptions& options = {});

}  // namespace mdcs
