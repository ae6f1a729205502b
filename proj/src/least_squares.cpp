#include "mdcs/least_squares.hpp"

#include <cmath>
#include <limits>

#include "mdcs/errors.hpp"

namespace mdcs {

namespace {

Eigen::VectorXd project(Eigen::VectorXd p, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return p.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

LsqResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd p0,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              std::size_t residual_count, const LsqOptions& options) {
  const auto n = p0.size();
  const auto m = static_cast<Eigen::Index>(residual_count);
  if (lower.size() != n || upper.size() != n) throw FitInputError("lsq: bound size mismatch");
  if (m < n) throw FitInputError("lsq: fewer residuals than parameters");

  Eigen::VectorXd p = project(std::move(p0), lower, upper);
  Eigen::VectorXd r(m), r_try(m);
  Eigen::MatrixXd J(m, n);
  f(p, r, &J);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw FitInputError("lsq: non-finite residual at the initial point");

  LsqResult res;
  res.initial_residual_norm = std::sqrt(cost);
  res.cost_history.push_back(cost);
  double lambda = options.initial_damping;

  int it = 0;
  bool done = false;
  for (; it < options.max_iterations && !done; ++it) {
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd d = A.diagonal().cwiseMax(1e-12 * std::max(1.0, A.diagonal().maxCoeff()));

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd Ad = A;
      Ad.diagonal() += lambda * d;
      const Eigen::VectorXd step = Ad.ldlt().solve(-g);
      const Eigen::VectorXd p_try = project(p + step, lower, upper);
      const Eigen::VectorXd dp = p_try - p;
      if (dp.norm() <= options.step_tolerance * (p.norm() + options.step_tolerance)) {
        done = true;  // no movement left, inside the box or pinned on it
        break;
      }
      f(p_try, r_try, nullptr);
      const double c_try = r_try.squaredNorm();
      if (std::isfinite(c_try) && c_try <= cost) {
        accepted = true;
        const double rel = cost > 0.0 ? (cost - c_try) / cost : 0.0;
        p = p_try;
        r = r_try;
        cost = c_try;
        f(p, r, &J);
        res.cost_history.push_back(cost);
        lambda = std::max(lambda * 0.1, 1e-15);
        if (rel < options.relative_tolerance) done = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e20) {
          done = true;  // no descent direction at working precision
          break;
        }
      }
    }
  }

  res.params = p;
  res.iterations = it;
  res.converged = done;
  res.residual_norm = std::sqrt(cost);
  const Eigen::MatrixXd A = J.transpose() * J;
  const double dof = static_cast<double>(m - n);
  const double s2 = dof > 0.0 ? cost / dof : 0.0;
  res.covariance = s2 * A.completeOrthogonalDecomposition().pseudoInverse();
  return res;
}

}  // namespace mdcs
