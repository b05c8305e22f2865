#pragma once

#include <Eigen/Dense>

namespace anchormatch::detail {

struct DenseQpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per inequality row
  bool converged = false;
  int iterations = 0;
};

/// minimize 1/2 x^T Q x + c^T x  subject to  A x <= h,
/// with Q symmetric positive semi-definite. Mehrotra predictor-corrector
/// interior point on dense matrices; meant for a few hundred variables.
DenseQpResult solve_dense_qp(const Eigen::MatrixXd& q, const Eigen::VectorXd& c,
                             const Eigen::MatrixXd& a, const Eigen::VectorXd& h,
                             double tol = 1e-11, int max_iterations = 200);

}  // namespace anchormatch::detail
