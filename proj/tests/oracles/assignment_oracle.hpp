#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace anchormatch::oracle {

// max x^T W x over permutations for p = q, row index r * q + c.
inline double best_permutation_objective(const Eigen::MatrixXd& w, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = -1e300;
  do {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(w.rows());
    for (std::size_t r = 0; r < n; ++r) x(static_cast<Eigen::Index>(r * n + perm[r])) = 1.0;
    best = std::max(best, x.dot(w * x));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace anchormatch::oracle
