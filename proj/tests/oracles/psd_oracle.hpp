#pragma once

#include <random>

#include <Eigen/Dense>

namespace anchormatch::oracle {

// True when no sampled PSD neighbour of `projected` is Frobenius-closer to
// `input`. Neighbours are (1 - e) P + e R R^T, and P + e v v^T, both PSD.
inline bool is_nearest_among_perturbations(const Eigen::MatrixXd& input,
                                           const Eigen::MatrixXd& projected, int samples,
                                           std::mt19937_64& rng) {
  const Eigen::Index n = input.rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> step(1e-3, 0.2);
  const double own = (input - projected).norm();
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = normal(rng);
    const double e = step(rng);
    Eigen::MatrixXd candidate;
    if (s % 2 == 0) {
      candidate = (1.0 - e) * projected + e * (r * r.transpose()) / static_cast<double>(n);
    } else {
      const Eigen::VectorXd v = r.col(0);
      candidate = projected + e * v * v.transpose();
    }
    if ((input - candidate).norm() < own - 1e-12) return false;
  }
  return true;
}

}  // namespace anchormatch::oracle
