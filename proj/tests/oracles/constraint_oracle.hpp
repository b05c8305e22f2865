#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "anchormatch/anchors.hpp"
#include "anchormatch/graph.hpp"
#include "matrix_exponential.hpp"

namespace anchormatch::oracle {

// theta from a singular value decomposition of the (PSD) Laplacian, columns
// reordered to ascending eigenvalue. Valid for simple spectra only.
inline Eigen::MatrixXd theta_by_svd(const WeightedGraph& g, Eigen::Index k) {
  const Eigen::MatrixXd a = g.adjacency();
  Eigen::MatrixXd l = -a;
  l.diagonal() += a.rowwise().sum();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(l, Eigen::ComputeFullU);
  const Eigen::Index n = l.rows();
  Eigen::MatrixXd theta(n, k);
  for (Eigen::Index c = 0; c < k; ++c) theta.col(c) = svd.matrixU().col(n - 1 - c).array().square();
  return theta;
}

struct OracleConstraint {
  std::size_t anchor = 0;
  Eigen::VectorXd psi;  // vec(f f^T - n n^T)
  double loss = 0.0;
};

// Every margin constraint of every anchor, built from scratch with the
// heat-distance loss k(x,x) + k(y,y) - 2 k(x,y) + eps.
inline std::vector<OracleConstraint> all_constraints(const WeightedGraph& g, const WeightedGraph& h,
                                                     const AnchorSet& anchors, Eigen::Index k,
                                                     double t, double eps = 1e-9) {
  const Eigen::MatrixXd th_g = theta_by_svd(g, k);
  const Eigen::MatrixXd th_h = theta_by_svd(h, k);
  const Eigen::MatrixXd kg = heat_kernel_from_adjacency(g.adjacency(), t);
  const Eigen::MatrixXd kh = heat_kernel_from_adjacency(h.adjacency(), t);
  auto w = [&](Eigen::Index i, Eigen::Index a) {
    Eigen::VectorXd out(2 * k);
    out << th_g.row(i).transpose(), th_h.row(a).transpose();
    return out;
  };
  auto vec_outer = [](const Eigen::VectorXd& f, const Eigen::VectorXd& n) {
    Eigen::VectorXd out(f.size() * f.size());
    for (Eigen::Index c = 0; c < f.size(); ++c) {
      for (Eigen::Index r = 0; r < f.size(); ++r) out(c * f.size() + r) = f(r) * f(c) - n(r) * n(c);
    }
    return out;
  };
  std::vector<OracleConstraint> out;
  for (std::size_t m = 0; m < anchors.size(); ++m) {
    const auto i = static_cast<Eigen::Index>(anchors[m].source);
    const auto a = static_cast<Eigen::Index>(anchors[m].target);
    const Eigen::VectorXd near = w(i, a);
    for (Eigen::Index b = 0; b < kh.rows(); ++b) {
      if (b == a) continue;
      out.push_back({m, vec_outer(w(i, b), near), kh(b, b) + kh(a, a) - 2.0 * kh(a, b) + eps});
    }
    for (Eigen::Index j = 0; j < kg.rows(); ++j) {
      if (j == i) continue;
      out.push_back({m, vec_outer(w(j, a), near), kg(j, j) + kg(i, i) - 2.0 * kg(i, j) + eps});
    }
  }
  return out;
}

// max over constraints of 1 - xi / Omega - psi^T vec(B).
inline double max_violation(const std::vector<OracleConstraint>& constraints,
                            const Eigen::MatrixXd& b, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd vec_b = b.reshaped();
  double worst = -1e300;
  for (const OracleConstraint& c : constraints) {
    const double v = 1.0 - xi(static_cast<Eigen::Index>(c.anchor)) / c.loss - c.psi.dot(vec_b);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace anchormatch::oracle
