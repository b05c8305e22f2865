#include "anchormatch/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anchormatch/detail/dense_qp.hpp"
#include "anchormatch/error.hpp"

namespace anchormatch {

double rescale_loss(const KernelMatrix& kernel, NodeId x, NodeId y, LossMode mode) {
  if (x == y) throw Error(Errc::SameNode, "loss between node " + std::to_string(x) + " and itself");
  switch (mode) {
    case LossMode::HeatDistance:
      return kernel(x, x) + kernel(y, y) - 2.0 * kernel(x, y) + kLossEpsilon;
    case LossMode::RawKernel:
      return kernel(x, y) + kLossEpsilon;
  }
  return kLossEpsilon;
}

Eigen::VectorXd MarginConstraint::psi() const {
  const Eigen::MatrixXd m = far * far.transpose() - near * near.transpose();
  return m.reshaped();
}

double MarginConstraint::margin(const Eigen::MatrixXd& b) const {
  return far.dot(b * far) - near.dot(b * near);
}

double MarginConstraint::violation(const Eigen::MatrixXd& b, double xi) const {
  return 1.0 - xi / loss - margin(b);
}

LearningProblem LearningProblem::build(const SpectralDecomposition& source,
                                       const SpectralDecomposition& target, AnchorSet anchors,
                                       std::size_t k_source, std::size_t k_target, double t) {
  anchors.check_bounds(source.size(), target.size());
  return LearningProblem{node_features(source, k_source), node_features(target, k_target),
                         heat_kernel(source, t), heat_kernel(target, t), std::move(anchors)};
}

std::vector<MarginConstraint> enumerate_constraints(const LearningProblem& problem,
                                                    std::size_t anchor_index, LossMode mode) {
  const AnchorPair& anchor = problem.anchors[anchor_index];
  const Eigen::VectorXd near = problem.pair(anchor.source, anchor.target);
  const std::size_t n_source = problem.source_features.nodes();
  const std::size_t n_target = problem.target_features.nodes();

  std::vector<MarginConstraint> out;
  out.reserve(n_source + n_target);
  for (NodeId v = 0; v < std::max(n_source, n_target); ++v) {
    if (v < n_target && v != anchor.target) {
      out.push_back(MarginConstraint{anchor_index, v, CompetitorSide::Target,
                                     problem.pair(anchor.source, v), near,
                                     rescale_loss(problem.target_kernel, v, anchor.target, mode)});
    }
    if (v < n_source && v != anchor.source) {
      out.push_back(MarginConstraint{anchor_index, v, CompetitorSide::Source,
                                     problem.pair(v, anchor.target), near,
                                     rescale_loss(problem.source_kernel, v, anchor.source, mode)});
    }
  }
  return out;
}

std::optional<MarginConstraint> enumerate_violations(const Eigen::MatrixXd& b, double xi,
                                                     std::size_t anchor_index,
                                                     const LearningProblem& problem,
                                                     const LearnConfig& config) {
  std::optional<MarginConstraint> best;
  double best_violation = config.cg_tol;
  for (MarginConstraint& c : enumerate_constraints(problem, anchor_index, config.loss_mode)) {
    const double v = c.violation(b, xi);
    if (v > best_violation) {
      best_violation = v;
      best = std::move(c);
    }
  }
  return best;
}

Eigen::VectorXd slacks_for(const Eigen::MatrixXd& b, std::span<const MarginConstraint> constraints,
                           std::size_t anchor_count) {
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(anchor_count));
  for (const MarginConstraint& c : constraints) {
    const auto m = static_cast<Eigen::Index>(c.anchor_index);
    xi(m) = std::max(xi(m), c.loss * (1.0 - c.margin(b)));
  }
  return xi;
}

QpSolution solve_restricted_qp(std::span<const MarginConstraint> working_set,
                               std::size_t anchor_count, std::size_t dim,
                               const LearnConfig& config) {
  const auto d = static_cast<Eigen::Index>(dim);
  QpSolution sol{Eigen::MatrixXd::Zero(d, d),
                 Eigen::VectorXd::Zero(static_cast<Eigen::Index>(anchor_count)),
                 Eigen::VectorXd(0), 0.0, 0.0};
  if (working_set.empty()) return sol;

  const auto m = static_cast<Eigen::Index>(working_set.size());
  const double cap = config.c_reg / static_cast<double>(anchor_count);

  // Gram matrix of the psi vectors without materialising them:
  // <f f^T, g g^T>_F = (f . g)^2.
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const MarginConstraint& cr = working_set[static_cast<std::size_t>(r)];
    if (static_cast<std::size_t>(cr.far.size()) != dim || cr.anchor_index >= anchor_count) {
      throw Error(Errc::DimensionMismatch, "constraint does not fit the restricted QP");
    }
    for (Eigen::Index s = 0; s <= r; ++s) {
      const MarginConstraint& cs = working_set[static_cast<std::size_t>(s)];
      const double ff = cr.far.dot(cs.far), fn = cr.far.dot(cs.near);
      const double nf = cr.near.dot(cs.far), nn = cr.near.dot(cs.near);
      gram(r, s) = gram(s, r) = ff * ff - fn * fn - nf * nf + nn * nn;
    }
  }

  // Dual: min 1/2 a^T G a - 1^T a, a >= 0, per anchor sum a_c / Omega_c <= C / n.
  std::vector<std::size_t> groups;
  for (const MarginConstraint& c : working_set) {
    if (std::find(groups.begin(), groups.end(), c.anchor_index) == groups.end()) {
      groups.push_back(c.anchor_index);
    }
  }
  const auto rows = m + static_cast<Eigen::Index>(groups.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, m);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(rows);
  a.topRows(m) = -Eigen::MatrixXd::Identity(m, m);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Eigen::Index row = m + static_cast<Eigen::Index>(g);
    h(row) = cap;
    for (Eigen::Index c = 0; c < m; ++c) {
      const MarginConstraint& mc = working_set[static_cast<std::size_t>(c)];
      if (mc.anchor_index == groups[g]) a(row, c) = 1.0 / mc.loss;
    }
  }

  const detail::DenseQpResult dual =
      detail::solve_dense_qp(gram, -Eigen::VectorXd::Ones(m), a, h);
  if (!dual.x.allFinite()) throw Error(Errc::QPNumericalFailure, "dual iterate is not finite");
  sol.alpha = dual.x.cwiseMax(0.0);

  for (Eigen::Index c = 0; c < m; ++c) {
    const MarginConstraint& mc = working_set[static_cast<std::size_t>(c)];
    sol.b.noalias() += sol.alpha(c) * (mc.far * mc.far.transpose() - mc.near * mc.near.transpose());
  }
  sol.b = 0.5 * (sol.b + sol.b.transpose()).eval();
  sol.xi = slacks_for(sol.b, working_set, anchor_count);

  const double half_norm = 0.5 * sol.b.squaredNorm();
  sol.primal_objective = half_norm + cap * sol.xi.sum();
  sol.dual_objective = sol.alpha.sum() - half_norm;

  const double gap = sol.primal_objective - sol.dual_objective;
  if (gap > config.qp_tol * std::max(1.0, std::abs(sol.primal_objective))) {
    throw Error(Errc::QPNumericalFailure, "duality gap " + std::to_string(gap) + " after " +
                                              std::to_string(dual.iterations) + " iterations");
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double used = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      const MarginConstraint& mc = working_set[static_cast<std::size_t>(c)];
      if (mc.anchor_index == groups[g]) used += sol.alpha(c) / mc.loss;
    }
    if (used > cap + config.qp_tol) {
      throw Error(Errc::QPNumericalFailure, "dual bound exceeded for anchor " +
                                                std::to_string(groups[g]));
    }
  }
  return sol;
}

ProximityMatrix psd_project(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(Errc::NotSymmetric, "matrix is not square");
  if (m.size() == 0) return ProximityMatrix(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error(Errc::NotSymmetric, "cannot project an asymmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "eigensolver failed during PSD projection");
  }
  const Eigen::VectorXd clamped = solver.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd out = v * clamped.asDiagonal() * v.transpose();
  return ProximityMatrix(0.5 * (out + out.transpose()));
}

LearnResult learn_proximity(const LearningProblem& problem, const LearnConfig& config) {
  const std::size_t n = problem.anchors.size();
  const auto d = static_cast<Eigen::Index>(problem.dim());

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  if (config.block_identity_start) {
    if (problem.source_features.k() != problem.target_features.k()) {
      throw Error(Errc::DimensionMismatch, "block-identity start needs K == K'");
    }
    b = ProximityMatrix::block_identity(problem.source_features.k()).matrix();
  }

  LearnResult result{ProximityMatrix(b), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                     {}, false, 0, {}};

  auto add_violations = [&](std::vector<MarginConstraint>& into) {
    std::size_t added = 0;
    for (std::size_t m = 0; m < n; ++m) {
      auto c = enumerate_violations(result.b.matrix(), result.xi(static_cast<Eigen::Index>(m)), m,
                                    problem, config);
      if (!c) continue;
      const bool known = std::any_of(result.active_constraints.begin(),
                                     result.active_constraints.end(),
                                     [&](const MarginConstraint& w) { return w.same_as(*c); });
      if (!known) {
        into.push_back(std::move(*c));
        ++added;
      }
    }
    return added;
  };

  while (result.iterations < config.max_cg_iters) {
    std::vector<MarginConstraint> fresh;
    if (add_violations(fresh) == 0) {
      result.converged = true;
      return result;
    }
    for (MarginConstraint& c : fresh) result.active_constraints.push_back(std::move(c));
    ++result.iterations;

    const QpSolution qp = solve_restricted_qp(result.active_constraints, n, problem.dim(), config);
    result.qp_objectives.push_back(qp.primal_objective);
    result.b = psd_project(qp.b);
    result.xi = slacks_for(result.b.matrix(), result.active_constraints, n);
  }

  std::vector<MarginConstraint> leftover;
  result.converged = config.max_cg_iters > 0 && add_violations(leftover) == 0;
  return result;
}

}  // namespace anchormatch
