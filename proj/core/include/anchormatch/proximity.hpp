#pragma once

// Learning the proximity matrix B from anchor correspondences.
//
// The max-margin problem asks that, for each anchor (i, a), the learned squared
// distance d_B^2 to every non-partner exceed the distance to the partner by a
// unit margin, up to a per-anchor slack xi rescaled by a loss Omega:
//
//   min 1/2 ||B||_F^2 + C/n sum_m xi_m
//   s.t. d_B^2(i, b) - d_B^2(i, a) >= 1 - xi_m / Omega'(b, a)   for b != a
//        d_B^2(j, a) - d_B^2(i, a) >= 1 - xi_m / Omega(j, i)    for j != i
//        xi_m >= 0,  B PSD
//
// It is solved by column generation on the PSD-relaxed problem: each round adds
// the most violated constraint per anchor, re-solves the restricted QP, and
// projects B back onto the PSD cone.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "anchormatch/anchors.hpp"
#include "anchormatch/graph.hpp"
#include "anchormatch/signatures.hpp"

namespace anchormatch {

enum class LossMode {
  /// Omega = k(x,x) + k(y,y) - 2 k(x,y): grows with diffusion distance.
  HeatDistance,
  /// Omega = k(x,y): the kernel value itself.
  RawKernel,
};

inline constexpr double kLossEpsilon = 1e-9;

/// Throws SameNode when x == y.
double rescale_loss(const KernelMatrix& kernel, NodeId x, NodeId y, LossMode mode);

/// Which graph the competitor node comes from.
enum class CompetitorSide {
  Target,  // b in V' \ {a}
  Source,  // j in V \ {i}
};

struct MarginConstraint {
  std::size_t anchor_index = 0;
  NodeId competitor = 0;
  CompetitorSide side = CompetitorSide::Target;
  Eigen::VectorXd far;   // w of the non-matching pair
  Eigen::VectorXd near;  // w of the anchor pair
  double loss = 1.0;

  /// vec(far far^T - near near^T), column-major, length (K+K')^2.
  [[nodiscard]] Eigen::VectorXd psi() const;
  /// psi^T vec(B) = far^T B far - near^T B near.
  [[nodiscard]] double margin(const Eigen::MatrixXd& b) const;
  /// 1 - xi / Omega - margin.
  [[nodiscard]] double violation(const Eigen::MatrixXd& b, double xi) const;

  [[nodiscard]] bool same_as(const MarginConstraint& other) const noexcept {
    return anchor_index == other.anchor_index && competitor == other.competitor &&
           side == other.side;
  }
};

struct LearnConfig {
  double c_reg = 10.0;
  double cg_tol = 1e-4;
  std::size_t max_cg_iters = 100;
  double qp_tol = 1e-6;
  LossMode loss_mode = LossMode::HeatDistance;
  /// Start from [[I, -I], [-I, I]] instead of 0 (requires K == K').
  bool block_identity_start = false;
};

/// Features, kernels and anchors of one graph pair.
struct LearningProblem {
  NodeFeatures source_features;
  NodeFeatures target_features;
  KernelMatrix source_kernel;
  KernelMatrix target_kernel;
  AnchorSet anchors;

  static LearningProblem build(const SpectralDecomposition& source,
                               const SpectralDecomposition& target, AnchorSet anchors,
                               std::size_t k_source, std::size_t k_target, double t);

  [[nodiscard]] std::size_t dim() const noexcept {
    return source_features.k() + target_features.k();
  }
  [[nodiscard]] Eigen::VectorXd pair(NodeId i, NodeId a) const {
    return pair_feature(source_features.row(i), target_features.row(a));
  }
};

/// All 2 (n - 1)-ish constraints of anchor m, ordered by (competitor, side).
std::vector<MarginConstraint> enumerate_constraints(const LearningProblem& problem,
                                                    std::size_t anchor_index, LossMode mode);

/// Most violated constraint of anchor m, or nullopt when none exceeds cg_tol.
/// Ties go to the lowest competitor index (Target side first).
std::optional<MarginConstraint> enumerate_violations(const Eigen::MatrixXd& b, double xi,
                                                     std::size_t anchor_index,
                                                     const LearningProblem& problem,
                                                     const LearnConfig& config);

struct QpSolution {
  Eigen::MatrixXd b;      // symmetric (K+K') x (K+K'), i.e. the reshaped b vector
  Eigen::VectorXd xi;     // one slack per anchor
  Eigen::VectorXd alpha;  // one multiplier per working constraint
  double primal_objective = 0.0;
  double dual_objective = 0.0;
};

/// Solves the PSD-relaxed QP restricted to `working_set`. The result is
/// certified by the duality gap and the dual bound sum alpha / Omega <= C / n;
/// throws QPNumericalFailure when either misses qp_tol.
QpSolution solve_restricted_qp(std::span<const MarginConstraint> working_set,
                               std::size_t anchor_count, std::size_t dim,
                               const LearnConfig& config);

/// Frobenius-nearest PSD matrix: negative eigenvalues clamped to zero.
/// Throws NotSymmetric.
ProximityMatrix psd_project(const Eigen::MatrixXd& m);

struct LearnResult {
  ProximityMatrix b;
  Eigen::VectorXd xi;
  std::vector<MarginConstraint> active_constraints;
  bool converged = false;
  std::size_t iterations = 0;
  /// Restricted-QP primal objective per round, before projection.
  std::vector<double> qp_objectives;
};

/// Recomputes per-anchor slacks for `b` over a constraint set:
/// xi_m = max(0, max_c Omega_c (1 - margin_c)).
Eigen::VectorXd slacks_for(const Eigen::MatrixXd& b, std::span<const MarginConstraint> constraints,
                           std::size_t anchor_count);

LearnResult learn_proximity(const LearningProblem& problem, const LearnConfig& config = {});

}  // namespace anchormatch
