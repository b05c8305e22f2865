#pragma once

// Compatibility matrix construction and IQP solvers.
//
// Non-anchor nodes i of G and a of G' form the candidate assignments (i, a);
// W holds affinities between candidates and the matching maximises x^T W x
// over one-to-one binary x.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anchormatch/anchors.hpp"
#include "anchormatch/graph.hpp"
#include "anchormatch/proximity.hpp"
#include "anchormatch/signatures.hpp"

namespace anchormatch {

/// Compatibility schemes i-vi.
enum class Variant {
  Adjacency = 1,          // i:   |w(i,j) - w'(a,b)|, no first-order term
  HeatKernel,             // ii:  d_k only
  HeatKernelWks,          // iii: d_k + WKS distance
  AnchorHeat,             // iv:  d_k + d_ap          (c_B = 0, c_ap = 1)
  Proximity,              // v:   d_k + d_B           (c_B = 1, c_ap = 0)
  ProximityAnchorHeat,    // vi:  d_k + d_B + d_ap    (c_B = 8, c_ap = 3)
};

std::string_view variant_name(Variant v) noexcept;
/// Accepts "i".."vi" or "1".."6"; throws ParseError.
Variant parse_variant(std::string_view text);

struct VariantConfig {
  Variant variant = Variant::ProximityAnchorHeat;
  double c_b = 8.0;
  double c_ap = 3.0;

  static VariantConfig defaults(Variant v);

  [[nodiscard]] bool uses_proximity() const noexcept { return c_b > 0.0 && has_learned_term(); }
  [[nodiscard]] bool uses_anchor_heat() const noexcept { return c_ap > 0.0 && has_learned_term(); }

 private:
  [[nodiscard]] bool has_learned_term() const noexcept {
    return variant == Variant::AnchorHeat || variant == Variant::Proximity ||
           variant == Variant::ProximityAnchorHeat;
  }
};

struct SolverParams {
  double alpha = 0.2;
  double beta = 30.0;
  std::size_t sinkhorn_iters = 10;
  double conv_tol = 1e-6;
  std::size_t max_iters = 300;
  /// Bandwidth of exp(-d^2 / sigma^2). Unset: median nonzero distance, chosen
  /// separately for the pairwise and the first-order distances.
  std::optional<double> affinity_sigma;
};

enum class SolverKind { Rrwm, Spectral, BruteForce };

/// Precomputed spectral data of a graph pair sharing one diffusion time.
class GraphPair {
 public:
  struct Options {
    std::optional<double> diffusion_time;
    /// Spectral truncation; defaults to min(|V|, |V'|) on both sides.
    std::optional<std::size_t> k;
  };

  GraphPair(WeightedGraph source, WeightedGraph target, Options options = {});

  [[nodiscard]] const WeightedGraph& source() const noexcept { return source_; }
  [[nodiscard]] const WeightedGraph& target() const noexcept { return target_; }
  [[nodiscard]] const SpectralDecomposition& source_spectrum() const noexcept { return source_spec_; }
  [[nodiscard]] const SpectralDecomposition& target_spectrum() const noexcept { return target_spec_; }
  [[nodiscard]] double diffusion_time() const noexcept { return t_; }
  [[nodiscard]] const KernelMatrix& source_kernel() const noexcept { return source_kernel_; }
  [[nodiscard]] const KernelMatrix& target_kernel() const noexcept { return target_kernel_; }
  [[nodiscard]] std::size_t k_source() const noexcept { return k_source_; }
  [[nodiscard]] std::size_t k_target() const noexcept { return k_target_; }

  [[nodiscard]] LearningProblem learning_problem(const AnchorSet& anchors) const;

 private:
  WeightedGraph source_;
  WeightedGraph target_;
  SpectralDecomposition source_spec_;
  SpectralDecomposition target_spec_;
  double t_ = 0.0;
  KernelMatrix source_kernel_;
  KernelMatrix target_kernel_;
  std::size_t k_source_ = 0;
  std::size_t k_target_ = 0;
};

/// W over candidate pairs (sources[r], targets[c]) with row index r * q + c.
struct CompatibilityMatrix {
  Eigen::MatrixXd w;
  std::vector<NodeId> sources;  // non-anchor nodes of G, ascending
  std::vector<NodeId> targets;  // non-anchor nodes of G', ascending

  [[nodiscard]] std::size_t p() const noexcept { return sources.size(); }
  [[nodiscard]] std::size_t q() const noexcept { return targets.size(); }
  [[nodiscard]] Eigen::Index index(std::size_t r, std::size_t c) const noexcept {
    return static_cast<Eigen::Index>(r * q() + c);
  }
};

/// One-to-one partial map. Pairs are (row, column) indices into W for solver
/// output and node ids for `match` output.
struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double objective = 0.0;
};

/// |k_t(i,j) - k'_t(a,b)|. Throws ConflictingPair when i == j or a == b.
double second_order_distance(const KernelMatrix& k, const KernelMatrix& k_prime, NodeId i,
                             NodeId j, NodeId a, NodeId b);

/// exp(-d^2 / sigma^2).
double affinity(double distance, double sigma) noexcept;

/// Throws MissingProximityMatrix (variants v, vi without B) and
/// DimensionMismatch when B does not fit the pair's features.
CompatibilityMatrix build_compatibility(const GraphPair& pair, const AnchorSet& anchors,
                                        const VariantConfig& variant,
                                        const ProximityMatrix* proximity,
                                        const SolverParams& params = {});

/// Reweighted random walk; returns the continuous score vector (l1-normalised).
/// Throws ZeroMatrix.
Eigen::VectorXd rrwm_solve(const CompatibilityMatrix& w, const SolverParams& params = {});

/// Greedy: take the largest remaining score, drop its row and column; ties to
/// the lowest linear index. Objective is left at zero.
Assignment discretize(const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t p, std::size_t q);

/// x^T W x of a discrete assignment given in (row, column) indices.
double assignment_objective(const CompatibilityMatrix& w, const Assignment& assignment);

/// Exact maximiser over all maximal injections. Throws TooLarge when
/// min(p, q) > 8 or the injection count exceeds 5e7.
Assignment brute_force_solve(const CompatibilityMatrix& w);

/// Leading eigenvector of W, discretised greedily. Throws ConvergenceFailure.
Assignment spectral_solve(const CompatibilityMatrix& w);

/// rrwm_solve + discretize, spectral_solve or brute_force_solve.
Assignment solve(const CompatibilityMatrix& w, SolverKind kind, const SolverParams& params = {});

struct MatchConfig {
  VariantConfig variant;
  SolverParams solver;
  SolverKind solver_kind = SolverKind::Rrwm;
  LearnConfig learn;
  GraphPair::Options pair;
};

/// Full pipeline; the returned pairs are node ids (i in G, a in G'),
/// anchors excluded.
Assignment match(const GraphPair& pair, const AnchorSet& anchors, const MatchConfig& config = {});
Assignment match(const WeightedGraph& source, const WeightedGraph& target, const AnchorSet& anchors,
                 const MatchConfig& config = {});

}  // namespace anchormatch
