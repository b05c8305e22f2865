#pragma once

// Weighted graphs, their Laplacians, spectra and heat kernels.
//
// Everything here is dense: the graphs this library targets have tens of
// nodes, where a full symmetric eigendecomposition is both the simplest and
// the fastest option.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace anchormatch {

using NodeId = std::size_t;

struct Edge {
  NodeId i = 0;
  NodeId j = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph with strictly positive edge weights.
///
/// Edges are stored canonically with i < j, sorted lexicographically, so two
/// graphs built from the same edge set compare equal regardless of input
/// order or orientation.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Validates and canonicalizes. Throws Error with IndexOutOfRange,
  /// NonPositiveWeight or DuplicateEdge (self-loops count as out of range).
  static WeightedGraph build(std::size_t n, std::span<const Edge> edges);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

  [[nodiscard]] Eigen::MatrixXd adjacency() const;
  [[nodiscard]] bool is_connected() const;

  /// Relabels node u as perm[u].
  [[nodiscard]] WeightedGraph relabeled(std::span<const NodeId> perm) const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

inline WeightedGraph build_graph(std::size_t n, std::span<const Edge> edges) {
  return WeightedGraph::build(n, edges);
}

/// L = D - A.
Eigen::MatrixXd laplacian(const WeightedGraph& g);

/// Eigenpairs of a graph Laplacian, eigenvalues ascending, eigenvectors as
/// orthonormal columns.
///
/// Each eigenvector's sign is fixed so that its largest-magnitude entry is
/// positive; nothing downstream depends on the sign, but it keeps outputs
/// reproducible.
class SpectralDecomposition {
 public:
  SpectralDecomposition(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors);

  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(eigenvalues_.size());
  }
  [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  [[nodiscard]] const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }

  /// Smallest gap between consecutive eigenvalues (infinity for n < 2).
  [[nodiscard]] double min_gap() const noexcept { return min_gap_; }

  /// True when some gap is below 1e-8 * lambda_max. Node features built from
  /// a degenerate eigenspace depend on the basis chosen inside it.
  [[nodiscard]] bool near_degenerate() const noexcept { return near_degenerate_; }

  /// Threshold under which an eigenvalue is treated as zero.
  [[nodiscard]] double zero_threshold() const noexcept;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double min_gap_ = 0.0;
  bool near_degenerate_ = false;
};

/// Full symmetric eigendecomposition. `tol` is relative: residuals and
/// orthogonality are checked against tol * max(1, lambda_max).
/// Throws NotSymmetric or ConvergenceFailure.
SpectralDecomposition spectral_decomposition(const Eigen::MatrixXd& laplacian,
                                             double tol = 1e-9);

inline SpectralDecomposition spectral_decomposition(const WeightedGraph& g,
                                                    double tol = 1e-9) {
  return spectral_decomposition(laplacian(g), tol);
}

struct KernelMatrix {
  double t = 0.0;
  Eigen::MatrixXd values;

  [[nodiscard]] double operator()(NodeId u, NodeId v) const {
    return values(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
  }
};

/// k_t = sum_k exp(-t lambda_k) phi_k phi_k^T. Throws NegativeTime.
KernelMatrix heat_kernel(const SpectralDecomposition& spectrum, double t);

/// 1 / mean of the nonzero eigenvalues. Throws AllZeroSpectrum.
double default_diffusion_time(const SpectralDecomposition& spectrum);

/// Same rule applied to the pooled nonzero eigenvalues of two graphs, so
/// both kernels of a matched pair share one diffusion time.
double default_diffusion_time(const SpectralDecomposition& a, const SpectralDecomposition& b);

}  // namespace anchormatch
