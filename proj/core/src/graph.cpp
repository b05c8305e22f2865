#include "anchormatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "anchormatch/error.hpp"

namespace anchormatch {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

WeightedGraph WeightedGraph::build(std::size_t n, std::span<const Edge> edges) {
  WeightedGraph g;
  g.n_ = n;
  g.edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) {
      throw Error(Errc::IndexOutOfRange, "edge (" + std::to_string(e.i) + ", " +
                                             std::to_string(e.j) + ") outside [0, " +
                                             std::to_string(n) + ")");
    }
    if (e.i == e.j) {
      throw Error(Errc::IndexOutOfRange, "self-loop on node " + std::to_string(e.i));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw Error(Errc::NonPositiveWeight, "edge (" + std::to_string(e.i) + ", " +
                                               std::to_string(e.j) + ") has weight " +
                                               std::to_string(e.w));
    }
    g.edges_.push_back(Edge{std::min(e.i, e.j), std::max(e.i, e.j), e.w});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  auto dup = std::adjacent_find(g.edges_.begin(), g.edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i == b.i && a.j == b.j;
  });
  if (dup != g.edges_.end()) {
    throw Error(Errc::DuplicateEdge,
                "pair (" + std::to_string(dup->i) + ", " + std::to_string(dup->j) + ") repeated");
  }
  return g;
}

Eigen::MatrixXd WeightedGraph::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(idx(n_), idx(n_));
  for (const Edge& e : edges_) {
    a(idx(e.i), idx(e.j)) = e.w;
    a(idx(e.j), idx(e.i)) = e.w;
  }
  return a;
}

bool WeightedGraph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<NodeId> parent(n_);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::size_t components = n_;
  for (const Edge& e : edges_) {
    NodeId a = find(e.i), b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

WeightedGraph WeightedGraph::relabeled(std::span<const NodeId> perm) const {
  if (perm.size() != n_) {
    throw Error(Errc::DimensionMismatch, "permutation length differs from node count");
  }
  std::vector<Edge> mapped;
  mapped.reserve(edges_.size());
  for (const Edge& e : edges_) mapped.push_back(Edge{perm[e.i], perm[e.j], e.w});
  return build(n_, mapped);
}

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
  Eigen::MatrixXd a = g.adjacency();
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

SpectralDecomposition::SpectralDecomposition(Eigen::VectorXd eigenvalues,
                                             Eigen::MatrixXd eigenvectors)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
  if (eigenvectors_.rows() != eigenvalues_.size() || eigenvectors_.cols() != eigenvalues_.size()) {
    throw Error(Errc::DimensionMismatch, "eigenvector matrix must be n x n");
  }
  min_gap_ = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < eigenvalues_.size(); ++k) {
    min_gap_ = std::min(min_gap_, eigenvalues_(k) - eigenvalues_(k - 1));
  }
  const double top = eigenvalues_.size() > 0 ? eigenvalues_.maxCoeff() : 0.0;
  near_degenerate_ = eigenvalues_.size() > 1 && min_gap_ < 1e-8 * top;
}

double SpectralDecomposition::zero_threshold() const noexcept {
  const double top = eigenvalues_.size() > 0 ? eigenvalues_.maxCoeff() : 0.0;
  return 1e-9 * std::max(1.0, top);
}

SpectralDecomposition spectral_decomposition(const Eigen::MatrixXd& l, double tol) {
  if (l.rows() != l.cols()) {
    throw Error(Errc::NotSymmetric, "matrix is not square");
  }
  const Eigen::Index n = l.rows();
  if (n == 0) return SpectralDecomposition(Eigen::VectorXd(0), Eigen::MatrixXd(0, 0));

  const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
  if ((l - l.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw Error(Errc::NotSymmetric, "asymmetry exceeds tolerance");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  Eigen::MatrixXd vectors = solver.eigenvectors();

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index arg = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, k) < 0.0) vectors.col(k) *= -1.0;
  }

  const double bound = tol * std::max(1.0, values.maxCoeff());
  const double residual = (l * vectors - vectors * values.asDiagonal()).colwise().norm().maxCoeff();
  const double orthogonality =
      (vectors.transpose() * vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (residual > bound || orthogonality > tol * 10.0 || values.minCoeff() < -bound) {
    throw Error(Errc::ConvergenceFailure,
                "eigenpairs miss tolerance (residual " + std::to_string(residual) + ")");
  }
  return SpectralDecomposition(std::move(values), std::move(vectors));
}

KernelMatrix heat_kernel(const SpectralDecomposition& spectrum, double t) {
  if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "t = " + std::to_string(t));
  const Eigen::VectorXd decay = (-t * spectrum.eigenvalues().array()).exp().matrix();
  const Eigen::MatrixXd& phi = spectrum.eigenvectors();
  KernelMatrix k{t, phi * decay.asDiagonal() * phi.transpose()};
  // exact symmetry keeps W symmetric downstream
  k.values = 0.5 * (k.values + k.values.transpose()).eval();
  return k;
}

namespace {

double inverse_mean_nonzero(std::span<const SpectralDecomposition* const> spectra) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const SpectralDecomposition* s : spectra) {
    const double zero = s->zero_threshold();
    for (double lambda : s->eigenvalues()) {
      if (lambda > zero) {
        sum += lambda;
        ++count;
      }
    }
  }
  if (count == 0) throw Error(Errc::AllZeroSpectrum, "no nonzero eigenvalue (edgeless graph)");
  return static_cast<double>(count) / sum;
}

}  // namespace

double default_diffusion_time(const SpectralDecomposition& spectrum) {
  const SpectralDecomposition* one[] = {&spectrum};
  return inverse_mean_nonzero(one);
}

double default_diffusion_time(const SpectralDecomposition& a, const SpectralDecomposition& b) {
  const SpectralDecomposition* both[] = {&a, &b};
  return inverse_mean_nonzero(both);
}

}  // namespace anchormatch
