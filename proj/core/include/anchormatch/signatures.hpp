#pragma once

// Spectral node descriptors and the first-order distances built from them.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "anchormatch/graph.hpp"

namespace anchormatch {

/// theta_u[k] = phi_k(u)^2 for the K lowest eigenvectors; row u is theta_u.
struct NodeFeatures {
  Eigen::MatrixXd theta;

  [[nodiscard]] std::size_t nodes() const noexcept { return static_cast<std::size_t>(theta.rows()); }
  [[nodiscard]] std::size_t k() const noexcept { return static_cast<std::size_t>(theta.cols()); }
  [[nodiscard]] Eigen::VectorXd row(NodeId u) const {
    return theta.row(static_cast<Eigen::Index>(u)).transpose();
  }
};

/// Throws KOutOfRange unless 1 <= k <= n.
NodeFeatures node_features(const SpectralDecomposition& spectrum, std::size_t k);

/// w_uv = [theta_u; theta'_v].
Eigen::VectorXd pair_feature(const Eigen::Ref<const Eigen::VectorXd>& theta_u,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_v);

/// Symmetric positive semi-definite matrix B defining
/// d_B(w) = sqrt(w^T B w) on stacked pair features.
class ProximityMatrix {
 public:
  /// Throws NotSymmetric (asymmetry > 1e-9 relative) or NegativeQuadraticForm
  /// (smallest eigenvalue below -1e-8). The stored matrix is exactly symmetric.
  explicit ProximityMatrix(Eigen::MatrixXd b);

  static ProximityMatrix zero(std::size_t dim);
  /// [[I, -I], [-I, I]]: d_B reduces to ||theta_u - theta'_v||.
  static ProximityMatrix block_identity(std::size_t k);

  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return b_; }
  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(b_.rows()); }
  [[nodiscard]] double min_eigenvalue() const;

 private:
  Eigen::MatrixXd b_;
};

/// sqrt(w^T B w). Quadratic forms in [-1e-10, 0) are clamped to zero; anything
/// more negative throws NegativeQuadraticForm. Throws DimensionMismatch.
double proximity_distance(const ProximityMatrix& b, const Eigen::Ref<const Eigen::VectorXd>& w);

/// Heat kernel signature, one row per node and one column per time:
/// s_u(t) = sum_k exp(-t lambda_k) phi_k(u)^2. Throws NegativeTime.
Eigen::MatrixXd hks(const SpectralDecomposition& spectrum, std::span<const double> times);

/// Wave kernel signature with energies `times` (in log-eigenvalue units):
/// s_u(t) = sum over lambda_k > 1e-10 of exp(-(t - log lambda_k)^2 / (2 sigma^2)) phi_k(u)^2.
/// Throws NonPositiveSigma.
Eigen::MatrixXd wks(const SpectralDecomposition& spectrum, std::span<const double> times,
                    double sigma);

/// WKS sampling shared by two graphs: `count` evenly spaced energies spanning
/// [log lambda_min+, log lambda_max] over the pooled nonzero spectra.
struct WksGrid {
  std::vector<double> energies;
  double sigma = 1.0;
};
WksGrid wks_grid(const SpectralDecomposition& a, const SpectralDecomposition& b,
                 std::size_t count = 20);

/// d_ap^H(v) = sum over anchors u of k_t(u, v).
struct AnchorHeatProfile {
  double t = 0.0;
  Eigen::VectorXd values;
};

/// Throws EmptyAnchorSet, NegativeTime, IndexOutOfRange.
AnchorHeatProfile anchor_heat_profile(const SpectralDecomposition& spectrum,
                                      std::span<const NodeId> anchors, double t);

/// c_B * d_B + c_ap * |d_ap_i - d_ap_a|.
double first_order_distance(double d_b, double d_ap_i, double d_ap_a, double c_b, double c_ap);

}  // namespace anchormatch
