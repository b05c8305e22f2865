#include "anchormatch/signatures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anchormatch/error.hpp"

namespace anchormatch {

namespace {

constexpr double kWksZeroEigenvalue = 1e-10;

void require_nonnegative_times(std::span<const double> times) {
  for (double t : times) {
    if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "t = " + std::to_string(t));
  }
}

}  // namespace

NodeFeatures node_features(const SpectralDecomposition& spectrum, std::size_t k) {
  const std::size_t n = spectrum.size();
  if (k < 1 || k > n) {
    throw Error(Errc::KOutOfRange, "K = " + std::to_string(k) + " with n = " + std::to_string(n));
  }
  return NodeFeatures{
      spectrum.eigenvectors().leftCols(static_cast<Eigen::Index>(k)).array().square().matrix()};
}

Eigen::VectorXd pair_feature(const Eigen::Ref<const Eigen::VectorXd>& theta_u,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_v) {
  Eigen::VectorXd w(theta_u.size() + theta_v.size());
  w << theta_u, theta_v;
  return w;
}

ProximityMatrix::ProximityMatrix(Eigen::MatrixXd b) : b_(std::move(b)) {
  if (b_.rows() != b_.cols()) throw Error(Errc::NotSymmetric, "proximity matrix is not square");
  if (b_.size() == 0) return;
  const double scale = std::max(1.0, b_.cwiseAbs().maxCoeff());
  if ((b_ - b_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error(Errc::NotSymmetric, "proximity matrix is not symmetric");
  }
  b_ = 0.5 * (b_ + b_.transpose()).eval();
  if (min_eigenvalue() < -1e-8) {
    throw Error(Errc::NegativeQuadraticForm, "proximity matrix is not positive semi-definite");
  }
}

ProximityMatrix ProximityMatrix::zero(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return ProximityMatrix(Eigen::MatrixXd::Zero(d, d));
}

ProximityMatrix ProximityMatrix::block_identity(std::size_t k) {
  const auto d = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd b(2 * d, 2 * d);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  b << id, -id, -id, id;
  return ProximityMatrix(std::move(b));
}

double ProximityMatrix::min_eigenvalue() const {
  if (b_.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double proximity_distance(const ProximityMatrix& b, const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (static_cast<std::size_t>(w.size()) != b.dim()) {
    throw Error(Errc::DimensionMismatch, "pair feature length " + std::to_string(w.size()) +
                                             " vs proximity dim " + std::to_string(b.dim()));
  }
  const double q = w.dot(b.matrix() * w);
  if (q < -1e-10) throw Error(Errc::NegativeQuadraticForm, "w^T B w = " + std::to_string(q));
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

Eigen::MatrixXd hks(const SpectralDecomposition& spectrum, std::span<const double> times) {
  require_nonnegative_times(times);
  const Eigen::MatrixXd phi2 = spectrum.eigenvectors().array().square().matrix();
  const Eigen::VectorXd& lambda = spectrum.eigenvalues();
  Eigen::MatrixXd h(lambda.size(), static_cast<Eigen::Index>(times.size()));
  for (std::size_t c = 0; c < times.size(); ++c) {
    h.col(static_cast<Eigen::Index>(c)) = (-times[c] * lambda.array()).exp().matrix();
  }
  return phi2 * h;
}

Eigen::MatrixXd wks(const SpectralDecomposition& spectrum, std::span<const double> times,
                    double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::NonPositiveSigma, "sigma = " + std::to_string(sigma));
  const Eigen::MatrixXd phi2 = spectrum.eigenvectors().array().square().matrix();
  const Eigen::VectorXd& lambda = spectrum.eigenvalues();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(lambda.size(), static_cast<Eigen::Index>(times.size()));
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) < kWksZeroEigenvalue) continue;
    const double e = std::log(lambda(k));
    for (std::size_t c = 0; c < times.size(); ++c) {
      const double d = times[c] - e;
      h(k, static_cast<Eigen::Index>(c)) = std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }
  return phi2 * h;
}

WksGrid wks_grid(const SpectralDecomposition& a, const SpectralDecomposition& b, std::size_t count) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const SpectralDecomposition* s : {&a, &b}) {
    for (double lambda : s->eigenvalues()) {
      if (lambda < kWksZeroEigenvalue) continue;
      lo = std::min(lo, std::log(lambda));
      hi = std::max(hi, std::log(lambda));
    }
  }
  WksGrid grid;
  if (!std::isfinite(lo) || count == 0) return grid;
  grid.energies.resize(count);
  const double step = count > 1 ? (hi - lo) / static_cast<double>(count - 1) : 0.0;
  for (std::size_t c = 0; c < count; ++c) grid.energies[c] = lo + step * static_cast<double>(c);
  // band width of a few grid steps, so neighbouring energies overlap
  grid.sigma = step > 0.0 ? 7.0 * step : 1.0;
  return grid;
}

AnchorHeatProfile anchor_heat_profile(const SpectralDecomposition& spectrum,
                                      std::span<const NodeId> anchors, double t) {
  if (anchors.empty()) throw Error(Errc::EmptyAnchorSet, "anchor heat profile needs anchors");
  if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "t = " + std::to_string(t));
  const Eigen::MatrixXd& phi = spectrum.eigenvectors();
  Eigen::VectorXd anchor_mass = Eigen::VectorXd::Zero(phi.cols());
  for (NodeId u : anchors) {
    if (u >= spectrum.size()) {
      throw Error(Errc::IndexOutOfRange, "anchor node " + std::to_string(u));
    }
    anchor_mass += phi.row(static_cast<Eigen::Index>(u)).transpose();
  }
  const Eigen::VectorXd decay = (-t * spectrum.eigenvalues().array()).exp().matrix();
  return AnchorHeatProfile{t, phi * decay.cwiseProduct(anchor_mass)};
}

double first_order_distance(double d_b, double d_ap_i, double d_ap_a, double c_b, double c_ap) {
  return c_b * d_b + c_ap * std::abs(d_ap_i - d_ap_a);
}

}  // namespace anchormatch
