#include "anchormatch/detail/dense_qp.hpp"

#include <algorithm>
#include <cmath>

namespace anchormatch::detail {

namespace {

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double step = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) step = std::min(step, -v(i) / dv(i));
  }
  return step;
}

}  // namespace

DenseQpResult solve_dense_qp(const Eigen::MatrixXd& q, const Eigen::VectorXd& c,
                             const Eigen::MatrixXd& a, const Eigen::VectorXd& h, double tol,
                             int max_iterations) {
  const Eigen::Index n = q.rows();
  const Eigen::Index m = a.rows();
  DenseQpResult out;
  out.x = Eigen::VectorXd::Zero(n);
  out.multipliers = Eigen::VectorXd::Zero(m);
  if (n == 0) {
    out.converged = true;
    return out;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s = (h - a * x).cwiseMax(1.0);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(m);

  const double scale_d = 1.0 + c.cwiseAbs().maxCoeff();
  const double scale_p = 1.0 + (m > 0 ? h.cwiseAbs().maxCoeff() : 0.0);
  // Ridge tied to Q only; the barrier term z/s grows without bound near the optimum.
  const double ridge = 1e-14 * (1.0 + q.diagonal().cwiseAbs().maxCoeff());

  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::VectorXd r_dual = q * x + c + a.transpose() * z;
    const Eigen::VectorXd r_prim = a * x + s - h;
    const double mu = m > 0 ? s.dot(z) / static_cast<double>(m) : 0.0;

    const bool done = r_dual.lpNorm<Eigen::Infinity>() <= tol * scale_d &&
                      (m == 0 || r_prim.lpNorm<Eigen::Infinity>() <= tol * scale_p) &&
                      mu <= tol * scale_d;
    if (done) {
      out.converged = true;
      break;
    }

    const Eigen::VectorXd d = z.cwiseQuotient(s);
    Eigen::MatrixXd kkt = q + a.transpose() * d.asDiagonal() * a;
    kkt.diagonal().array() += ridge;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(kkt);
    if (ldlt.info() != Eigen::Success) break;

    // Newton direction for complementarity target r_c (s o z - target).
    auto direction = [&](const Eigen::VectorXd& r_c, Eigen::VectorXd& dx, Eigen::VectorXd& ds,
                         Eigen::VectorXd& dz) {
      const Eigen::VectorXd rhs =
          -r_dual - a.transpose() * (d.cwiseProduct(r_prim) - r_c.cwiseQuotient(s));
      dx = ldlt.solve(rhs);
      dz = d.cwiseProduct(a * dx + r_prim) - r_c.cwiseQuotient(s);
      ds = -(r_c + s.cwiseProduct(dz)).cwiseQuotient(z);
    };

    Eigen::VectorXd dx, ds, dz;
    const Eigen::VectorXd sz = s.cwiseProduct(z);
    direction(sz, dx, ds, dz);
    const double step_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff =
        m > 0 ? (s + step_aff * ds).dot(z + step_aff * dz) / static_cast<double>(m) : 0.0;
    const double sigma = mu > 0.0 ? std::pow(mu_aff / mu, 3.0) : 0.0;

    const Eigen::VectorXd r_c =
        sz + ds.cwiseProduct(dz) - Eigen::VectorXd::Constant(m, sigma * mu);
    direction(r_c, dx, ds, dz);
    const double step = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));

    if (!(dx.allFinite() && ds.allFinite() && dz.allFinite()) || !std::isfinite(step)) break;
    x += step * dx;
    s += step * ds;
    z += step * dz;
  }

  out.x = x;
  out.multipliers = z;
  return out;
}

}  // namespace anchormatch::detail
