#include "anchormatch/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "anchormatch/error.hpp"

namespace anchormatch {

namespace {

Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

std::vector<NodeId> complement(std::size_t n, const std::vector<NodeId>& removed) {
  std::vector<bool> drop(n, false);
  for (NodeId v : removed) drop[v] = true;
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v) {
    if (!drop[v]) out.push_back(v);
  }
  return out;
}

// Median of the strictly positive entries; 1 when there are none.
double median_positive(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !(v > 0.0); });
  if (values.empty()) return 1.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::Adjacency: return "i";
    case Variant::HeatKernel: return "ii";
    case Variant::HeatKernelWks: return "iii";
    case Variant::AnchorHeat: return "iv";
    case Variant::Proximity: return "v";
    case Variant::ProximityAnchorHeat: return "vi";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  static constexpr std::pair<std::string_view, Variant> kNames[] = {
      {"i", Variant::Adjacency},   {"ii", Variant::HeatKernel},
      {"iii", Variant::HeatKernelWks}, {"iv", Variant::AnchorHeat},
      {"v", Variant::Proximity},   {"vi", Variant::ProximityAnchorHeat},
      {"1", Variant::Adjacency},   {"2", Variant::HeatKernel},
      {"3", Variant::HeatKernelWks}, {"4", Variant::AnchorHeat},
      {"5", Variant::Proximity},   {"6", Variant::ProximityAnchorHeat},
  };
  for (const auto& [name, v] : kNames) {
    if (name == text) return v;
  }
  throw Error(Errc::ParseError, "unknown variant '" + std::string(text) + "' (expected i..vi)");
}

VariantConfig VariantConfig::defaults(Variant v) {
  switch (v) {
    case Variant::AnchorHeat: return {v, 0.0, 1.0};
    case Variant::Proximity: return {v, 1.0, 0.0};
    case Variant::ProximityAnchorHeat: return {v, 8.0, 3.0};
    default: return {v, 0.0, 0.0};
  }
}

GraphPair::GraphPair(WeightedGraph source, WeightedGraph target, Options options)
    : source_(std::move(source)),
      target_(std::move(target)),
      source_spec_(spectral_decomposition(source_)),
      target_spec_(spectral_decomposition(target_)) {
  t_ = options.diffusion_time ? *options.diffusion_time
                              : default_diffusion_time(source_spec_, target_spec_);
  source_kernel_ = heat_kernel(source_spec_, t_);
  target_kernel_ = heat_kernel(target_spec_, t_);
  const std::size_t k = options.k ? *options.k : std::min(source_.size(), target_.size());
  for (std::size_t n : {source_.size(), target_.size()}) {
    if (k < 1 || k > n) {
      throw Error(Errc::KOutOfRange, "K = " + std::to_string(k) + " with n = " + std::to_string(n));
    }
  }
  k_source_ = k;
  k_target_ = k;
}

LearningProblem GraphPair::learning_problem(const AnchorSet& anchors) const {
  return LearningProblem::build(source_spec_, target_spec_, anchors, k_source_, k_target_, t_);
}

double second_order_distance(const KernelMatrix& k, const KernelMatrix& k_prime, NodeId i,
                             NodeId j, NodeId a, NodeId b) {
  if (i == j || a == b) {
    throw Error(Errc::ConflictingPair, "second-order distance needs i != j and a != b");
  }
  return std::abs(k(i, j) - k_prime(a, b));
}

double affinity(double distance, double sigma) noexcept {
  return std::exp(-(distance * distance) / (sigma * sigma));
}

CompatibilityMatrix build_compatibility(const GraphPair& pair, const AnchorSet& anchors,
                                        const VariantConfig& variant,
                                        const ProximityMatrix* proximity,
                                        const SolverParams& params) {
  anchors.check_bounds(pair.source().size(), pair.target().size());
  CompatibilityMatrix out;
  out.sources = complement(pair.source().size(), anchors.sources());
  out.targets = complement(pair.target().size(), anchors.targets());
  const std::size_t p = out.p(), q = out.q();
  const auto dim = ix(p * q);
  out.w = Eigen::MatrixXd::Zero(dim, dim);
  if (dim == 0) return out;

  if (variant.uses_proximity()) {
    if (proximity == nullptr) {
      throw Error(Errc::MissingProximityMatrix,
                  "variant " + std::string(variant_name(variant.variant)) + " needs a learned B");
    }
    if (proximity->dim() != pair.k_source() + pair.k_target()) {
      throw Error(Errc::DimensionMismatch, "B has dim " + std::to_string(proximity->dim()) +
                                               ", features need " +
                                               std::to_string(pair.k_source() + pair.k_target()));
    }
  }

  // Second-order: pairwise distances on the upper triangle.
  Eigen::MatrixXd source_pairwise, target_pairwise;
  if (variant.variant == Variant::Adjacency) {
    source_pairwise = pair.source().adjacency();
    target_pairwise = pair.target().adjacency();
  } else {
    source_pairwise = pair.source_kernel().values;
    target_pairwise = pair.target_kernel().values;
  }
  std::vector<double> pairwise;
  pairwise.reserve(p * (p - 1) * q * (q - 1) / 2);
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < q; ++c) {
      const Eigen::Index row = out.index(r, c);
      for (std::size_t r2 = r + 1; r2 < p; ++r2) {
        for (std::size_t c2 = 0; c2 < q; ++c2) {
          if (c2 == c) continue;
          const double d = std::abs(source_pairwise(ix(out.sources[r]), ix(out.sources[r2])) -
                                    target_pairwise(ix(out.targets[c]), ix(out.targets[c2])));
          out.w(row, out.index(r2, c2)) = d;
          pairwise.push_back(d);
        }
      }
    }
  }
  const double sigma2 = params.affinity_sigma ? *params.affinity_sigma : median_positive(pairwise);
  for (Eigen::Index row = 0; row < dim; ++row) {
    for (Eigen::Index col = row + 1; col < dim; ++col) {
      const auto r = static_cast<std::size_t>(row) / q, c = static_cast<std::size_t>(row) % q;
      const auto r2 = static_cast<std::size_t>(col) / q, c2 = static_cast<std::size_t>(col) % q;
      const double value = (r == r2 || c == c2) ? 0.0 : affinity(out.w(row, col), sigma2);
      out.w(row, col) = value;
      out.w(col, row) = value;
    }
  }

  // First-order: node-to-node distances on the diagonal.
  Eigen::MatrixXd first = Eigen::MatrixXd::Zero(ix(p), ix(q));
  bool has_first_order = false;
  if (variant.variant == Variant::HeatKernelWks) {
    const WksGrid grid = wks_grid(pair.source_spectrum(), pair.target_spectrum());
    if (!grid.energies.empty()) {
      const Eigen::MatrixXd ws = wks(pair.source_spectrum(), grid.energies, grid.sigma);
      const Eigen::MatrixXd wt = wks(pair.target_spectrum(), grid.energies, grid.sigma);
      for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < q; ++c) {
          first(ix(r), ix(c)) = (ws.row(ix(out.sources[r])) - wt.row(ix(out.targets[c]))).norm();
        }
      }
      has_first_order = true;
    }
  } else if (variant.uses_proximity() || variant.uses_anchor_heat()) {
    std::optional<LearningProblem> features;
    if (variant.uses_proximity()) features = pair.learning_problem(anchors);
    std::optional<AnchorHeatProfile> hs, ht;
    if (variant.uses_anchor_heat()) {
      const std::vector<NodeId> us = anchors.sources(), ut = anchors.targets();
      hs = anchor_heat_profile(pair.source_spectrum(), us, pair.diffusion_time());
      ht = anchor_heat_profile(pair.target_spectrum(), ut, pair.diffusion_time());
    }
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < q; ++c) {
        const NodeId i = out.sources[r], a = out.targets[c];
        const double d_b = features ? proximity_distance(*proximity, features->pair(i, a)) : 0.0;
        const double ap_i = hs ? hs->values(ix(i)) : 0.0;
        const double ap_a = ht ? ht->values(ix(a)) : 0.0;
        first(ix(r), ix(c)) = first_order_distance(d_b, ap_i, ap_a, variant.c_b, variant.c_ap);
      }
    }
    has_first_order = true;
  }
  if (has_first_order) {
    const double sigma1 = params.affinity_sigma
                              ? *params.affinity_sigma
                              : median_positive(std::vector<double>(first.data(), first.data() + first.size()));
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t c = 0; c < q; ++c) {
        const Eigen::Index k = out.index(r, c);
        out.w(k, k) = affinity(first(ix(r), ix(c)), sigma1);
      }
    }
  }
  return out;
}

Eigen::VectorXd rrwm_solve(const CompatibilityMatrix& w, const SolverParams& params) {
  const std::size_t p = w.p(), q = w.q();
  const auto n = ix(p * q);
  if (n == 0) return Eigen::VectorXd(0);
  const double d_max = w.w.rowwise().sum().maxCoeff();
  if (!(d_max > 0.0)) throw Error(Errc::ZeroMatrix, "compatibility matrix is all zeros");

  // W is symmetric, so P^T x = P x. Rows of P sum to at most one; the deficit
  // goes to the absorbing state and is dropped by the l1 renormalisation.
  const Eigen::MatrixXd transition = w.w / d_max;
  const std::size_t side = std::max(p, q);
  Eigen::MatrixXd square(ix(side), ix(side));

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (std::size_t it = 0; it < params.max_iters; ++it) {
    const Eigen::VectorXd walked = transition * x;

    // Reweighting jump: inflate, then make (nearly) doubly stochastic. The
    // rectangular case is padded with exp(0) = 1, the value of a zero score.
    Eigen::VectorXd jump = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const double top = walked.maxCoeff();
    if (top > 0.0) {
      square.setOnes();
      for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < q; ++c) {
          square(ix(r), ix(c)) = std::exp(params.beta * walked(w.index(r, c)) / top);
        }
      }
      for (std::size_t s = 0; s < params.sinkhorn_iters; ++s) {
        square.array().colwise() /= square.rowwise().sum().array();
        square.array().rowwise() /= square.colwise().sum().array();
      }
      for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < q; ++c) jump(w.index(r, c)) = square(ix(r), ix(c));
      }
      jump /= jump.sum();
    }

    Eigen::VectorXd next = params.alpha * walked + (1.0 - params.alpha) * jump;
    next /= next.sum();
    const double change = (next - x).lpNorm<1>();
    x = std::move(next);
    if (change < params.conv_tol) break;
  }
  return x;
}

Assignment discretize(const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t p, std::size_t q) {
  if (static_cast<std::size_t>(x.size()) != p * q) {
    throw Error(Errc::DimensionMismatch, "score vector length differs from p * q");
  }
  std::vector<std::size_t> order(p * q);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x(ix(a)) > x(ix(b)); });
  std::vector<bool> row_used(p, false), col_used(q, false);
  Assignment out;
  const std::size_t limit = std::min(p, q);
  for (std::size_t k : order) {
    if (out.pairs.size() == limit) break;
    const std::size_t r = k / q, c = k % q;
    if (row_used[r] || col_used[c]) continue;
    row_used[r] = col_used[c] = true;
    out.pairs.emplace_back(r, c);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

double assignment_objective(const CompatibilityMatrix& w, const Assignment& assignment) {
  double total = 0.0;
  for (const auto& [r, c] : assignment.pairs) {
    for (const auto& [r2, c2] : assignment.pairs) total += w.w(w.index(r, c), w.index(r2, c2));
  }
  return total;
}

Assignment brute_force_solve(const CompatibilityMatrix& w) {
  const std::size_t p = w.p(), q = w.q();
  const bool rows_first = p <= q;
  const std::size_t small = std::min(p, q), large = std::max(p, q);
  if (small > 8) throw Error(Errc::TooLarge, "brute force limited to min(p, q) <= 8");
  double count = 1.0;
  for (std::size_t k = 0; k < small; ++k) count *= static_cast<double>(large - k);
  if (count > 5e7) throw Error(Errc::TooLarge, "too many injections to enumerate");

  auto index_of = [&](std::size_t s, std::size_t l) {
    return rows_first ? w.index(s, l) : w.index(l, s);
  };
  std::vector<std::size_t> current(small), best(small);
  std::vector<bool> used(large, false);
  double best_value = -std::numeric_limits<double>::infinity();

  auto recurse = [&](auto&& self, std::size_t depth, double value) -> void {
    if (depth == small) {
      if (value > best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    for (std::size_t l = 0; l < large; ++l) {
      if (used[l]) continue;
      const Eigen::Index k = index_of(depth, l);
      double gain = w.w(k, k);
      for (std::size_t d = 0; d < depth; ++d) gain += 2.0 * w.w(k, index_of(d, current[d]));
      used[l] = true;
      current[depth] = l;
      self(self, depth + 1, value + gain);
      used[l] = false;
    }
  };
  recurse(recurse, 0, 0.0);

  Assignment out;
  for (std::size_t s = 0; s < small; ++s) {
    if (rows_first) {
      out.pairs.emplace_back(s, best[s]);
    } else {
      out.pairs.emplace_back(best[s], s);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  out.objective = small == 0 ? 0.0 : best_value;
  return out;
}

Assignment spectral_solve(const CompatibilityMatrix& w) {
  const std::size_t p = w.p(), q = w.q();
  if (p * q == 0) return Assignment{};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w.w);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::ConvergenceFailure, "eigensolver failed on W");
  }
  const Eigen::Index last = w.w.rows() - 1;
  const double lambda = solver.eigenvalues()(last);
  Eigen::VectorXd v = solver.eigenvectors().col(last);
  if (v.sum() < 0.0) v = -v;
  const double residual = (w.w * v - lambda * v).norm();
  if (residual > 1e-8 * std::max(1.0, std::abs(lambda))) {
    throw Error(Errc::ConvergenceFailure, "leading eigenvector residual " + std::to_string(residual));
  }
  Assignment out = discretize(v.cwiseMax(0.0), p, q);
  out.objective = assignment_objective(w, out);
  return out;
}

Assignment solve(const CompatibilityMatrix& w, SolverKind kind, const SolverParams& params) {
  switch (kind) {
    case SolverKind::BruteForce: return brute_force_solve(w);
    case SolverKind::Spectral: return spectral_solve(w);
    case SolverKind::Rrwm: break;
  }
  if (w.p() * w.q() == 0) return Assignment{};
  Assignment out = discretize(rrwm_solve(w, params), w.p(), w.q());
  out.objective = assignment_objective(w, out);
  return out;
}

Assignment match(const GraphPair& pair, const AnchorSet& anchors, const MatchConfig& config) {
  anchors.check_bounds(pair.source().size(), pair.target().size());
  std::optional<ProximityMatrix> learned;
  if (config.variant.uses_proximity()) {
    learned = learn_proximity(pair.learning_problem(anchors), config.learn).b;
  }
  const CompatibilityMatrix w = build_compatibility(pair, anchors, config.variant,
                                                    learned ? &*learned : nullptr, config.solver);
  Assignment local = solve(w, config.solver_kind, config.solver);
  Assignment out;
  out.objective = local.objective;
  for (const auto& [r, c] : local.pairs) out.pairs.emplace_back(w.sources[r], w.targets[c]);
  return out;
}

Assignment match(const WeightedGraph& source, const WeightedGraph& target, const AnchorSet& anchors,
                 const MatchConfig& config) {
  return match(GraphPair(source, target, config.pair), anchors, config);
}

}  // namespace anchormatch
