#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "anchormatch/error.hpp"
#include "anchormatch/matcher.hpp"
#include "assignment_oracle.hpp"
#include "random_graphs.hpp"
#include "thrown_code.hpp"

namespace anchormatch {
namespace {

using testing::random_connected_graph;
using testing::random_permutation;
using testing::random_simple_spectrum_graph;
using testing::thrown_code;

constexpr Variant kLearnedVariants[] = {Variant::HeatKernel, Variant::HeatKernelWks,
                                        Variant::AnchorHeat, Variant::Proximity,
                                        Variant::ProximityAnchorHeat};

CompatibilityMatrix raw_matrix(Eigen::MatrixXd w, std::size_t p, std::size_t q) {
  CompatibilityMatrix out;
  out.w = std::move(w);
  for (std::size_t r = 0; r < p; ++r) out.sources.push_back(r);
  for (std::size_t c = 0; c < q; ++c) out.targets.push_back(c);
  return out;
}

// Symmetric, entries in [0, 1), zero between conflicting candidates.
CompatibilityMatrix random_compatibility(std::size_t p, std::size_t q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(p * q);
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) {
      const bool conflict = r != c && (r / static_cast<Eigen::Index>(q) == c / static_cast<Eigen::Index>(q) ||
                                       r % static_cast<Eigen::Index>(q) == c % static_cast<Eigen::Index>(q));
      w(r, c) = w(c, r) = conflict ? 0.0 : unit(rng);
    }
  }
  return raw_matrix(std::move(w), p, q);
}

void expect_one_to_one(const Assignment& a) {
  std::set<std::size_t> rows, cols;
  for (const auto& [r, c] : a.pairs) {
    EXPECT_TRUE(rows.insert(r).second);
    EXPECT_TRUE(cols.insert(c).second);
  }
}

MatchConfig config_for(Variant v) {
  MatchConfig config;
  config.variant = VariantConfig::defaults(v);
  return config;
}

double fraction_correct(const Assignment& a, const std::vector<NodeId>& perm) {
  if (a.pairs.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& [i, b] : a.pairs) ok += perm[i] == b ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(a.pairs.size());
}

TEST(Variant, NamesRoundTrip) {
  for (int v = 1; v <= 6; ++v) {
    const auto variant = static_cast<Variant>(v);
    EXPECT_EQ(parse_variant(variant_name(variant)), variant);
    EXPECT_EQ(parse_variant(std::to_string(v)), variant);
  }
  EXPECT_EQ(thrown_code([] { (void)parse_variant("vii"); }), Errc::ParseError);
}

TEST(Variant, DefaultWeights) {
  const auto vi = VariantConfig::defaults(Variant::ProximityAnchorHeat);
  EXPECT_EQ(vi.c_b, 8.0);
  EXPECT_EQ(vi.c_ap, 3.0);
  const auto iv = VariantConfig::defaults(Variant::AnchorHeat);
  EXPECT_EQ(iv.c_b, 0.0);
  EXPECT_EQ(iv.c_ap, 1.0);
  EXPECT_FALSE(iv.uses_proximity());
  EXPECT_TRUE(iv.uses_anchor_heat());
  const auto v = VariantConfig::defaults(Variant::Proximity);
  EXPECT_TRUE(v.uses_proximity());
  EXPECT_FALSE(v.uses_anchor_heat());
  EXPECT_FALSE(VariantConfig::defaults(Variant::HeatKernel).uses_proximity());
}

TEST(SecondOrderDistance, Examples) {
  const auto g = random_simple_spectrum_graph(6, 0.4, 1);
  const auto perm = random_permutation(6, 2);
  const GraphPair pair(g, g.relabeled(perm));
  const auto& k = pair.source_kernel();
  const auto& kp = pair.target_kernel();
  for (NodeId i = 0; i < 6; ++i) {
    for (NodeId j = 0; j < 6; ++j) {
      if (i == j) continue;
      EXPECT_NEAR(second_order_distance(k, kp, i, j, perm[i], perm[j]), 0.0, 1e-12);
      EXPECT_EQ(second_order_distance(k, kp, i, j, 0, 1), second_order_distance(k, kp, j, i, 1, 0));
    }
  }
  KernelMatrix a{1.0, Eigen::Matrix2d::Constant(0.3)};
  KernelMatrix b{1.0, Eigen::Matrix2d::Constant(0.1)};
  EXPECT_NEAR(second_order_distance(a, b, 0, 1, 0, 1), 0.2, 1e-15);
  EXPECT_EQ(thrown_code([&] { (void)second_order_distance(a, b, 1, 1, 0, 1); }),
            Errc::ConflictingPair);
}

TEST(Affinity, MonotoneInDistance) {
  double last = 2.0;
  for (double d = 0.0; d < 3.0; d += 0.1) {
    const double a = affinity(d, 0.7);
    EXPECT_LE(a, last);
    last = a;
  }
  EXPECT_EQ(affinity(0.0, 0.5), 1.0);
}

TEST(BuildCompatibility, IdenticalTrianglesAreAllConsistent) {
  const std::vector<Edge> e{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
  const auto t = WeightedGraph::build(3, e);
  const GraphPair pair(t, t);
  const auto w = build_compatibility(pair, AnchorSet({{0, 0}}),
                                     VariantConfig::defaults(Variant::HeatKernel), nullptr);
  ASSERT_EQ(w.p(), 2u);
  ASSERT_EQ(w.q(), 2u);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t r2 = 0; r2 < 2; ++r2) {
        for (std::size_t c2 = 0; c2 < 2; ++c2) {
          const double expected = (r == r2 || c == c2) ? 0.0 : 1.0;
          EXPECT_EQ(w.w(w.index(r, c), w.index(r2, c2)), expected);
        }
      }
    }
  }
}

TEST(BuildCompatibility, SymmetricWithZeroConflicts) {
  const auto g = random_connected_graph(8, 0.4, 4);
  const auto h = random_connected_graph(9, 0.4, 5);
  const GraphPair pair(g, h);
  const AnchorSet anchors({{0, 1}, {3, 2}});
  const auto b = ProximityMatrix::block_identity(8);
  for (int v = 1; v <= 6; ++v) {
    const auto w = build_compatibility(pair, anchors, VariantConfig::defaults(static_cast<Variant>(v)), &b);
    EXPECT_EQ(w.p(), 6u);
    EXPECT_EQ(w.q(), 7u);
    EXPECT_LE((w.w - w.w.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(w.w(w.index(0, 0), w.index(0, 3)), 0.0);
    EXPECT_EQ(w.w(w.index(0, 2), w.index(4, 2)), 0.0);
    EXPECT_GE(w.w.minCoeff(), 0.0);
    EXPECT_LE(w.w.maxCoeff(), 1.0);
  }
}

TEST(BuildCompatibility, VariantSixUsesBothFirstOrderTerms) {
  const auto g = random_simple_spectrum_graph(7, 0.4, 8);
  const GraphPair pair(g, g);
  const AnchorSet anchors({{0, 0}, {1, 1}});
  const auto b = ProximityMatrix::block_identity(7);
  SolverParams fixed;
  fixed.affinity_sigma = 1.0;
  const auto v6 = build_compatibility(pair, anchors, VariantConfig::defaults(Variant::ProximityAnchorHeat), &b, fixed);

  const auto lp = pair.learning_problem(anchors);
  const std::vector<NodeId> u{0, 1};
  const auto hp = anchor_heat_profile(pair.source_spectrum(), u, pair.diffusion_time());
  const NodeId i = v6.sources[1], a = v6.targets[3];
  const double d = 8.0 * proximity_distance(b, lp.pair(i, a)) +
                   3.0 * std::abs(hp.values(static_cast<Eigen::Index>(i)) -
                                  hp.values(static_cast<Eigen::Index>(a)));
  EXPECT_NEAR(v6.w(v6.index(1, 3), v6.index(1, 3)), std::exp(-d * d), 1e-12);
}

TEST(BuildCompatibility, MissingOrMisfitProximity) {
  const auto g = random_connected_graph(5, 0.4, 1);
  const GraphPair pair(g, g);
  const AnchorSet anchors({{0, 0}});
  EXPECT_EQ(thrown_code([&] {
              (void)build_compatibility(pair, anchors, VariantConfig::defaults(Variant::Proximity), nullptr);
            }),
            Errc::MissingProximityMatrix);
  const auto small = ProximityMatrix::zero(4);
  EXPECT_EQ(thrown_code([&] {
              (void)build_compatibility(pair, anchors,
                                        VariantConfig::defaults(Variant::ProximityAnchorHeat), &small);
            }),
            Errc::DimensionMismatch);
  const AnchorSet outside({{0, 9}});
  EXPECT_EQ(thrown_code([&] {
              (void)build_compatibility(pair, outside, VariantConfig::defaults(Variant::HeatKernel), nullptr);
            }),
            Errc::IndexOutOfRange);
}

TEST(BuildCompatibility, AffinityNeverDecreasesAsDistanceShrinks) {
  // Pulling one target edge weight towards its source counterpart shrinks
  // exactly the adjacency distances that involve that edge.
  const std::vector<Edge> ge{{0, 1, 0.9}, {1, 2, 0.4}, {2, 3, 0.7}, {0, 3, 0.2}, {1, 3, 0.5}};
  std::vector<Edge> he = ge;
  he[1].w = 0.1;
  std::vector<Edge> closer = he;
  closer[1].w = 0.3;
  const auto g = WeightedGraph::build(4, ge);
  SolverParams fixed;
  fixed.affinity_sigma = 0.5;
  const AnchorSet anchors({{0, 0}});
  const auto cfg = VariantConfig::defaults(Variant::Adjacency);
  const auto far = build_compatibility(GraphPair(g, WeightedGraph::build(4, he)), anchors, cfg, nullptr, fixed);
  const auto near = build_compatibility(GraphPair(g, WeightedGraph::build(4, closer)), anchors, cfg, nullptr, fixed);
  EXPECT_GE((near.w - far.w).minCoeff(), -1e-15);
  EXPECT_GT((near.w - far.w).maxCoeff(), 0.0);
}

TEST(Rrwm, ConstantMatrixStaysUniform) {
  const auto w = raw_matrix(Eigen::MatrixXd::Constant(9, 9, 0.4), 3, 3);
  const auto x = rrwm_solve(w);
  EXPECT_LE((x.array() - 1.0 / 9.0).abs().maxCoeff(), 1e-12);
}

TEST(Rrwm, SingleCandidate) {
  const auto x = rrwm_solve(raw_matrix(Eigen::MatrixXd::Constant(1, 1, 0.3), 1, 1));
  ASSERT_EQ(x.size(), 1);
  EXPECT_NEAR(x(0), 1.0, 1e-15);
}

TEST(Rrwm, ZeroMatrixRejected) {
  EXPECT_EQ(thrown_code([] { (void)rrwm_solve(raw_matrix(Eigen::MatrixXd::Zero(4, 4), 2, 2)); }),
            Errc::ZeroMatrix);
}

TEST(Rrwm, RecoversPermutationOfIdenticalGraphs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = random_simple_spectrum_graph(7, 0.4, seed);
    const auto perm = random_permutation(7, seed + 9);
    const GraphPair pair(g, g.relabeled(perm));
    const AnchorSet anchors({{0, perm[0]}});
    const auto w = build_compatibility(pair, anchors, VariantConfig::defaults(Variant::HeatKernel), nullptr);
    const auto rrwm = solve(w, SolverKind::Rrwm);
    const auto exact = brute_force_solve(w);
    EXPECT_EQ(rrwm.pairs, exact.pairs);
    for (const auto& [r, c] : exact.pairs) EXPECT_EQ(perm[w.sources[r]], w.targets[c]);
  }
}

TEST(Discretize, Examples) {
  Eigen::VectorXd identity = Eigen::VectorXd::Zero(9);
  identity(0) = identity(4) = identity(8) = 1.0;
  const auto a = discretize(identity, 3, 3);
  const std::vector<std::pair<std::size_t, std::size_t>> id{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(a.pairs, id);

  Eigen::VectorXd dominant = Eigen::VectorXd::Constant(9, 0.1);
  dominant(2) = dominant(3) = dominant(7) = 0.9;  // (0,2) (1,0) (2,1)
  const std::vector<std::pair<std::size_t, std::size_t>> perm{{0, 2}, {1, 0}, {2, 1}};
  EXPECT_EQ(discretize(dominant, 3, 3).pairs, perm);

  const auto ties = discretize(Eigen::VectorXd::Constant(4, 0.5), 2, 2);
  const std::vector<std::pair<std::size_t, std::size_t>> low{{0, 0}, {1, 1}};
  EXPECT_EQ(ties.pairs, low);
}

TEST(Discretize, RandomScoresGiveMaximalInjection) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t p = 1; p <= 5; ++p) {
    for (std::size_t q = 1; q <= 5; ++q) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(p * q));
      for (auto& v : x) v = unit(rng);
      const auto a = discretize(x, p, q);
      EXPECT_EQ(a.pairs.size(), std::min(p, q));
      expect_one_to_one(a);
    }
  }
}

TEST(BruteForce, SingleCandidate) {
  const auto a = brute_force_solve(raw_matrix(Eigen::MatrixXd::Constant(1, 1, 2.5), 1, 1));
  EXPECT_EQ(a.objective, 2.5);
}

TEST(BruteForce, MatchesPermutationOracle) {
  std::mt19937_64 rng(17);
  for (std::size_t n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto w = random_compatibility(n, n, rng);
      const auto a = brute_force_solve(w);
      EXPECT_NEAR(a.objective, oracle::best_permutation_objective(w.w, n), 1e-12);
      EXPECT_NEAR(a.objective, assignment_objective(w, a), 1e-12);
      expect_one_to_one(a);
    }
  }
}

TEST(BruteForce, RectangularAndGuard) {
  std::mt19937_64 rng(2);
  const auto a = brute_force_solve(random_compatibility(2, 4, rng));
  EXPECT_EQ(a.pairs.size(), 2u);
  expect_one_to_one(a);
  const auto b = brute_force_solve(random_compatibility(4, 2, rng));
  EXPECT_EQ(b.pairs.size(), 2u);
  expect_one_to_one(b);
  EXPECT_EQ(thrown_code([&] { (void)brute_force_solve(random_compatibility(9, 9, rng)); }), Errc::TooLarge);
}

TEST(Spectral, RankOneFollowsVector) {
  Eigen::VectorXd v(9);
  v << 0.1, 0.2, 0.9, 0.8, 0.1, 0.3, 0.2, 0.7, 0.1;
  const auto a = spectral_solve(raw_matrix(v * v.transpose(), 3, 3));
  EXPECT_EQ(a.pairs, discretize(v, 3, 3).pairs);
}

TEST(Spectral, RecoversIdentityOnIdenticalGraphs) {
  const auto g = random_simple_spectrum_graph(5, 0.5, 6);
  const GraphPair pair(g, g);
  const auto w = build_compatibility(pair, AnchorSet({{0, 0}}), VariantConfig::defaults(Variant::HeatKernel), nullptr);
  const auto a = spectral_solve(w);
  for (const auto& [r, c] : a.pairs) EXPECT_EQ(r, c);
  EXPECT_EQ(a.pairs.size(), 4u);
}

TEST(Solvers, RrwmNearBruteForce) {
  std::mt19937_64 rng(23);
  int good = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 4;
    const auto w = random_compatibility(n, n, rng);
    const auto r = solve(w, SolverKind::Rrwm);
    expect_one_to_one(r);
    good += r.objective >= 0.9 * brute_force_solve(w).objective ? 1 : 0;
  }
  EXPECT_GE(good, 27);
}

TEST(Match, IdenticalGraphsVariantSix) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = random_simple_spectrum_graph(10, 0.3, seed);
    const auto perm = random_permutation(10, seed + 1);
    const AnchorSet anchors({{0, perm[0]}, {1, perm[1]}});
    const auto a = match(g, g.relabeled(perm), anchors, config_for(Variant::ProximityAnchorHeat));
    EXPECT_EQ(a.pairs.size(), 8u);
    EXPECT_EQ(fraction_correct(a, perm), 1.0);
  }
}

TEST(Match, NoiselessExactForVariantsTwoToSix) {
  for (Variant v : kLearnedVariants) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto g = random_simple_spectrum_graph(9, 0.4, seed + 40);
      const auto perm = random_permutation(9, seed);
      const AnchorSet anchors({{2, perm[2]}, {5, perm[5]}});
      const auto a = match(g, g.relabeled(perm), anchors, config_for(v));
      EXPECT_EQ(fraction_correct(a, perm), 1.0) << "variant " << variant_name(v);
    }
  }
}

TEST(Match, EmptyWhenEveryNodeIsAnchored) {
  const auto g = random_connected_graph(3, 0.5, 1);
  const auto a = match(g, g, AnchorSet({{0, 0}, {1, 1}, {2, 2}}), config_for(Variant::ProximityAnchorHeat));
  EXPECT_TRUE(a.pairs.empty());
}

TEST(Match, EquivariantUnderRelabelling) {
  const auto g = random_simple_spectrum_graph(8, 0.4, 70);
  const auto h = random_simple_spectrum_graph(8, 0.4, 71);
  const AnchorSet anchors({{0, 1}, {2, 3}});
  const auto perm = random_permutation(8, 5);
  const auto base = match(g, h, anchors, config_for(Variant::ProximityAnchorHeat));
  const auto moved = match(g, h.relabeled(perm), AnchorSet({{0, perm[1]}, {2, perm[3]}}),
                           config_for(Variant::ProximityAnchorHeat));
  std::vector<std::pair<std::size_t, std::size_t>> expected;
  for (const auto& [i, a] : base.pairs) expected.emplace_back(i, perm[a]);
  std::sort(expected.begin(), expected.end());
  auto got = moved.pairs;
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, expected);
}

TEST(Match, RectangularGraphsGiveOneToOnePairs) {
  const auto g = random_connected_graph(7, 0.4, 11);
  const auto h = random_connected_graph(10, 0.4, 12);
  for (Variant v : kLearnedVariants) {
    const auto a = match(g, h, AnchorSet({{0, 0}, {1, 1}}), config_for(v));
    EXPECT_EQ(a.pairs.size(), 5u);
    expect_one_to_one(a);
  }
}

}  // namespace
}  // namespace anchormatch
