#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "anchormatch/graph.hpp"

namespace anchormatch::testing {

// Random spanning tree plus Bernoulli(extra) edges, weights in [0.1, 1].
inline WeightedGraph random_connected_graph(std::size_t n, double extra, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::bernoulli_distribution coin(extra);
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) {
    const NodeId u = std::uniform_int_distribution<NodeId>(0, v - 1)(rng);
    used[u][v] = true;
    edges.push_back({u, v, weight(rng)});
  }
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (!used[u][v] && coin(rng)) edges.push_back({u, v, weight(rng)});
    }
  }
  return WeightedGraph::build(n, edges);
}

// Redraws until the Laplacian spectrum has all gaps above `min_gap`.
inline WeightedGraph random_simple_spectrum_graph(std::size_t n, double extra, std::uint64_t seed,
                                                  double min_gap = 1e-4) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    WeightedGraph g = random_connected_graph(n, extra, seed * 7919 + attempt);
    if (spectral_decomposition(g).min_gap() > min_gap) return g;
  }
}

inline std::vector<NodeId> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

inline WeightedGraph path_graph(std::size_t n, double w = 1.0) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1, w});
  return WeightedGraph::build(n, edges);
}

}  // namespace anchormatch::testing
