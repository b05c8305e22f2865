#pragma once

#include <cstddef>
#include <vector>

#include "anchormatch/graph.hpp"

namespace anchormatch {

/// A known correspondence: node `source` of G matches node `target` of G'.
struct AnchorPair {
  NodeId source = 0;
  NodeId target = 0;

  friend bool operator==(const AnchorPair&, const AnchorPair&) = default;
};

/// Non-empty set of anchor correspondences, one-to-one on both sides.
class AnchorSet {
 public:
  /// Throws EmptyAnchorSet or DuplicateAnchor.
  explicit AnchorSet(std::vector<AnchorPair> pairs);

  [[nodiscard]] const std::vector<AnchorPair>& pairs() const noexcept { return pairs_; }
  [[nodiscard]] std::size_t size() const noexcept { return pairs_.size(); }
  [[nodiscard]] const AnchorPair& operator[](std::size_t m) const { return pairs_[m]; }

  [[nodiscard]] std::vector<NodeId> sources() const;
  [[nodiscard]] std::vector<NodeId> targets() const;

  /// Throws IndexOutOfRange if an anchor refers to a node outside either graph.
  void check_bounds(std::size_t source_nodes, std::size_t target_nodes) const;

  friend bool operator==(const AnchorSet&, const AnchorSet&) = default;

 private:
  std::vector<AnchorPair> pairs_;
};

}  // namespace anchormatch
