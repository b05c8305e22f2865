#include "anchormatch/anchors.hpp"

#include <string>
#include <unordered_set>

#include "anchormatch/error.hpp"

namespace anchormatch {

AnchorSet::AnchorSet(std::vector<AnchorPair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw Error(Errc::EmptyAnchorSet, "at least one anchor is required");
  std::unordered_set<NodeId> seen_source, seen_target;
  for (const AnchorPair& p : pairs_) {
    if (!seen_source.insert(p.source).second) {
      throw Error(Errc::DuplicateAnchor, "source node " + std::to_string(p.source) + " repeated");
    }
    if (!seen_target.insert(p.target).second) {
      throw Error(Errc::DuplicateAnchor, "target node " + std::to_string(p.target) + " repeated");
    }
  }
}

std::vector<NodeId> AnchorSet::sources() const {
  std::vector<NodeId> out;
  out.reserve(pairs_.size());
  for (const AnchorPair& p : pairs_) out.push_back(p.source);
  return out;
}

std::vector<NodeId> AnchorSet::targets() const {
  std::vector<NodeId> out;
  out.reserve(pairs_.size());
  for (const AnchorPair& p : pairs_) out.push_back(p.target);
  return out;
}

void AnchorSet::check_bounds(std::size_t source_nodes, std::size_t target_nodes) const {
  for (const AnchorPair& p : pairs_) {
    if (p.source >= source_nodes || p.target >= target_nodes) {
      throw Error(Errc::IndexOutOfRange, "anchor [" + std::to_string(p.source) + ", " +
                                             std::to_string(p.target) + "] outside the graphs");
    }
  }
}

}  // namespace anchormatch
