#pragma once

// File formats.
//
//   graph       {"n": 3, "edges": [[0, 1, 0.5], [1, 2, 1.0]]}
//   anchors     [[0, 3], [5, 1]]
//   proximity   {"dim": 4, "values": [row-major entries]}
//   assignment  {"pairs": [[i, a], ...], "objective": 12.5}
//   points CSV  header frame,point,x,y; one row per landmark
//   results CSV variant,axis,value,trial,accuracy,time_ms,seed,status

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anchormatch/anchors.hpp"
#include "anchormatch/bench.hpp"
#include "anchormatch/graph.hpp"
#include "anchormatch/matcher.hpp"
#include "anchormatch/signatures.hpp"

namespace anchormatch {

/// Throws ParseError (malformed JSON, missing or mistyped fields) or
/// ValidationError (graph invariants); messages carry the offending position.
WeightedGraph parse_graph_json_text(std::string_view text);
WeightedGraph parse_graph_json(const std::filesystem::path& path);
std::string graph_to_json(const WeightedGraph& g);

/// Throws ParseError, EmptyAnchorSet or DuplicateAnchor.
AnchorSet parse_anchors_json_text(std::string_view text);
AnchorSet parse_anchors_json(const std::filesystem::path& path);
std::string anchors_to_json(const AnchorSet& anchors);

ProximityMatrix parse_proximity_json_text(std::string_view text);
std::string proximity_to_json(const ProximityMatrix& b);

std::string assignment_to_json(const Assignment& assignment);

/// Point ids in ascending order and one point set per frame, listed in that
/// id order.
struct PointFrames {
  std::vector<long long> point_ids;
  std::map<long long, std::vector<Point2>> frames;
};

/// Throws ParseError (empty input, bad header or row) or InconsistentPointSets.
PointFrames parse_points_csv_text(std::string_view text);
PointFrames parse_points_csv(const std::filesystem::path& path);

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records);

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace anchormatch
