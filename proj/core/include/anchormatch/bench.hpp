#pragma once

// Synthetic experiment protocol: random graph pairs with shared inliers,
// point-set sequences, accuracy, and parameter sweeps over variants i-vi.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anchormatch/anchors.hpp"
#include "anchormatch/graph.hpp"
#include "anchormatch/matcher.hpp"

namespace anchormatch {

struct SyntheticSpec {
  std::size_t n_in = 20;
  std::size_t n_out1 = 0;
  std::size_t n_out2 = 0;
  double rho = 0.5;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  std::vector<AnchorPair> inliers;  // bijection between inlier nodes
  std::vector<NodeId> source_outliers;
  std::vector<NodeId> target_outliers;

  [[nodiscard]] std::optional<NodeId> partner(NodeId source) const;
};

struct SyntheticPair {
  WeightedGraph source;
  WeightedGraph target;
  GroundTruth truth;
};

/// Perturbed weights are clamped to at least this value.
inline constexpr double kMinPerturbedWeight = 1e-6;

/// Inlier subgraph drawn once (Bernoulli(rho) edges, weights in (0, 1]);
/// G' inlier weights get N(0, sigma^2) noise; outliers are drawn per graph;
/// G' nodes are randomly relabelled. Pairs are redrawn until both graphs are
/// connected. Throws InvalidSpec.
SyntheticPair generate_pair(const SyntheticSpec& spec);

/// Uniform sample of `count` inlier correspondences. count == 0 yields
/// EmptyAnchorSet from AnchorSet itself; count > n_in throws TooManyAnchors.
AnchorSet select_anchors(const GroundTruth& truth, std::size_t count, std::uint64_t seed);

/// Fraction of non-anchor inliers assigned to their true partner.
double accuracy(const Assignment& assignment, const GroundTruth& truth, const AnchorSet& anchors);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Complete graph weighted by Euclidean distance. Throws DuplicatePoints and
/// InvalidSpec (fewer than two points).
WeightedGraph points_to_graph(std::span<const Point2> points);

struct PointSequenceSpec {
  std::size_t n_points = 30;
  std::size_t n_frames = 2;
  double rotation_range = 0.0;     // radians, reached at the last frame
  double noise_std = 0.0;          // per-coordinate Gaussian noise
  double translation_range = 0.0;  // offset magnitude reached at the last frame
  std::uint64_t seed = 0;
};

/// Base cloud uniform in [-1, 1]^2; frame f is rotated by
/// rotation_range * f / (n_frames - 1), translated, then jittered.
/// Point k of every frame is the same landmark. Throws InvalidSpec.
std::vector<std::vector<Point2>> synthetic_point_sequence(const PointSequenceSpec& spec);

enum class SweepAxis { Deformation, Outliers, Density, Anchors };
enum class PairSource { RandomGraph, PointSequence };

std::string_view axis_name(SweepAxis axis) noexcept;
/// Throws ParseError.
SweepAxis parse_axis(std::string_view text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Deformation;
  std::vector<double> values;
  std::size_t trials = 50;
  std::vector<Variant> variants;
  std::size_t anchor_count = 2;
  PairSource source = PairSource::RandomGraph;
  /// Base parameters; the swept one is overwritten per value. For point
  /// sequences the deformation axis drives noise_std.
  SyntheticSpec graph;
  PointSequenceSpec points;
  /// c_B / c_ap for variant vi (the other variants use their fixed weights).
  double c_b = 8.0;
  double c_ap = 3.0;
  SolverParams solver;
  LearnConfig learn;
  GraphPair::Options pair;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct ResultRecord {
  Variant variant = Variant::Adjacency;
  SweepAxis axis = SweepAxis::Deformation;
  double value = 0.0;
  std::size_t trial = 0;
  double accuracy = 0.0;
  double time_ms = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";

  [[nodiscard]] bool ok() const noexcept { return status == "ok"; }
};

/// Seed of one (value, trial) cell; every variant of the cell sees the same pair.
std::uint64_t trial_seed(std::uint64_t base, std::size_t value_index, std::size_t trial) noexcept;

/// Records are ordered by value, trial, then variant regardless of threading.
/// Failures are recorded with status "error:<code>" rather than thrown.
std::vector<ResultRecord> run_sweep(const SweepSpec& spec);

/// Mean accuracy over successful records of one variant at one axis value;
/// nullopt when there are none.
std::optional<double> mean_accuracy(std::span<const ResultRecord> records, Variant variant,
                                    double value);

}  // namespace anchormatch
