#include "anchormatch/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "anchormatch/error.hpp"

namespace anchormatch {

namespace {

constexpr int kMaxGenerationAttempts = 1000;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Weight in (0, 1].
double draw_weight(std::mt19937_64& rng) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

std::optional<NodeId> GroundTruth::partner(NodeId source) const {
  for (const AnchorPair& p : inliers) {
    if (p.source == source) return p.target;
  }
  return std::nullopt;
}

SyntheticPair generate_pair(const SyntheticSpec& spec) {
  if (spec.n_in < 2) throw Error(Errc::InvalidSpec, "n_in must be at least 2");
  if (!(spec.rho > 0.0 && spec.rho <= 1.0)) throw Error(Errc::InvalidSpec, "rho must lie in (0, 1]");
  if (!(spec.sigma >= 0.0)) throw Error(Errc::InvalidSpec, "sigma must be nonnegative");

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution has_edge(spec.rho);
  // Only sampled when sigma > 0; the distribution requires a positive stddev.
  std::normal_distribution<double> noise(0.0, spec.sigma > 0.0 ? spec.sigma : 1.0);
  const std::size_t n1 = spec.n_in + spec.n_out1;
  const std::size_t n2 = spec.n_in + spec.n_out2;

  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    std::vector<Edge> source_edges, target_edges;
    // Shared inlier structure; G' copies it with perturbed weights.
    for (NodeId i = 0; i < spec.n_in; ++i) {
      for (NodeId j = i + 1; j < spec.n_in; ++j) {
        if (!has_edge(rng)) continue;
        const double w = draw_weight(rng);
        source_edges.push_back({i, j, w});
        const double perturbed = spec.sigma > 0.0 ? w + noise(rng) : w;
        target_edges.push_back({i, j, std::max(perturbed, kMinPerturbedWeight)});
      }
    }
    // Outliers: every pair touching a node >= n_in, drawn independently per graph.
    auto add_outliers = [&](std::size_t n, std::vector<Edge>& edges) {
      for (NodeId j = spec.n_in; j < n; ++j) {
        for (NodeId i = 0; i < j; ++i) {
          if (has_edge(rng)) edges.push_back({i, j, draw_weight(rng)});
        }
      }
    };
    add_outliers(n1, source_edges);
    add_outliers(n2, target_edges);

    std::vector<NodeId> perm(n2);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    WeightedGraph source = WeightedGraph::build(n1, source_edges);
    WeightedGraph target = WeightedGraph::build(n2, target_edges).relabeled(perm);
    if (!source.is_connected() || !target.is_connected()) continue;

    GroundTruth truth;
    for (NodeId i = 0; i < spec.n_in; ++i) truth.inliers.push_back({i, perm[i]});
    for (NodeId i = spec.n_in; i < n1; ++i) truth.source_outliers.push_back(i);
    for (NodeId i = spec.n_in; i < n2; ++i) truth.target_outliers.push_back(perm[i]);
    std::sort(truth.target_outliers.begin(), truth.target_outliers.end());
    return SyntheticPair{std::move(source), std::move(target), std::move(truth)};
  }
  throw Error(Errc::InvalidSpec, "could not draw a connected pair in " +
                                     std::to_string(kMaxGenerationAttempts) + " attempts");
}

AnchorSet select_anchors(const GroundTruth& truth, std::size_t count, std::uint64_t seed) {
  if (count > truth.inliers.size()) {
    throw Error(Errc::TooManyAnchors, std::to_string(count) + " anchors requested, " +
                                          std::to_string(truth.inliers.size()) + " inliers");
  }
  std::vector<AnchorPair> pool = truth.inliers;
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(count);
  std::sort(pool.begin(), pool.end(),
            [](const AnchorPair& a, const AnchorPair& b) { return a.source < b.source; });
  return AnchorSet(std::move(pool));
}

double accuracy(const Assignment& assignment, const GroundTruth& truth, const AnchorSet& anchors) {
  std::size_t eligible = 0, correct = 0;
  for (const AnchorPair& inlier : truth.inliers) {
    const bool is_anchor = std::any_of(anchors.pairs().begin(), anchors.pairs().end(),
                                       [&](const AnchorPair& a) { return a.source == inlier.source; });
    if (is_anchor) continue;
    ++eligible;
    for (const auto& [i, a] : assignment.pairs) {
      if (i == inlier.source) {
        if (a == inlier.target) ++correct;
        break;
      }
    }
  }
  return eligible == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(eligible);
}

WeightedGraph points_to_graph(std::span<const Point2> points) {
  if (points.size() < 2) throw Error(Errc::InvalidSpec, "need at least two points");
  std::vector<Edge> edges;
  edges.reserve(points.size() * (points.size() - 1) / 2);
  for (NodeId i = 0; i < points.size(); ++i) {
    for (NodeId j = i + 1; j < points.size(); ++j) {
      const double d = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      if (!(d > 0.0)) {
        throw Error(Errc::DuplicatePoints, "points " + std::to_string(i) + " and " +
                                               std::to_string(j) + " coincide");
      }
      edges.push_back({i, j, d});
    }
  }
  return WeightedGraph::build(points.size(), edges);
}

std::vector<std::vector<Point2>> synthetic_point_sequence(const PointSequenceSpec& spec) {
  if (spec.n_points < 3) throw Error(Errc::InvalidSpec, "n_points must be at least 3");
  if (spec.n_frames < 1) throw Error(Errc::InvalidSpec, "n_frames must be at least 1");
  if (!(spec.noise_std >= 0.0)) throw Error(Errc::InvalidSpec, "noise_std must be nonnegative");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<Point2> base(spec.n_points);
  for (Point2& pt : base) pt = {coord(rng), coord(rng)};
  const double heading = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  std::normal_distribution<double> jitter(0.0, 1.0);

  std::vector<std::vector<Point2>> frames(spec.n_frames);
  for (std::size_t f = 0; f < spec.n_frames; ++f) {
    const double progress =
        spec.n_frames > 1 ? static_cast<double>(f) / static_cast<double>(spec.n_frames - 1) : 0.0;
    const double angle = spec.rotation_range * progress;
    const double shift = spec.translation_range * progress;
    const double cs = std::cos(angle), sn = std::sin(angle);
    frames[f].reserve(spec.n_points);
    for (const Point2& pt : base) {
      Point2 moved{cs * pt.x - sn * pt.y + shift * std::cos(heading),
                   sn * pt.x + cs * pt.y + shift * std::sin(heading)};
      if (spec.noise_std > 0.0) {
        moved.x += spec.noise_std * jitter(rng);
        moved.y += spec.noise_std * jitter(rng);
      }
      frames[f].push_back(moved);
    }
  }
  return frames;
}

std::string_view axis_name(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::Deformation: return "deformation";
    case SweepAxis::Outliers: return "outliers";
    case SweepAxis::Density: return "density";
    case SweepAxis::Anchors: return "anchors";
  }
  return "?";
}

SweepAxis parse_axis(std::string_view text) {
  for (SweepAxis a : {SweepAxis::Deformation, SweepAxis::Outliers, SweepAxis::Density,
                      SweepAxis::Anchors}) {
    if (axis_name(a) == text) return a;
  }
  throw Error(Errc::ParseError, "unknown axis '" + std::string(text) + "'");
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t value_index, std::size_t trial) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ value_index) ^ (trial + 0x51ed2701ULL));
}

namespace {

struct Cell {
  WeightedGraph source;
  WeightedGraph target;
  GroundTruth truth;
  std::size_t anchor_count = 0;
};

Cell make_cell(const SweepSpec& spec, double value, std::uint64_t seed) {
  Cell cell;
  cell.anchor_count = spec.anchor_count;
  if (spec.source == PairSource::RandomGraph) {
    SyntheticSpec g = spec.graph;
    g.seed = seed;
    switch (spec.axis) {
      case SweepAxis::Deformation: g.sigma = value; break;
      case SweepAxis::Outliers:
        g.n_out1 = g.n_out2 = static_cast<std::size_t>(std::lround(value));
        break;
      case SweepAxis::Density: g.rho = value; break;
      case SweepAxis::Anchors: cell.anchor_count = static_cast<std::size_t>(std::lround(value)); break;
    }
    SyntheticPair pair = generate_pair(g);
    cell.source = std::move(pair.source);
    cell.target = std::move(pair.target);
    cell.truth = std::move(pair.truth);
    return cell;
  }

  PointSequenceSpec ps = spec.points;
  ps.seed = seed;
  switch (spec.axis) {
    case SweepAxis::Deformation: ps.noise_std = value; break;
    case SweepAxis::Anchors: cell.anchor_count = static_cast<std::size_t>(std::lround(value)); break;
    default:
      throw Error(Errc::InvalidSpec, "point sequences support the deformation and anchors axes");
  }
  const auto frames = synthetic_point_sequence(ps);
  // Relabel the last frame so index order carries no hint of the truth.
  std::vector<NodeId> perm(ps.n_points);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::mt19937_64 rng(splitmix64(seed ^ 0x7065726dULL));
  std::shuffle(perm.begin(), perm.end(), rng);
  cell.source = points_to_graph(frames.front());
  cell.target = points_to_graph(frames.back()).relabeled(perm);
  for (NodeId k = 0; k < ps.n_points; ++k) cell.truth.inliers.push_back({k, perm[k]});
  return cell;
}

std::string error_status(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return "error:" + std::string(to_string(err->code()));
  }
  return "error:exception";
}

}  // namespace

std::vector<ResultRecord> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw Error(Errc::InvalidSpec, "sweep needs at least one value");
  if (spec.trials < 1) throw Error(Errc::InvalidSpec, "sweep needs at least one trial");
  if (spec.variants.empty()) throw Error(Errc::InvalidSpec, "sweep needs at least one variant");
  if (spec.source == PairSource::PointSequence &&
      (spec.axis == SweepAxis::Outliers || spec.axis == SweepAxis::Density)) {
    throw Error(Errc::InvalidSpec, "point sequences support the deformation and anchors axes");
  }

  const std::size_t cells = spec.values.size() * spec.trials;
  const std::size_t per_cell = spec.variants.size();
  std::vector<ResultRecord> records(cells * per_cell);

  auto run_cell = [&](std::size_t cell_index) {
    const std::size_t value_index = cell_index / spec.trials;
    const std::size_t trial = cell_index % spec.trials;
    const double value = spec.values[value_index];
    const std::uint64_t seed = trial_seed(spec.seed, value_index, trial);

    for (std::size_t v = 0; v < per_cell; ++v) {
      ResultRecord& rec = records[cell_index * per_cell + v];
      rec.variant = spec.variants[v];
      rec.axis = spec.axis;
      rec.value = value;
      rec.trial = trial;
      rec.seed = seed;
    }

    std::optional<Cell> cell;
    std::optional<AnchorSet> anchors;
    try {
      cell = make_cell(spec, value, seed);
      anchors = select_anchors(cell->truth, cell->anchor_count, splitmix64(seed));
    } catch (const std::exception& e) {
      for (std::size_t v = 0; v < per_cell; ++v) {
        records[cell_index * per_cell + v].status = error_status(e);
      }
      return;
    }

    for (std::size_t v = 0; v < per_cell; ++v) {
      ResultRecord& rec = records[cell_index * per_cell + v];
      MatchConfig config;
      config.variant = VariantConfig::defaults(rec.variant);
      if (rec.variant == Variant::ProximityAnchorHeat) {
        config.variant.c_b = spec.c_b;
        config.variant.c_ap = spec.c_ap;
      }
      config.solver = spec.solver;
      config.learn = spec.learn;
      config.pair = spec.pair;
      const auto start = std::chrono::steady_clock::now();
      try {
        const Assignment a = match(cell->source, cell->target, *anchors, config);
        rec.accuracy = accuracy(a, cell->truth, *anchors);
      } catch (const std::exception& e) {
        rec.status = error_status(e);
      }
      rec.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                        .count();
    }
  };

  std::size_t workers = spec.threads != 0 ? spec.threads
                                          : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cells);
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
    return records;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
      });
    }
  }
  return records;
}

std::optional<double> mean_accuracy(std::span<const ResultRecord> records, Variant variant,
                                    double value) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const ResultRecord& r : records) {
    if (r.variant == variant && r.value == value && r.ok()) {
      sum += r.accuracy;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace anchormatch
