#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "anchormatch/anchormatch.hpp"

namespace anchormatch::cli {

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::optional<double> t;
  std::optional<std::size_t> k;
  double c_b = 8.0;
  double c_ap = 3.0;
  double c_reg = 10.0;
  std::string variant = "vi";
  std::size_t trials = 50;
  std::string out;
};

struct PairInput {
  std::vector<std::string> graphs;
  std::string points;
  std::vector<long long> frames;
  std::string anchors;
  std::size_t random_anchors = 0;
};

struct LoadedPair {
  WeightedGraph source;
  WeightedGraph target;
  std::optional<GroundTruth> truth;
};

void add_pair_options(CLI::App& cmd, PairInput& in) {
  cmd.add_option("graphs", in.graphs, "Source and target graph JSON files")->expected(0, 2);
  cmd.add_option("--points", in.points, "Landmark CSV (frame,point,x,y) instead of graph files");
  cmd.add_option("--frames", in.frames, "Two frame ids of the landmark CSV")->expected(2);
  cmd.add_option("--anchors", in.anchors, "Anchor JSON: [[i, a], ...]");
  cmd.add_option("--random-anchors", in.random_anchors,
                 "Draw this many anchors at random (needs --points; uses --seed)");
}

LoadedPair load_pair(const PairInput& in) {
  LoadedPair out;
  if (!in.points.empty()) {
    if (in.frames.size() != 2) throw CLI::ValidationError("--frames", "needs two frame ids");
    const PointFrames pf = parse_points_csv(in.points);
    for (long long f : in.frames) {
      if (!pf.frames.contains(f)) {
        throw Error(Errc::ValidationError, "frame " + std::to_string(f) + " not in " + in.points);
      }
    }
    out.source = points_to_graph(pf.frames.at(in.frames[0]));
    out.target = points_to_graph(pf.frames.at(in.frames[1]));
    GroundTruth truth;
    for (NodeId k = 0; k < pf.point_ids.size(); ++k) truth.inliers.push_back({k, k});
    out.truth = std::move(truth);
    return out;
  }
  if (in.graphs.size() != 2) {
    throw CLI::ValidationError("graphs", "give two graph files or --points with --frames");
  }
  out.source = parse_graph_json(in.graphs[0]);
  out.target = parse_graph_json(in.graphs[1]);
  return out;
}

AnchorSet load_anchors(const PairInput& in, const LoadedPair& pair, std::uint64_t seed) {
  if (!in.anchors.empty()) return parse_anchors_json(in.anchors);
  if (in.random_anchors > 0) {
    if (!pair.truth) throw CLI::ValidationError("--random-anchors", "needs --points");
    return select_anchors(*pair.truth, in.random_anchors, seed);
  }
  throw CLI::ValidationError("--anchors", "give --anchors or --random-anchors");
}

VariantConfig variant_config(const GlobalOptions& g, const CLI::App& app) {
  VariantConfig v = VariantConfig::defaults(parse_variant(g.variant));
  const bool weighted = v.variant == Variant::AnchorHeat || v.variant == Variant::Proximity ||
                        v.variant == Variant::ProximityAnchorHeat;
  if (v.variant == Variant::ProximityAnchorHeat || (weighted && app.count("--c-b") > 0)) {
    v.c_b = g.c_b;
  }
  if (v.variant == Variant::ProximityAnchorHeat || (weighted && app.count("--c-ap") > 0)) {
    v.c_ap = g.c_ap;
  }
  return v;
}

SolverKind parse_solver(const std::string& name) {
  if (name == "rrwm") return SolverKind::Rrwm;
  if (name == "spectral") return SolverKind::Spectral;
  if (name == "brute") return SolverKind::BruteForce;
  throw CLI::ValidationError("--solver", "expected rrwm, spectral or brute");
}

// Writes to --out when given, otherwise to `out`.
void emit(const GlobalOptions& g, std::ostream& out, const std::string& text) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw Error(Errc::ValidationError, "cannot write " + g.out);
  file << text;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw CLI::ValidationError("--values", "bad number '" + item + "'");
    values.push_back(v);
  }
  return values;
}

std::vector<double> default_grid(SweepAxis axis) {
  std::vector<double> v;
  switch (axis) {
    case SweepAxis::Deformation:
      for (int k = 0; k <= 10; ++k) v.push_back(0.05 * k);
      break;
    case SweepAxis::Outliers:
      for (int k = 0; k <= 10; ++k) v.push_back(k);
      break;
    case SweepAxis::Density:
      for (int k = 3; k <= 10; ++k) v.push_back(0.1 * k);
      break;
    case SweepAxis::Anchors:
      v = {2, 5, 10};
      break;
  }
  return v;
}

std::string signatures_csv(const WeightedGraph& g, std::optional<std::size_t> k_opt,
                           std::vector<double> hks_times, std::size_t wks_count) {
  const SpectralDecomposition spectrum = spectral_decomposition(g);
  const std::size_t k = k_opt ? *k_opt : g.size();
  const NodeFeatures theta = node_features(spectrum, k);
  if (hks_times.empty()) {
    // log-spaced over the informative range [4 ln 10 / lambda_max, 4 ln 10 / lambda_min+]
    const double zero = spectrum.zero_threshold();
    double lo = 0.0, hi = 0.0;
    for (double lambda : spectrum.eigenvalues()) {
      if (lambda <= zero) continue;
      if (lo == 0.0) lo = lambda;
      hi = lambda;
    }
    if (hi > 0.0) {
      const double t_min = 4.0 * std::log(10.0) / hi, t_max = 4.0 * std::log(10.0) / lo;
      for (int c = 0; c < 10; ++c) {
        hks_times.push_back(t_min * std::pow(t_max / t_min, c / 9.0));
      }
    } else {
      hks_times.push_back(0.0);
    }
  }
  const Eigen::MatrixXd h = hks(spectrum, hks_times);
  const WksGrid grid = wks_grid(spectrum, spectrum, wks_count);
  const Eigen::MatrixXd w = wks(spectrum, grid.energies, grid.sigma);

  std::ostringstream os;
  os << std::setprecision(17) << "node";
  for (std::size_t c = 0; c < k; ++c) os << ",theta_" << c;
  for (std::size_t c = 0; c < hks_times.size(); ++c) os << ",hks_" << c;
  for (std::size_t c = 0; c < grid.energies.size(); ++c) os << ",wks_" << c;
  os << '\n';
  for (Eigen::Index u = 0; u < theta.theta.rows(); ++u) {
    os << u;
    for (Eigen::Index c = 0; c < theta.theta.cols(); ++c) os << ',' << theta.theta(u, c);
    for (Eigen::Index c = 0; c < h.cols(); ++c) os << ',' << h(u, c);
    for (Eigen::Index c = 0; c < w.cols(); ++c) os << ',' << w(u, c);
    os << '\n';
  }
  return os.str();
}

void warn_degenerate(const GraphPair& pair, std::ostream& err) {
  if (pair.source_spectrum().near_degenerate() || pair.target_spectrum().near_degenerate()) {
    err << "warning: repeated Laplacian eigenvalues; node features depend on the eigenbasis\n";
  }
}

}  // namespace

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph matching with anchor nodes"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random draw");
  app.add_option("--t", g.t, "Diffusion time (default: 1 / mean nonzero eigenvalue)");
  app.add_option("--k", g.k, "Spectral truncation K");
  app.add_option("--c-b", g.c_b, "Weight of d_B in the first-order term")->capture_default_str();
  app.add_option("--c-ap", g.c_ap, "Weight of d_ap in the first-order term")->capture_default_str();
  app.add_option("--c-reg", g.c_reg, "Slack penalty C of the learner")->capture_default_str();
  app.add_option("--variant", g.variant, "Compatibility variant i..vi")
      ->check(CLI::IsMember({"i", "ii", "iii", "iv", "v", "vi", "1", "2", "3", "4", "5", "6"}))
      ->capture_default_str();
  app.add_option("--trials", g.trials, "Trials per sweep value")->capture_default_str();
  app.add_option("--out", g.out, "Write the primary output here instead of stdout");

  PairInput match_in;
  std::string solver_name = "rrwm";
  CLI::App* match_cmd = app.add_subcommand("match", "Match two graphs, print the assignment JSON");
  add_pair_options(*match_cmd, match_in);
  match_cmd->add_option("--solver", solver_name, "rrwm, spectral or brute")
      ->check(CLI::IsMember({"rrwm", "spectral", "brute"}))
      ->capture_default_str();

  PairInput learn_in;
  CLI::App* learn_cmd = app.add_subcommand("learn", "Learn the proximity matrix B, print it as JSON");
  add_pair_options(*learn_cmd, learn_in);

  std::string axis = "deformation", values, variants = "i,ii,iii,iv,v,vi", source = "random";
  SweepSpec sweep;
  std::size_t n_out = 0;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a synthetic sweep, print results CSV");
  bench_cmd->add_option("--axis", axis, "deformation, outliers, density or anchors")
      ->check(CLI::IsMember({"deformation", "outliers", "density", "anchors"}))
      ->capture_default_str();
  bench_cmd->add_option("--values", values, "Comma-separated axis values (default grid per axis)");
  bench_cmd->add_option("--variants", variants, "Comma-separated variants")->capture_default_str();
  bench_cmd->add_option("--source", source, "random (graphs) or points (point sequences)")
      ->check(CLI::IsMember({"random", "points"}))
      ->capture_default_str();
  bench_cmd->add_option("--n-in", sweep.graph.n_in, "Inlier count")->capture_default_str();
  bench_cmd->add_option("--n-out", n_out, "Outliers per graph")->capture_default_str();
  bench_cmd->add_option("--rho", sweep.graph.rho, "Edge density")->capture_default_str();
  bench_cmd->add_option("--sigma", sweep.graph.sigma, "Deformation noise")->capture_default_str();
  bench_cmd->add_option("--anchor-count", sweep.anchor_count, "Anchors per trial")
      ->capture_default_str();
  bench_cmd->add_option("--n-points", sweep.points.n_points, "Points per frame (points source)")
      ->capture_default_str();
  bench_cmd->add_option("--rotation", sweep.points.rotation_range, "Rotation in radians (points)")
      ->capture_default_str();
  bench_cmd->add_option("--noise", sweep.points.noise_std, "Coordinate noise (points)")
      ->capture_default_str();
  bench_cmd->add_option("--threads", sweep.threads, "Worker threads (0: all cores)")
      ->capture_default_str();

  std::string graph_path, hks_times;
  std::size_t wks_count = 20;
  CLI::App* sig_cmd = app.add_subcommand("signatures", "Per-node theta, HKS and WKS as CSV");
  sig_cmd->add_option("graph", graph_path, "Graph JSON file")->required();
  sig_cmd->add_option("--hks-times", hks_times, "Comma-separated HKS times");
  sig_cmd->add_option("--wks-count", wks_count, "Number of WKS energies")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*match_cmd || *learn_cmd) {
      const PairInput& in = *match_cmd ? match_in : learn_in;
      const LoadedPair loaded = load_pair(in);
      const AnchorSet anchors = load_anchors(in, loaded, g.seed);
      GraphPair pair(loaded.source, loaded.target, GraphPair::Options{g.t, g.k});
      warn_degenerate(pair, err);

      MatchConfig config;
      config.variant = variant_config(g, app);
      config.learn.c_reg = g.c_reg;
      config.pair = {g.t, g.k};

      if (*learn_cmd) {
        const LearnResult learned = learn_proximity(pair.learning_problem(anchors), config.learn);
        nlohmann::json doc = nlohmann::json::parse(proximity_to_json(learned.b));
        doc["converged"] = learned.converged;
        doc["iterations"] = learned.iterations;
        doc["xi"] = std::vector<double>(learned.xi.data(), learned.xi.data() + learned.xi.size());
        emit(g, out, doc.dump() + "\n");
        if (!learned.converged) err << "warning: column generation hit the iteration cap\n";
        return 0;
      }

      config.solver_kind = parse_solver(solver_name);
      const Assignment assignment = match(pair, anchors, config);
      nlohmann::json doc = nlohmann::json::parse(assignment_to_json(assignment));
      if (loaded.truth) doc["accuracy"] = accuracy(assignment, *loaded.truth, anchors);
      emit(g, out, doc.dump() + "\n");
      return 0;
    }

    if (*bench_cmd) {
      sweep.axis = parse_axis(axis);
      sweep.values = values.empty() ? default_grid(sweep.axis) : parse_list(values);
      sweep.trials = g.trials;
      sweep.seed = g.seed;
      sweep.c_b = g.c_b;
      sweep.c_ap = g.c_ap;
      sweep.learn.c_reg = g.c_reg;
      sweep.pair = {g.t, g.k};
      sweep.graph.n_out1 = sweep.graph.n_out2 = n_out;
      if (source == "points") {
        sweep.source = PairSource::PointSequence;
      } else if (source != "random") {
        throw CLI::ValidationError("--source", "expected random or points");
      }
      std::stringstream vs(variants);
      std::string item;
      while (std::getline(vs, item, ',')) {
        if (item.empty()) continue;
        try {
          sweep.variants.push_back(parse_variant(item));
        } catch (const Error& e) {
          throw CLI::ValidationError("--variants", e.what());
        }
      }
      const std::vector<ResultRecord> records = run_sweep(sweep);
      std::ostringstream csv;
      write_results_csv(csv, records);
      emit(g, out, csv.str());
      return 0;
    }

    if (*sig_cmd) {
      const WeightedGraph graph = parse_graph_json(graph_path);
      std::vector<double> times = hks_times.empty() ? std::vector<double>{} : parse_list(hks_times);
      emit(g, out, signatures_csv(graph, g.k, std::move(times), wks_count));
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace anchormatch::cli
