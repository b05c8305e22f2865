#include "anchormatch/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anchormatch/error.hpp"

namespace anchormatch {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

// Non-negative integer index, or ParseError naming the location.
std::size_t as_index(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(Errc::ParseError, where + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

// Shortest text that round-trips.
std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, std::string_view column) {
  s = trim(s);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": bad " + std::string(column) +
                                      " '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

WeightedGraph parse_graph_json_text(std::string_view text) {
  const json doc = parse_json(text, "graph");
  if (!doc.is_object()) throw Error(Errc::ParseError, "graph: top level must be an object");
  if (!doc.contains("n")) throw Error(Errc::ParseError, "graph: missing \"n\"");
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw Error(Errc::ParseError, "graph: missing \"edges\" array");
  }
  const std::size_t n = as_index(doc["n"], "graph.n");
  std::vector<Edge> edges;
  const json& list = doc["edges"];
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "graph.edges[" + std::to_string(k) + "]";
    const json& e = list[k];
    if (!e.is_array() || e.size() != 3 || !e[2].is_number()) {
      throw Error(Errc::ParseError, where + ": expected [i, j, w]");
    }
    edges.push_back({as_index(e[0], where), as_index(e[1], where), e[2].get<double>()});
  }
  try {
    return WeightedGraph::build(n, edges);
  } catch (const Error& e) {
    throw Error(Errc::ValidationError, std::string("graph: ") + e.what());
  }
}

WeightedGraph parse_graph_json(const std::filesystem::path& path) {
  return parse_graph_json_text(read_file(path));
}

std::string graph_to_json(const WeightedGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back(json::array({e.i, e.j, e.w}));
  return json{{"n", g.size()}, {"edges", edges}}.dump();
}

AnchorSet parse_anchors_json_text(std::string_view text) {
  const json doc = parse_json(text, "anchors");
  if (!doc.is_array()) throw Error(Errc::ParseError, "anchors: expected an array of [i, a]");
  std::vector<AnchorPair> pairs;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const std::string where = "anchors[" + std::to_string(k) + "]";
    if (!doc[k].is_array() || doc[k].size() != 2) {
      throw Error(Errc::ParseError, where + ": expected [i, a]");
    }
    pairs.push_back({as_index(doc[k][0], where), as_index(doc[k][1], where)});
  }
  return AnchorSet(std::move(pairs));
}

AnchorSet parse_anchors_json(const std::filesystem::path& path) {
  return parse_anchors_json_text(read_file(path));
}

std::string anchors_to_json(const AnchorSet& anchors) {
  json out = json::array();
  for (const AnchorPair& p : anchors.pairs()) out.push_back(json::array({p.source, p.target}));
  return out.dump();
}

ProximityMatrix parse_proximity_json_text(std::string_view text) {
  const json doc = parse_json(text, "proximity");
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("values") ||
      !doc["values"].is_array()) {
    throw Error(Errc::ParseError, "proximity: expected {\"dim\": d, \"values\": [...]}");
  }
  const std::size_t dim = as_index(doc["dim"], "proximity.dim");
  const json& values = doc["values"];
  if (values.size() != dim * dim) {
    throw Error(Errc::ParseError, "proximity: expected " + std::to_string(dim * dim) + " values");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd b(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const json& v = values[static_cast<std::size_t>(r * d + c)];
      if (!v.is_number()) throw Error(Errc::ParseError, "proximity: non-numeric entry");
      b(r, c) = v.get<double>();
    }
  }
  try {
    return ProximityMatrix(std::move(b));
  } catch (const Error& e) {
    throw Error(Errc::ValidationError, std::string("proximity: ") + e.what());
  }
}

std::string proximity_to_json(const ProximityMatrix& b) {
  json values = json::array();
  const Eigen::MatrixXd& m = b.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  }
  return json{{"dim", b.dim()}, {"values", values}}.dump();
}

std::string assignment_to_json(const Assignment& assignment) {
  json pairs = json::array();
  for (const auto& [i, a] : assignment.pairs) pairs.push_back(json::array({i, a}));
  return json{{"pairs", pairs}, {"objective", assignment.objective}}.dump();
}

PointFrames parse_points_csv_text(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(Errc::ParseError, "points: empty input");

  const auto header = split(trim(lines.front()), ',');
  if (header.size() != 4 || trim(header[0]) != "frame" || trim(header[1]) != "point" ||
      trim(header[2]) != "x" || trim(header[3]) != "y") {
    throw Error(Errc::ParseError, "points: header must be frame,point,x,y");
  }

  std::map<long long, std::map<long long, Point2>> by_frame;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    if (trim(lines[k]).empty()) continue;
    const auto cols = split(trim(lines[k]), ',');
    if (cols.size() != 4) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 4 columns");
    }
    const auto frame = parse_number<long long>(cols[0], line_no, "frame");
    const auto point = parse_number<long long>(cols[1], line_no, "point");
    const Point2 pt{parse_number<double>(cols[2], line_no, "x"),
                    parse_number<double>(cols[3], line_no, "y")};
    if (!by_frame[frame].emplace(point, pt).second) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": point " +
                                        std::to_string(point) + " repeated in frame " +
                                        std::to_string(frame));
    }
  }
  if (by_frame.empty()) throw Error(Errc::ParseError, "points: no rows");

  PointFrames out;
  std::set<long long> ids;
  for (const auto& [frame, points] : by_frame) {
    for (const auto& [id, pt] : points) ids.insert(id);
  }
  out.point_ids.assign(ids.begin(), ids.end());
  for (const auto& [frame, points] : by_frame) {
    if (points.size() != ids.size()) {
      for (long long id : ids) {
        if (!points.contains(id)) {
          throw Error(Errc::InconsistentPointSets, "frame " + std::to_string(frame) +
                                                       " lacks point " + std::to_string(id));
        }
      }
    }
    std::vector<Point2>& dst = out.frames[frame];
    for (const auto& [id, pt] : points) dst.push_back(pt);
  }
  return out;
}

PointFrames parse_points_csv(const std::filesystem::path& path) {
  return parse_points_csv_text(read_file(path));
}

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records) {
  out << "variant,axis,value,trial,accuracy,time_ms,seed,status\n";
  for (const ResultRecord& r : records) {
    out << variant_name(r.variant) << ',' << axis_name(r.axis) << ',' << format_double(r.value)
        << ',' << r.trial << ',' << format_double(r.accuracy) << ',' << std::fixed
        << std::setprecision(3) << r.time_ms << std::defaultfloat << ',' << r.seed << ','
        << r.status << '\n';
  }
}

}  // namespace anchormatch
