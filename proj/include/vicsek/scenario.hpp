#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "vicsek/analysis.hpp"
#include "vicsek/dynamics.hpp"
#include "vicsek/signal.hpp"
#include "vicsek/stream.hpp"

namespace vicsek {

// Parse/validation failure; carries the offending document path.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct HeadingDraw {
  std::uint64_t seed = 0;
  double low = 0.0;
  double high = 0.0;
};

struct GeometryConfig {
  double radius = 1.0;
  double speed = 1.0;
  NeighborhoodKind kind = NeighborhoodKind::kClosed;
  std::vector<std::array<double, 2>> initial_positions;
};

struct SeparationCheckSpec {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

// A fully validated experiment description.
struct Scenario {
  std::string name;
  std::string description;
  int n = 1;
  Mode mode = Mode::kLeaderless;
  std::optional<double> theta0;
  std::variant<std::vector<double>, HeadingDraw> initial_headings;
  std::optional<SwitchingSignal> signal;
  Time steps = 0;
  double tolerance = 1e-9;
  std::optional<GeometryConfig> geometry;
  std::vector<SeparationCheckSpec> separation_checks;
};

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
  return base + "/" + key;
}

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ScenarioError(join_path(path, item.key()), "unknown field");
    }
  }
}

inline const json& require_field(const json& obj, const std::string& path,
                                 const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ScenarioError(path, std::string("missing required field \"") + key +
                                  "\"");
  }
  return *it;
}

inline double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "expected a number");
  return v.get<double>();
}

inline Time integer_at(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ScenarioError(path, "expected an integer");
  return v.get<Time>();
}

inline std::uint64_t seed_at(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ScenarioError(path, "expected a nonnegative integer seed");
  }
  return v.get<std::uint64_t>();
}

inline std::string string_at(const json& v, const std::string& path) {
  if (!v.is_string()) throw ScenarioError(path, "expected a string");
  return v.get<std::string>();
}

inline NeighborGraph graph_at(const json& v, const std::string& path, int n,
                              bool leader) {
  if (v.is_string()) {
    std::string name = v.get<std::string>();
    if (name == "empty") return NeighborGraph::empty_graph(n, leader);
    if (name == "complete") return NeighborGraph::complete(n, leader);
    if (!leader) {
      if (name == "star") return NeighborGraph::star(n);
      if (name == "path") return NeighborGraph::path(n);
    }
    throw ScenarioError(path, "unknown graph name \"" + name +
                                  "\" (use empty, complete, star, path, or an "
                                  "edge list; star/path are follower-only)");
  }
  if (!v.is_array()) {
    throw ScenarioError(path, "expected a graph name or an edge list");
  }
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const json& e = v[k];
    std::string edge_path = path + "/" + std::to_string(k);
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      throw ScenarioError(edge_path, "expected an edge [i, j]");
    }
    edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>()});
  }
  try {
    return NeighborGraph(n, std::move(edges), leader);
  } catch (const std::invalid_argument& err) {
    throw ScenarioError(path, err.what());
  }
}

inline std::vector<NeighborGraph> graph_list_at(const json& v,
                                                const std::string& path, int n,
                                                bool leader) {
  if (!v.is_array() || v.empty()) {
    throw ScenarioError(path, "expected a nonempty list of graphs");
  }
  std::vector<NeighborGraph> graphs;
  for (std::size_t k = 0; k < v.size(); ++k) {
    graphs.push_back(graph_at(v[k], path + "/" + std::to_string(k), n, leader));
  }
  return graphs;
}

inline SwitchingSignal signal_at(const json& v, const std::string& path, int n,
                                 bool leader, const GeometryConfig* geometry) {
  if (!v.is_object()) throw ScenarioError(path, "expected a signal object");
  std::string type =
      string_at(require_field(v, path, "type"), join_path(path, "type"));
  try {
    if (type == "constant") {
      check_keys(v, path, {"type", "graph"});
      return SwitchingSignal::constant(graph_at(
          require_field(v, path, "graph"), join_path(path, "graph"), n,
          leader));
    }
    if (type == "periodic") {
      check_keys(v, path, {"type", "period", "phases"});
      Time period = integer_at(require_field(v, path, "period"),
                               join_path(path, "period"));
      auto phases = graph_list_at(require_field(v, path, "phases"),
                                  join_path(path, "phases"), n, leader);
      return SwitchingSignal::periodic(period, std::move(phases));
    }
    if (type == "sparse") {
      check_keys(v, path, {"type", "connect_times", "event_graph",
                           "idle_graph"});
      NeighborGraph event = graph_at(require_field(v, path, "event_graph"),
                                     join_path(path, "event_graph"), n, leader);
      std::optional<NeighborGraph> idle;
      if (v.contains("idle_graph")) {
        idle = graph_at(v["idle_graph"], join_path(path, "idle_graph"), n,
                        leader);
      }
      const json& times = require_field(v, path, "connect_times");
      std::string times_path = join_path(path, "connect_times");
      if (times.is_string()) {
        if (times.get<std::string>() != "powers_of_two") {
          throw ScenarioError(times_path,
                              "only the \"powers_of_two\" schedule is named");
        }
        return SwitchingSignal::sparse_powers_of_two(std::move(event),
                                                     std::move(idle));
      }
      if (!times.is_array()) {
        throw ScenarioError(times_path,
                            "expected \"powers_of_two\" or a list of times");
      }
      std::vector<Time> ts;
      for (std::size_t k = 0; k < times.size(); ++k) {
        ts.push_back(
            integer_at(times[k], times_path + "/" + std::to_string(k)));
      }
      return SwitchingSignal::sparse_at_times(std::move(ts), std::move(event),
                                              std::move(idle));
    }
    if (type == "bounded_intervals") {
      check_keys(v, path, {"type", "bound", "schedule", "first_start",
                           "stride", "starts"});
      Time bound =
          integer_at(require_field(v, path, "bound"), join_path(path, "bound"));
      auto schedule = graph_list_at(require_field(v, path, "schedule"),
                                    join_path(path, "schedule"), n, leader);
      if (v.contains("starts")) {
        if (v.contains("first_start") || v.contains("stride")) {
          throw ScenarioError(path,
                              "give either starts or first_start/stride");
        }
        std::vector<Time> starts;
        const json& s = v["starts"];
        std::string starts_path = join_path(path, "starts");
        if (!s.is_array()) throw ScenarioError(starts_path, "expected a list");
        for (std::size_t k = 0; k < s.size(); ++k) {
          starts.push_back(
              integer_at(s[k], starts_path + "/" + std::to_string(k)));
        }
        return SwitchingSignal::bounded_intervals_at(
            static_cast<int>(bound), std::move(schedule), std::move(starts));
      }
      Time first = integer_at(require_field(v, path, "first_start"),
                              join_path(path, "first_start"));
      Time stride = integer_at(require_field(v, path, "stride"),
                               join_path(path, "stride"));
      return SwitchingSignal::bounded_intervals(
          static_cast<int>(bound), std::move(schedule), first, stride);
    }
    if (type == "random") {
      check_keys(v, path, {"type", "seed", "p"});
      std::uint64_t seed =
          seed_at(require_field(v, path, "seed"), join_path(path, "seed"));
      double p = number_at(require_field(v, path, "p"), join_path(path, "p"));
      return SwitchingSignal::random(n, seed, p, leader);
    }
    if (type == "trace") {
      check_keys(v, path, {"type", "graphs", "tail"});
      auto graphs = graph_list_at(require_field(v, path, "graphs"),
                                  join_path(path, "graphs"), n, leader);
      std::string tail = string_at(require_field(v, path, "tail"),
                                   join_path(path, "tail"));
      TailPolicy policy;
      if (tail == "hold-last") {
        policy = TailPolicy::kHoldLast;
      } else if (tail == "cycle") {
        policy = TailPolicy::kCycle;
      } else if (tail == "empty") {
        policy = TailPolicy::kEmpty;
      } else {
        throw ScenarioError(join_path(path, "tail"),
                            "expected hold-last, cycle, or empty");
      }
      return SwitchingSignal::trace(std::move(graphs), policy);
    }
    if (type == "geometric") {
      check_keys(v, path, {"type"});
      if (geometry == nullptr) {
        throw ScenarioError(path,
                            "geometric signal requires a geometry block");
      }
      return SwitchingSignal::geometric(n, geometry->radius, geometry->kind,
                                        leader);
    }
  } catch (const std::invalid_argument& err) {
    throw ScenarioError(path, err.what());
  }
  throw ScenarioError(join_path(path, "type"),
                      "unknown signal type \"" + type + "\"");
}

inline GeometryConfig geometry_at(const json& v, const std::string& path,
                                  int n, bool leader) {
  if (!v.is_object()) throw ScenarioError(path, "expected a geometry object");
  check_keys(v, path, {"r", "v", "neighborhood", "initial_positions"});
  GeometryConfig geo;
  geo.radius = number_at(require_field(v, path, "r"), join_path(path, "r"));
  geo.speed = number_at(require_field(v, path, "v"), join_path(path, "v"));
  if (!(geo.radius > 0.0)) {
    throw ScenarioError(join_path(path, "r"), "radius must be > 0");
  }
  if (!(geo.speed > 0.0)) {
    throw ScenarioError(join_path(path, "v"), "speed must be > 0");
  }
  if (v.contains("neighborhood")) {
    std::string kind =
        string_at(v["neighborhood"], join_path(path, "neighborhood"));
    if (kind == "closed") {
      geo.kind = NeighborhoodKind::kClosed;
    } else if (kind == "open") {
      geo.kind = NeighborhoodKind::kOpen;
    } else {
      throw ScenarioError(join_path(path, "neighborhood"),
                          "expected \"closed\" or \"open\"");
    }
  }
  const json& pos = require_field(v, path, "initial_positions");
  std::string pos_path = join_path(path, "initial_positions");
  if (!pos.is_array()) throw ScenarioError(pos_path, "expected a list");
  const std::size_t want = static_cast<std::size_t>(leader ? n + 1 : n);
  if (pos.size() != want) {
    throw ScenarioError(pos_path, "expected " + std::to_string(want) +
                                      " positions, got " +
                                      std::to_string(pos.size()));
  }
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const json& p = pos[k];
    std::string p_path = pos_path + "/" + std::to_string(k);
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      throw ScenarioError(p_path, "expected a coordinate pair [x, y]");
    }
    geo.initial_positions.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return geo;
}

}  // namespace detail

// Strict-schema parse: unknown keys are rejected, every violation names the
// offending path.
inline Scenario parse_scenario(const nlohmann::json& doc,
                               const std::string& root_path = "") {
  using detail::join_path;
  const std::string path = root_path.empty() ? "scenario" : root_path;
  if (!doc.is_object()) throw ScenarioError(path, "expected a JSON object");
  detail::check_keys(doc, path,
                     {"name", "description", "n", "mode", "theta0",
                      "initial_headings", "signal", "steps", "tolerance",
                      "geometry", "separation_checks"});

  Scenario scn;
  scn.name = detail::string_at(detail::require_field(doc, path, "name"),
                               join_path(path, "name"));
  if (scn.name.empty()) {
    throw ScenarioError(join_path(path, "name"), "name must be nonempty");
  }
  if (doc.contains("description")) {
    scn.description =
        detail::string_at(doc["description"], join_path(path, "description"));
  }

  Time n = detail::integer_at(detail::require_field(doc, path, "n"),
                              join_path(path, "n"));
  if (n < 1) throw ScenarioError(join_path(path, "n"), "n must be >= 1");
  scn.n = static_cast<int>(n);

  std::string mode = detail::string_at(
      detail::require_field(doc, path, "mode"), join_path(path, "mode"));
  if (mode == "leaderless") {
    scn.mode = Mode::kLeaderless;
  } else if (mode == "leader") {
    scn.mode = Mode::kLeader;
  } else {
    throw ScenarioError(join_path(path, "mode"),
                        "expected \"leaderless\" or \"leader\"");
  }
  const bool leader = scn.mode == Mode::kLeader;

  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (doc.contains("theta0")) {
    if (!leader) {
      throw ScenarioError(join_path(path, "theta0"),
                          "theta0 is only meaningful in leader mode");
    }
    double theta0 =
        detail::number_at(doc["theta0"], join_path(path, "theta0"));
    if (!(theta0 >= 0.0 && theta0 < kTwoPi)) {
      throw ScenarioError(join_path(path, "theta0"),
                          "theta0 must lie in [0, 2*pi)");
    }
    scn.theta0 = theta0;
  } else if (leader) {
    throw ScenarioError(path, "missing required field \"theta0\"");
  }

  const nlohmann::json& headings =
      detail::require_field(doc, path, "initial_headings");
  std::string headings_path = join_path(path, "initial_headings");
  if (headings.is_array()) {
    if (headings.size() != static_cast<std::size_t>(scn.n)) {
      throw ScenarioError(headings_path,
                          "expected " + std::to_string(scn.n) +
                              " headings, got " +
                              std::to_string(headings.size()));
    }
    std::vector<double> values;
    for (std::size_t k = 0; k < headings.size(); ++k) {
      double x = detail::number_at(headings[k],
                                   headings_path + "/" + std::to_string(k));
      if (!(x >= 0.0 && x < kTwoPi)) {
        throw ScenarioError(headings_path + "/" + std::to_string(k),
                            "headings must lie in [0, 2*pi)");
      }
      values.push_back(x);
    }
    scn.initial_headings = std::move(values);
  } else if (headings.is_object()) {
    detail::check_keys(headings, headings_path, {"seed", "low", "high"});
    HeadingDraw draw;
    draw.seed = detail::seed_at(
        detail::require_field(headings, headings_path, "seed"),
        join_path(headings_path, "seed"));
    draw.low =
        detail::number_at(detail::require_field(headings, headings_path, "low"),
                          join_path(headings_path, "low"));
    draw.high = detail::number_at(
        detail::require_field(headings, headings_path, "high"),
        join_path(headings_path, "high"));
    if (!(draw.low >= 0.0 && draw.low <= draw.high && draw.high <= kTwoPi)) {
      throw ScenarioError(headings_path,
                          "need 0 <= low <= high <= 2*pi for seeded draws");
    }
    scn.initial_headings = draw;
  } else {
    throw ScenarioError(headings_path,
                        "expected a heading list or {seed, low, high}");
  }

  Time steps = detail::integer_at(detail::require_field(doc, path, "steps"),
                                  join_path(path, "steps"));
  if (steps < 0) {
    throw ScenarioError(join_path(path, "steps"), "steps must be >= 0");
  }
  scn.steps = steps;

  if (doc.contains("tolerance")) {
    double tol =
        detail::number_at(doc["tolerance"], join_path(path, "tolerance"));
    if (!(tol > 0.0)) {
      throw ScenarioError(join_path(path, "tolerance"),
                          "tolerance must be > 0");
    }
    scn.tolerance = tol;
  }

  if (doc.contains("geometry")) {
    scn.geometry = detail::geometry_at(doc["geometry"],
                                       join_path(path, "geometry"), scn.n,
                                       leader);
  }

  const nlohmann::json& signal = detail::require_field(doc, path, "signal");
  scn.signal = detail::signal_at(signal, join_path(path, "signal"), scn.n,
                                 leader,
                                 scn.geometry ? &*scn.geometry : nullptr);

  if (scn.geometry && !scn.signal->is_geometric()) {
    throw ScenarioError(join_path(path, "geometry"),
                        "geometry block requires the geometric signal");
  }

  if (doc.contains("separation_checks")) {
    const nlohmann::json& checks = doc["separation_checks"];
    std::string checks_path = join_path(path, "separation_checks");
    if (!checks.is_array()) {
      throw ScenarioError(checks_path, "expected a list");
    }
    for (std::size_t k = 0; k < checks.size(); ++k) {
      const nlohmann::json& c = checks[k];
      std::string c_path = checks_path + "/" + std::to_string(k);
      if (!c.is_object()) throw ScenarioError(c_path, "expected an object");
      detail::check_keys(c, c_path, {"alpha", "beta", "gamma"});
      SeparationCheckSpec spec;
      spec.alpha = detail::number_at(detail::require_field(c, c_path, "alpha"),
                                     join_path(c_path, "alpha"));
      spec.beta = detail::number_at(detail::require_field(c, c_path, "beta"),
                                    join_path(c_path, "beta"));
      spec.gamma = detail::number_at(detail::require_field(c, c_path, "gamma"),
                                     join_path(c_path, "gamma"));
      if (!(spec.alpha < spec.beta && spec.beta < spec.gamma)) {
        throw ScenarioError(c_path, "need alpha < beta < gamma");
      }
      scn.separation_checks.push_back(spec);
    }
  }
  return scn;
}

inline Scenario parse_scenario_text(std::string_view text,
                                    const std::string& origin = "scenario") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ScenarioError(origin, err.what());
  }
  return parse_scenario(doc, origin);
}

inline Scenario parse_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ScenarioError(file.string(), "cannot open scenario file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), file.string());
}

// ---------------------------------------------------------------------------
// Building runtime objects from a scenario
// ---------------------------------------------------------------------------

inline HeadingState build_initial_headings(const Scenario& scn) {
  std::vector<double> values;
  const bool leader = scn.mode == Mode::kLeader;
  if (leader) values.push_back(*scn.theta0);
  if (const auto* explicit_list =
          std::get_if<std::vector<double>>(&scn.initial_headings)) {
    values.insert(values.end(), explicit_list->begin(), explicit_list->end());
  } else {
    const HeadingDraw& draw = std::get<HeadingDraw>(scn.initial_headings);
    for (int i = 1; i <= scn.n; ++i) {
      double u = keyed_unit(draw.seed, kHeadingStream,
                            static_cast<std::uint64_t>(i));
      values.push_back(draw.low + u * (draw.high - draw.low));
    }
  }
  return HeadingState(std::move(values), leader);
}

inline std::optional<PlanarState> build_planar(const Scenario& scn) {
  if (!scn.geometry) return std::nullopt;
  const GeometryConfig& geo = *scn.geometry;
  return PlanarState(geo.initial_positions, geo.speed, geo.radius, geo.kind,
                     scn.mode == Mode::kLeader);
}

struct RunOptions {
  std::optional<Time> steps_override;
  std::optional<double> tolerance_override;
  bool graph_log = false;
};

struct RunResult {
  Trajectory trajectory;
  ConvergenceReport report;
  LimitGraphResult limit;
};

inline RunResult run_scenario_in_memory(const Scenario& scn,
                                        const RunOptions& options = {}) {
  const Time steps = options.steps_override.value_or(scn.steps);
  const double tolerance =
      options.tolerance_override.value_or(scn.tolerance);
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be > 0");
  }
  std::optional<LeaderConfig> leader;
  if (scn.mode == Mode::kLeader) leader = LeaderConfig{*scn.theta0};

  RunResult result{
      simulate(scn.mode, build_initial_headings(scn), leader, *scn.signal,
               steps, build_planar(scn)),
      {},
      {NeighborGraph::empty_graph(scn.n, scn.mode == Mode::kLeader), false}};

  if (scn.signal->is_geometric()) {
    // No standalone limit graph exists: approximate it by the union of the
    // graphs the run actually used over the trailing half.
    const Trajectory& traj = result.trajectory;
    if (traj.steps() > 0) {
      std::vector<NeighborGraph> tail(
          traj.graphs.begin() + static_cast<std::ptrdiff_t>(traj.steps() / 2),
          traj.graphs.end());
      result.limit = {graph_union(tail), false};
    }
  } else {
    result.limit = limit_graph(*scn.signal, std::max<Time>(steps, 1));
  }

  result.report = detect_consensus(result.trajectory, tolerance);
  result.report.components =
      component_limits(result.trajectory, result.limit.graph, tolerance);
  return result;
}

namespace detail {

inline void write_text_file(const std::filesystem::path& file,
                            const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + file.string() + " for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw std::runtime_error("failed while writing " + file.string());
  }
}

// One record per step; consecutive empty graphs collapse to a range line.
inline std::string format_graph_log(const Trajectory& traj) {
  std::string out;
  const std::size_t count = traj.graphs.size();
  std::size_t t = 0;
  while (t < count) {
    if (traj.graphs[t].empty()) {
      std::size_t end = t;
      while (end + 1 < count && traj.graphs[end + 1].empty()) ++end;
      if (end > t) {
        out += std::to_string(t) + "-" + std::to_string(end) + ": empty\n";
      } else {
        out += std::to_string(t) + ": empty\n";
      }
      t = end + 1;
      continue;
    }
    out += std::to_string(t) + ":";
    for (const Edge& e : traj.graphs[t].edges()) {
      out += " " + std::to_string(e.a) + "-" + std::to_string(e.b);
    }
    out += "\n";
    ++t;
  }
  return out;
}

}  // namespace detail

// Runs the scenario and writes trajectory.csv, report.json and (opt-in)
// graphs.log under out_dir/<scenario-name>/.
inline RunResult run_scenario(const Scenario& scn,
                              const std::filesystem::path& out_dir,
                              const RunOptions& options = {}) {
  RunResult result = run_scenario_in_memory(scn, options);
  std::filesystem::path dir = out_dir / scn.name;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             ": " + ec.message());
  }
  detail::write_text_file(dir / "trajectory.csv",
                          trajectory_csv(result.trajectory));
  detail::write_text_file(dir / "report.json",
                          report_json(result.report).dump(2) + "\n");
  if (options.graph_log) {
    detail::write_text_file(dir / "graphs.log",
                            detail::format_graph_log(result.trajectory));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Invariant verification over a run
// ---------------------------------------------------------------------------

struct VerifySummary {
  Time steps = 0;
  std::size_t envelope_checks = 0;
  std::size_t envelope_violations = 0;
  std::size_t separation_points = 0;  // steps where a hypothesis held
  std::size_t separation_confirmed = 0;
  std::size_t separation_ambiguous = 0;
  std::size_t separation_violations = 0;
  std::string first_failure;

  bool passed() const {
    return envelope_violations == 0 && separation_violations == 0;
  }
};

inline VerifySummary verify_invariants(const Scenario& scn,
                                       const RunOptions& options = {}) {
  RunResult result = run_scenario_in_memory(scn, options);
  const Trajectory& traj = result.trajectory;
  VerifySummary summary;
  summary.steps = traj.steps();

  EnvelopeSeries env = hull_series(traj);
  for (std::size_t t = 0; t + 1 < env.size(); ++t) {
    ++summary.envelope_checks;
    bool lower_ok = env.lower[t + 1] >= env.lower[t] - 1e-12;
    bool upper_ok = env.upper[t + 1] <= env.upper[t] + 1e-12;
    if (!lower_ok || !upper_ok) {
      ++summary.envelope_violations;
      if (summary.first_failure.empty()) {
        std::ostringstream out;
        out << "envelope not monotone at step " << t;
        summary.first_failure = out.str();
      }
    }
  }

  const int vertex_count =
      scn.mode == Mode::kLeader ? scn.n + 1 : scn.n;
  for (const SeparationCheckSpec& spec : scn.separation_checks) {
    SeparationScenario separation(spec.alpha, spec.beta, spec.gamma,
                                  vertex_count);
    for (Time t = 0; t < traj.steps(); ++t) {
      SeparationVerdict verdict = check_separation_step(
          separation, traj.headings[static_cast<std::size_t>(t)],
          traj.graphs[static_cast<std::size_t>(t)],
          traj.headings[static_cast<std::size_t>(t + 1)]);
      if (verdict.outcome == SeparationOutcome::kHypothesisViolated) continue;
      ++summary.separation_points;
      switch (verdict.outcome) {
        case SeparationOutcome::kConfirmed:
          ++summary.separation_confirmed;
          break;
        case SeparationOutcome::kBoundaryAmbiguous:
          ++summary.separation_ambiguous;
          break;
        case SeparationOutcome::kViolated:
          ++summary.separation_violations;
          if (summary.first_failure.empty()) {
            std::ostringstream out;
            out << "separation claim failed at step " << t << ": "
                << verdict.detail;
            summary.first_failure = out.str();
          }
          break;
        default:
          break;
      }
    }
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Builtin scenario library
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Scenario> make_builtin_scenarios() {
  static constexpr const char* kDocs[] = {
      R"({
        "name": "jlm-periodic",
        "description": "periodic joint connectivity: the union of every 2 consecutive graphs is a connected path, so headings reach consensus",
        "n": 4,
        "mode": "leaderless",
        "initial_headings": [0.0, 0.5, 1.5, 2.5],
        "signal": {"type": "periodic", "period": 2,
                   "phases": [[[1, 2], [3, 4]], [[2, 3]]]},
        "steps": 2000,
        "tolerance": 1e-9
      })",
      R"({
        "name": "jlm-bounded-intervals",
        "description": "bounded non-overlapping connecting intervals with idle gaps between them; still consensus",
        "n": 4,
        "mode": "leaderless",
        "initial_headings": [0.0, 0.5, 1.5, 2.5],
        "signal": {"type": "bounded_intervals", "bound": 3,
                   "schedule": [[[1, 2]], [[2, 3]], [[3, 4]]],
                   "first_start": 2, "stride": 7},
        "steps": 2000,
        "tolerance": 1e-9
      })",
      R"({
        "name": "thm1-sparse-star",
        "description": "star meetings at t = 1, 2, 4, ..., 2048 with unboundedly growing gaps: finally jointly connected without any fixed window, yet consensus",
        "n": 5,
        "mode": "leaderless",
        "initial_headings": [0.0, 0.5, 1.0, 1.5, 1.9],
        "signal": {"type": "sparse", "connect_times": "powers_of_two",
                   "event_graph": "star"},
        "steps": 2050,
        "tolerance": 1e-3,
        "separation_checks": [{"alpha": 0.0, "beta": 0.5, "gamma": 1.9}]
      })",
      R"({
        "name": "remark-two-components",
        "description": "disconnected limit graph with components {1,2} and {3,4}: per-component consensus with distinct limits, no global consensus",
        "n": 4,
        "mode": "leaderless",
        "initial_headings": [0.0, 1.0, 2.0, 3.0],
        "signal": {"type": "constant", "graph": [[1, 2], [3, 4]]},
        "steps": 50,
        "tolerance": 1e-9,
        "separation_checks": [{"alpha": 0.5, "beta": 2.0, "gamma": 3.0}]
      })",
      R"({
        "name": "leader-star",
        "description": "leader 0 anchored to agent 1 with a follower path: every follower converges to the leader's fixed heading",
        "n": 4,
        "mode": "leader",
        "theta0": 0.0,
        "initial_headings": [0.5, 1.0, 1.5, 2.0],
        "signal": {"type": "constant",
                   "graph": [[0, 1], [1, 2], [2, 3], [3, 4]]},
        "steps": 10000,
        "tolerance": 1e-6
      })",
      R"({
        "name": "geometric-basic",
        "description": "closed-loop geometric neighborhoods: equal initial headings keep the neighbor graph fixed and the flock moves in formation",
        "n": 4,
        "mode": "leaderless",
        "initial_headings": [0.7853981633974483, 0.7853981633974483,
                              0.7853981633974483, 0.7853981633974483],
        "signal": {"type": "geometric"},
        "steps": 100,
        "tolerance": 1e-9,
        "geometry": {"r": 1.5, "v": 0.25, "neighborhood": "closed",
                     "initial_positions": [[0, 0], [1, 0], [2, 0], [3, 0]]}
      })",
  };
  std::vector<Scenario> scenarios;
  for (const char* doc : kDocs) {
    scenarios.push_back(parse_scenario_text(doc, "builtin"));
  }
  return scenarios;
}

}  // namespace detail

inline const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> scenarios =
      detail::make_builtin_scenarios();
  return scenarios;
}

inline const Scenario* find_builtin(std::string_view name) {
  for (const Scenario& scn : builtin_scenarios()) {
    if (scn.name == name) return &scn;
  }
  return nullptr;
}

}  // namespace vicsek
