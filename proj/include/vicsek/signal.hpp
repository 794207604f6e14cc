#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vicsek/graph.hpp"
#include "vicsek/stream.hpp"

namespace vicsek {

// What a finite trace prescribes beyond its recorded length.
enum class TailPolicy { kHoldLast, kCycle, kEmpty };

enum class NeighborhoodKind { kClosed, kOpen };

enum class FjcVerdict { kProvenYes, kProvenNo, kUnknownAtHorizon };

inline std::string to_string(FjcVerdict v) {
  switch (v) {
    case FjcVerdict::kProvenYes: return "ProvenYes";
    case FjcVerdict::kProvenNo: return "ProvenNo";
    case FjcVerdict::kUnknownAtHorizon: return "UnknownAtHorizon";
  }
  return "UnknownAtHorizon";
}

struct TraceSignal {
  std::vector<NeighborGraph> graphs;
  TailPolicy tail = TailPolicy::kEmpty;
};

struct ConstantSignal {
  NeighborGraph graph;
};

struct PeriodicSignal {
  std::vector<NeighborGraph> phases;
  bool union_connected = false;
};

struct SparseEventsSignal {
  // nullopt = the powers-of-two schedule t in {1, 2, 4, 8, ...}; otherwise an
  // explicit strictly increasing (finite) list of connect times.
  std::optional<std::vector<Time>> times;
  NeighborGraph event_graph;
  NeighborGraph idle_graph;

  bool unbounded() const { return !times.has_value(); }

  bool is_event_time(Time t) const {
    if (!times) return t >= 1 && (t & (t - 1)) == 0;
    const auto& ts = *times;
    return std::binary_search(ts.begin(), ts.end(), t);
  }
};

struct BoundedIntervalsSignal {
  int length_bound = 1;
  std::vector<NeighborGraph> schedule;  // one interval's graphs, reused
  // Either an infinite arithmetic family of interval starts, or an explicit
  // finite list. Outside the intervals the graph is empty.
  std::optional<std::vector<Time>> starts;
  Time first_start = 0;
  Time stride = 1;

  bool unbounded() const { return !starts.has_value(); }

  NeighborGraph idle_graph() const {
    return NeighborGraph::empty_graph(schedule.front().agent_count(),
                                      schedule.front().includes_leader());
  }

  // Offset into the schedule if t falls inside an interval.
  std::optional<Time> interval_offset(Time t) const {
    const Time len = static_cast<Time>(schedule.size());
    if (!starts) {
      if (t < first_start) return std::nullopt;
      Time offset = (t - first_start) % stride;
      return offset < len ? std::optional<Time>(offset) : std::nullopt;
    }
    auto it = std::upper_bound(starts->begin(), starts->end(), t);
    if (it == starts->begin()) return std::nullopt;
    Time start = *(it - 1);
    return t - start < len ? std::optional<Time>(t - start) : std::nullopt;
  }
};

struct RandomSignal {
  int agent_count = 1;
  bool includes_leader = false;
  std::uint64_t seed = 0;
  double edge_probability = 0.0;
};

// Marker variant: geometric graphs are derived from agent positions inside
// the simulation loop, so the signal only carries the radius and the
// open/closed choice.
struct GeometricSignal {
  int agent_count = 1;
  bool includes_leader = false;
  double radius = 1.0;
  NeighborhoodKind kind = NeighborhoodKind::kClosed;
};

struct LimitGraphResult {
  NeighborGraph graph;
  bool exact = false;
};

class SwitchingSignal;
LimitGraphResult limit_graph(const SwitchingSignal& sig, Time horizon);
FjcVerdict verify_finally_jointly_connected(const SwitchingSignal& sig,
                                            Time horizon);

// A total function from discrete time to neighbor-graphs, realized as a
// closed family of generators plus explicit traces. Immutable; at() is pure.
class SwitchingSignal {
 public:
  using Variant =
      std::variant<TraceSignal, ConstantSignal, PeriodicSignal,
                   SparseEventsSignal, BoundedIntervalsSignal, RandomSignal,
                   GeometricSignal>;

  static SwitchingSignal constant(NeighborGraph g) {
    return SwitchingSignal(ConstantSignal{std::move(g)});
  }

  static SwitchingSignal trace(std::vector<NeighborGraph> graphs,
                               TailPolicy tail) {
    if (graphs.empty()) {
      throw std::invalid_argument("trace signal needs at least one graph");
    }
    for (const NeighborGraph& g : graphs) {
      if (!g.same_vertex_set(graphs.front())) {
        throw std::invalid_argument("trace graphs have mismatched vertex sets");
      }
    }
    return SwitchingSignal(TraceSignal{std::move(graphs), tail});
  }

  // sig(t) = phases[t mod period]; reports whether the period-union is
  // connected, since that is the property the generator exists to realize.
  static SwitchingSignal periodic(Time period,
                                  std::vector<NeighborGraph> phases) {
    if (period < 1) throw std::invalid_argument("period must be >= 1");
    if (static_cast<Time>(phases.size()) != period) {
      throw std::invalid_argument(
          "periodic signal needs exactly one graph per phase: period " +
          std::to_string(period) + ", got " + std::to_string(phases.size()));
    }
    for (const NeighborGraph& g : phases) {
      if (!g.same_vertex_set(phases.front())) {
        throw std::invalid_argument(
            "periodic phases have mismatched vertex sets");
      }
    }
    bool connected = is_connected(graph_union(phases));
    return SwitchingSignal(PeriodicSignal{std::move(phases), connected});
  }

  static SwitchingSignal sparse_powers_of_two(
      NeighborGraph event_graph, std::optional<NeighborGraph> idle = {}) {
    return sparse(std::nullopt, std::move(event_graph), std::move(idle));
  }

  static SwitchingSignal sparse_at_times(
      std::vector<Time> times, NeighborGraph event_graph,
      std::optional<NeighborGraph> idle = {}) {
    return sparse(std::move(times), std::move(event_graph), std::move(idle));
  }

  static SwitchingSignal bounded_intervals(int length_bound,
                                           std::vector<NeighborGraph> schedule,
                                           Time first_start, Time stride) {
    BoundedIntervalsSignal s;
    s.length_bound = length_bound;
    s.schedule = std::move(schedule);
    s.first_start = first_start;
    s.stride = stride;
    validate_intervals(s);
    if (first_start < 0) throw std::invalid_argument("first_start must be >= 0");
    if (stride < static_cast<Time>(s.schedule.size())) {
      throw std::invalid_argument("stride shorter than the interval length");
    }
    return SwitchingSignal(std::move(s));
  }

  static SwitchingSignal bounded_intervals_at(
      int length_bound, std::vector<NeighborGraph> schedule,
      std::vector<Time> starts) {
    BoundedIntervalsSignal s;
    s.length_bound = length_bound;
    s.schedule = std::move(schedule);
    validate_intervals(s);
    if (starts.empty()) {
      throw std::invalid_argument("explicit interval starts must be nonempty");
    }
    const Time len = static_cast<Time>(s.schedule.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
      if (starts[k] < 0) throw std::invalid_argument("interval start < 0");
      if (k > 0 && starts[k] - starts[k - 1] < len) {
        throw std::invalid_argument("intervals overlap");
      }
    }
    s.starts = std::move(starts);
    SwitchingSignal sig{Variant(std::move(s))};
    sig.note_ =
        "finite interval list: the limit graph is empty, not the "
        "interval union";
    return sig;
  }

  static SwitchingSignal random(int agent_count, std::uint64_t seed,
                                double edge_probability,
                                bool includes_leader = false) {
    if (agent_count < 1) throw std::invalid_argument("agent count must be >= 1");
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
      throw std::invalid_argument("edge probability outside [0,1]");
    }
    return SwitchingSignal(
        RandomSignal{agent_count, includes_leader, seed, edge_probability});
  }

  static SwitchingSignal geometric(int agent_count, double radius,
                                   NeighborhoodKind kind,
                                   bool includes_leader = false) {
    if (agent_count < 1) throw std::invalid_argument("agent count must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
    return SwitchingSignal(
        GeometricSignal{agent_count, includes_leader, radius, kind});
  }

  int agent_count() const {
    return std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, TraceSignal>) {
            return s.graphs.front().agent_count();
          } else if constexpr (std::is_same_v<T, ConstantSignal>) {
            return s.graph.agent_count();
          } else if constexpr (std::is_same_v<T, PeriodicSignal>) {
            return s.phases.front().agent_count();
          } else if constexpr (std::is_same_v<T, SparseEventsSignal>) {
            return s.event_graph.agent_count();
          } else if constexpr (std::is_same_v<T, BoundedIntervalsSignal>) {
            return s.schedule.front().agent_count();
          } else {
            return s.agent_count;
          }
        },
        v_);
  }

  bool includes_leader() const {
    return std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, TraceSignal>) {
            return s.graphs.front().includes_leader();
          } else if constexpr (std::is_same_v<T, ConstantSignal>) {
            return s.graph.includes_leader();
          } else if constexpr (std::is_same_v<T, PeriodicSignal>) {
            return s.phases.front().includes_leader();
          } else if constexpr (std::is_same_v<T, SparseEventsSignal>) {
            return s.event_graph.includes_leader();
          } else if constexpr (std::is_same_v<T, BoundedIntervalsSignal>) {
            return s.schedule.front().includes_leader();
          } else {
            return s.includes_leader;
          }
        },
        v_);
  }

  bool is_geometric() const {
    return std::holds_alternative<GeometricSignal>(v_);
  }

  const GeometricSignal* geometric_params() const {
    return std::get_if<GeometricSignal>(&v_);
  }

  std::optional<bool> periodic_union_connected() const {
    if (const auto* p = std::get_if<PeriodicSignal>(&v_)) {
      return p->union_connected;
    }
    return std::nullopt;
  }

  // Construction-time warning, e.g. a finite sparse schedule whose limit
  // graph degenerates to the idle graph.
  const std::optional<std::string>& construction_note() const { return note_; }

  NeighborGraph at(Time t) const {
    if (t < 0) throw std::invalid_argument("signal time must be >= 0");
    return std::visit(
        [t](const auto& s) -> NeighborGraph {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, TraceSignal>) {
            const Time len = static_cast<Time>(s.graphs.size());
            if (t < len) return s.graphs[static_cast<std::size_t>(t)];
            switch (s.tail) {
              case TailPolicy::kHoldLast: return s.graphs.back();
              case TailPolicy::kCycle:
                return s.graphs[static_cast<std::size_t>(t % len)];
              case TailPolicy::kEmpty:
                return NeighborGraph::empty_graph(
                    s.graphs.front().agent_count(),
                    s.graphs.front().includes_leader());
            }
            throw std::logic_error("unreachable tail policy");
          } else if constexpr (std::is_same_v<T, ConstantSignal>) {
            return s.graph;
          } else if constexpr (std::is_same_v<T, PeriodicSignal>) {
            const Time period = static_cast<Time>(s.phases.size());
            return s.phases[static_cast<std::size_t>(t % period)];
          } else if constexpr (std::is_same_v<T, SparseEventsSignal>) {
            return s.is_event_time(t) ? s.event_graph : s.idle_graph;
          } else if constexpr (std::is_same_v<T, BoundedIntervalsSignal>) {
            auto offset = s.interval_offset(t);
            return offset ? s.schedule[static_cast<std::size_t>(*offset)]
                          : s.idle_graph();
          } else if constexpr (std::is_same_v<T, RandomSignal>) {
            std::vector<Edge> edges;
            const Vertex first = s.includes_leader ? 0 : 1;
            for (Vertex i = first; i <= s.agent_count; ++i) {
              for (Vertex j = i + 1; j <= s.agent_count; ++j) {
                double u = keyed_unit(s.seed, kEdgeStream,
                                      static_cast<std::uint64_t>(t),
                                      static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j));
                if (u < s.edge_probability) edges.push_back({i, j});
              }
            }
            return NeighborGraph(s.agent_count, std::move(edges),
                                 s.includes_leader);
          } else {
            throw std::invalid_argument(
                "geometric signal graphs come from positions during "
                "simulation; at() has no standalone value");
          }
        },
        v_);
  }

  std::string describe() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          std::ostringstream out;
          if constexpr (std::is_same_v<T, TraceSignal>) {
            out << "trace(" << s.graphs.size() << " graphs, tail=";
            switch (s.tail) {
              case TailPolicy::kHoldLast: out << "hold-last"; break;
              case TailPolicy::kCycle: out << "cycle"; break;
              case TailPolicy::kEmpty: out << "empty"; break;
            }
            out << ")";
          } else if constexpr (std::is_same_v<T, ConstantSignal>) {
            out << "constant(" << s.graph.edge_count() << " edges)";
          } else if constexpr (std::is_same_v<T, PeriodicSignal>) {
            out << "periodic(T=" << s.phases.size() << ", union "
                << (s.union_connected ? "connected" : "disconnected") << ")";
          } else if constexpr (std::is_same_v<T, SparseEventsSignal>) {
            out << "sparse(";
            if (s.unbounded()) {
              out << "powers_of_two";
            } else {
              out << s.times->size() << " times";
            }
            out << ", event " << s.event_graph.edge_count() << " edges, idle "
                << s.idle_graph.edge_count() << " edges)";
          } else if constexpr (std::is_same_v<T, BoundedIntervalsSignal>) {
            out << "bounded_intervals(B=" << s.length_bound << ", len "
                << s.schedule.size() << ", ";
            if (s.unbounded()) {
              out << "start " << s.first_start << " stride " << s.stride;
            } else {
              out << s.starts->size() << " starts";
            }
            out << ")";
          } else if constexpr (std::is_same_v<T, RandomSignal>) {
            out << "random(seed=" << s.seed << ", p=" << s.edge_probability
                << ")";
          } else {
            out << "geometric(r=" << s.radius << ", "
                << (s.kind == NeighborhoodKind::kClosed ? "closed" : "open")
                << ")";
          }
          return out.str();
        },
        v_);
  }

 private:
  explicit SwitchingSignal(Variant v) : v_(std::move(v)) {}

  static SwitchingSignal sparse(std::optional<std::vector<Time>> times,
                                NeighborGraph event_graph,
                                std::optional<NeighborGraph> idle) {
    if (!is_connected(event_graph)) {
      throw std::invalid_argument(
          "sparse event graph must be connected; the generator exists to "
          "realize joint connectivity");
    }
    NeighborGraph idle_graph =
        idle ? std::move(*idle)
             : NeighborGraph::empty_graph(event_graph.agent_count(),
                                          event_graph.includes_leader());
    if (!idle_graph.same_vertex_set(event_graph)) {
      throw std::invalid_argument(
          "sparse idle graph has a different vertex set");
    }
    bool finite = times.has_value();
    if (times) {
      for (std::size_t k = 0; k < times->size(); ++k) {
        if ((*times)[k] < 0) {
          throw std::invalid_argument("connect times must be >= 0");
        }
        if (k > 0 && (*times)[k] <= (*times)[k - 1]) {
          throw std::invalid_argument(
              "connect times must be strictly increasing");
        }
      }
    }
    SwitchingSignal sig{Variant(SparseEventsSignal{
        std::move(times), std::move(event_graph), std::move(idle_graph)})};
    if (finite) {
      sig.note_ =
          "finite connect-time list: the limit graph equals the idle graph";
    }
    return sig;
  }

  static void validate_intervals(const BoundedIntervalsSignal& s) {
    if (s.length_bound < 1) {
      throw std::invalid_argument("interval length bound must be >= 1");
    }
    if (s.schedule.empty()) {
      throw std::invalid_argument("interval schedule must be nonempty");
    }
    if (static_cast<int>(s.schedule.size()) > s.length_bound) {
      throw std::invalid_argument("interval longer than the stated bound");
    }
    for (const NeighborGraph& g : s.schedule) {
      if (!g.same_vertex_set(s.schedule.front())) {
        throw std::invalid_argument(
            "interval schedule graphs have mismatched vertex sets");
      }
    }
    if (!is_connected(graph_union(s.schedule))) {
      throw std::invalid_argument(
          "interval schedule union must be connected");
    }
  }

  friend LimitGraphResult limit_graph(const SwitchingSignal&, Time);
  friend FjcVerdict verify_finally_jointly_connected(const SwitchingSignal&,
                                                     Time);

  Variant v_;
  std::optional<std::string> note_;
};

// Union of sig(t) for t in [from, to_exclusive).
inline NeighborGraph window_union(const SwitchingSignal& sig, Time from,
                                  Time to_exclusive) {
  if (from < 0 || from >= to_exclusive) {
    throw std::invalid_argument("window [" + std::to_string(from) + "," +
                                std::to_string(to_exclusive) +
                                ") is not a valid time range");
  }
  std::vector<NeighborGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(to_exclusive - from));
  for (Time t = from; t < to_exclusive; ++t) graphs.push_back(sig.at(t));
  return graph_union(graphs);
}

// The graph of edges that recur at arbitrarily late times. Exact for
// generators whose recurring edge set is known analytically; for traces and
// mid-range random signals it degrades to the union over [horizon/2, horizon)
// with an explicit approximate flag.
inline LimitGraphResult limit_graph(const SwitchingSignal& sig, Time horizon) {
  if (horizon <= 0) throw std::invalid_argument("horizon must be > 0");
  const auto& v = sig.v_;
  if (const auto* c = std::get_if<ConstantSignal>(&v)) {
    return {c->graph, true};
  }
  if (const auto* p = std::get_if<PeriodicSignal>(&v)) {
    return {graph_union(p->phases), true};
  }
  if (const auto* s = std::get_if<SparseEventsSignal>(&v)) {
    if (s->unbounded()) {
      return {graph_union(s->event_graph, s->idle_graph), true};
    }
    return {s->idle_graph, true};
  }
  if (const auto* b = std::get_if<BoundedIntervalsSignal>(&v)) {
    if (b->unbounded()) return {graph_union(b->schedule), true};
    return {b->idle_graph(), true};
  }
  if (const auto* r = std::get_if<RandomSignal>(&v)) {
    if (r->edge_probability == 0.0) {
      return {NeighborGraph::empty_graph(r->agent_count, r->includes_leader),
              true};
    }
    if (r->edge_probability == 1.0) {
      return {NeighborGraph::complete(r->agent_count, r->includes_leader),
              true};
    }
    Time from = horizon / 2;
    if (from >= horizon) from = horizon - 1;
    return {window_union(sig, from, horizon), false};
  }
  if (std::holds_alternative<TraceSignal>(v)) {
    Time from = horizon / 2;
    if (from >= horizon) from = horizon - 1;
    return {window_union(sig, from, horizon), false};
  }
  throw std::invalid_argument(
      "geometric signals have no standalone limit graph; take the union of "
      "the graphs a simulation actually used");
}

// Decides "is sigma(infinity) connected" where that is analytically possible.
inline FjcVerdict verify_finally_jointly_connected(const SwitchingSignal& sig,
                                                   Time horizon) {
  if (horizon <= 0) throw std::invalid_argument("horizon must be > 0");
  const auto& v = sig.v_;
  if (std::holds_alternative<GeometricSignal>(v)) {
    return FjcVerdict::kUnknownAtHorizon;
  }
  if (const auto* r = std::get_if<RandomSignal>(&v)) {
    if (r->edge_probability > 0.0 && r->edge_probability < 1.0) {
      return FjcVerdict::kUnknownAtHorizon;
    }
  }
  if (const auto* t = std::get_if<TraceSignal>(&v)) {
    // The declared tail policy pins the recurring edge set of a trace.
    switch (t->tail) {
      case TailPolicy::kEmpty: {
        NeighborGraph limit = NeighborGraph::empty_graph(
            t->graphs.front().agent_count(),
            t->graphs.front().includes_leader());
        return is_connected(limit) ? FjcVerdict::kProvenYes
                                   : FjcVerdict::kProvenNo;
      }
      case TailPolicy::kHoldLast:
        return is_connected(t->graphs.back()) ? FjcVerdict::kProvenYes
                                              : FjcVerdict::kProvenNo;
      case TailPolicy::kCycle:
        return is_connected(graph_union(t->graphs)) ? FjcVerdict::kProvenYes
                                                    : FjcVerdict::kProvenNo;
    }
  }
  LimitGraphResult limit = limit_graph(sig, horizon);
  if (!limit.exact) return FjcVerdict::kUnknownAtHorizon;
  return is_connected(limit.graph) ? FjcVerdict::kProvenYes
                                   : FjcVerdict::kProvenNo;
}

}  // namespace vicsek
