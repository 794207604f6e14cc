#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vicsek/graph.hpp"
#include "vicsek/signal.hpp"

namespace vicsek {

// Heading vector aligned with a graph's vertex set: slot v - first_vertex()
// holds vertex v. In leader mode slot 0 is the leader.
class HeadingState {
 public:
  explicit HeadingState(std::vector<double> values,
                        bool includes_leader = false)
      : values_(std::move(values)), leader_(includes_leader) {
    const int min_size = leader_ ? 2 : 1;
    if (static_cast<int>(values_.size()) < min_size) {
      throw std::invalid_argument("heading state needs at least one agent");
    }
  }

  bool includes_leader() const { return leader_; }
  Vertex first_vertex() const { return leader_ ? 0 : 1; }
  int agent_count() const {
    return static_cast<int>(values_.size()) - (leader_ ? 1 : 0);
  }
  int size() const { return static_cast<int>(values_.size()); }

  double at_vertex(Vertex v) const {
    if (v < first_vertex() || v > agent_count()) {
      throw std::invalid_argument("unknown vertex " + std::to_string(v));
    }
    return values_[static_cast<std::size_t>(v - first_vertex())];
  }

  std::span<const double> values() const { return values_; }

  bool aligned_with(const NeighborGraph& g) const {
    return leader_ == g.includes_leader() && agent_count() == g.agent_count();
  }

  friend bool operator==(const HeadingState&, const HeadingState&) = default;

 private:
  std::vector<double> values_;
  bool leader_;
};

struct LeaderConfig {
  double theta0 = 0.0;
};

// Positions plus the geometric-model parameters r, v and the neighborhood
// kind. Aligned with the same vertex numbering as HeadingState.
class PlanarState {
 public:
  PlanarState(std::vector<std::array<double, 2>> positions, double speed,
              double radius, NeighborhoodKind kind = NeighborhoodKind::kClosed,
              bool includes_leader = false,
              std::vector<double> per_vertex_speeds = {})
      : positions_(std::move(positions)),
        speed_(speed),
        radius_(radius),
        kind_(kind),
        leader_(includes_leader),
        per_vertex_speeds_(std::move(per_vertex_speeds)) {
    if (positions_.empty()) {
      throw std::invalid_argument("planar state needs at least one agent");
    }
    if (!(speed_ > 0.0)) throw std::invalid_argument("speed must be > 0");
    if (!(radius_ > 0.0)) throw std::invalid_argument("radius must be > 0");
    if (!per_vertex_speeds_.empty() &&
        per_vertex_speeds_.size() != positions_.size()) {
      throw std::invalid_argument(
          "per-vertex speed list must match the position count");
    }
    for (double s : per_vertex_speeds_) {
      if (!(s > 0.0)) throw std::invalid_argument("speeds must be > 0");
    }
  }

  bool includes_leader() const { return leader_; }
  Vertex first_vertex() const { return leader_ ? 0 : 1; }
  int agent_count() const {
    return static_cast<int>(positions_.size()) - (leader_ ? 1 : 0);
  }
  int size() const { return static_cast<int>(positions_.size()); }

  const std::vector<std::array<double, 2>>& positions() const {
    return positions_;
  }
  double speed() const { return speed_; }
  double speed_of(std::size_t slot) const {
    return per_vertex_speeds_.empty() ? speed_ : per_vertex_speeds_[slot];
  }
  double radius() const { return radius_; }
  NeighborhoodKind neighborhood() const { return kind_; }

  PlanarState with_positions(std::vector<std::array<double, 2>> p) const {
    PlanarState out = *this;
    if (p.size() != positions_.size()) {
      throw std::invalid_argument("position count changed");
    }
    out.positions_ = std::move(p);
    return out;
  }

 private:
  std::vector<std::array<double, 2>> positions_;
  double speed_;
  double radius_;
  NeighborhoodKind kind_;
  bool leader_;
  std::vector<double> per_vertex_speeds_;
};

namespace detail {

// Average of an agent's own heading and its neighbors', written as an offset
// sum with the offsets added smallest-first. The result then depends only on
// the multiset of neighbor values: consensus states are exact fixed points
// and relabeling agents cannot change the arithmetic.
template <typename ValueOf>
double averaged_heading(double own, const std::vector<Vertex>& nbrs,
                        ValueOf&& value_of) {
  if (nbrs.empty()) return own;
  std::vector<double> offsets;
  offsets.reserve(nbrs.size());
  for (Vertex j : nbrs) offsets.push_back(value_of(j) - own);
  std::sort(offsets.begin(), offsets.end());
  double sum = 0.0;
  for (double d : offsets) sum += d;
  return own + sum / (1.0 + static_cast<double>(nbrs.size()));
}

}  // namespace detail

// One synchronous application of the nearest-neighbor averaging rule.
inline HeadingState step_headings(const HeadingState& state,
                                  const NeighborGraph& g) {
  if (state.includes_leader() || g.includes_leader()) {
    throw std::invalid_argument(
        "step_headings is the leaderless rule; use step_headings_leader");
  }
  if (!state.aligned_with(g)) {
    throw std::invalid_argument("heading state and graph disagree on n");
  }
  std::vector<double> next(static_cast<std::size_t>(state.size()));
  for (Vertex i = 1; i <= state.agent_count(); ++i) {
    next[static_cast<std::size_t>(i - 1)] = detail::averaged_heading(
        state.at_vertex(i), g.neighbors(i),
        [&state](Vertex j) { return state.at_vertex(j); });
  }
  return HeadingState(std::move(next), false);
}

// Leader-following rule: followers average as usual, with the leader's fixed
// heading standing in for vertex 0; the leader slot stays theta0 exactly.
inline HeadingState step_headings_leader(const HeadingState& state,
                                         const LeaderConfig& leader,
                                         const NeighborGraph& g) {
  if (!state.includes_leader() || !g.includes_leader()) {
    throw std::invalid_argument(
        "leader rule needs a leader slot in both state and graph");
  }
  if (!state.aligned_with(g)) {
    throw std::invalid_argument("heading state and graph disagree on n");
  }
  auto value_of = [&](Vertex j) {
    return j == 0 ? leader.theta0 : state.at_vertex(j);
  };
  std::vector<double> next(static_cast<std::size_t>(state.size()));
  next[0] = leader.theta0;
  for (Vertex i = 1; i <= state.agent_count(); ++i) {
    next[static_cast<std::size_t>(i)] =
        detail::averaged_heading(state.at_vertex(i), g.neighbors(i), value_of);
  }
  return HeadingState(std::move(next), true);
}

// Advance every position by its speed along the current heading.
inline PlanarState step_positions(const PlanarState& planar,
                                  const HeadingState& state) {
  if (planar.size() != state.size() ||
      planar.includes_leader() != state.includes_leader()) {
    throw std::invalid_argument("planar state and heading state disagree");
  }
  std::vector<std::array<double, 2>> next = planar.positions();
  for (std::size_t k = 0; k < next.size(); ++k) {
    double theta = state.values()[k];
    double v = planar.speed_of(k);
    next[k][0] += v * std::cos(theta);
    next[k][1] += v * std::sin(theta);
  }
  return planar.with_positions(std::move(next));
}

// Edge (i, j) iff the Euclidean distance is <= r (closed) or < r (open).
inline NeighborGraph geometric_neighbors(const PlanarState& planar) {
  const auto& pos = planar.positions();
  const double r_sq = planar.radius() * planar.radius();
  const Vertex first = planar.first_vertex();
  std::vector<Edge> edges;
  for (Vertex i = first; i <= planar.agent_count(); ++i) {
    for (Vertex j = i + 1; j <= planar.agent_count(); ++j) {
      const auto& pi = pos[static_cast<std::size_t>(i - first)];
      const auto& pj = pos[static_cast<std::size_t>(j - first)];
      double dx = pi[0] - pj[0];
      double dy = pi[1] - pj[1];
      double d_sq = dx * dx + dy * dy;
      bool adjacent = planar.neighborhood() == NeighborhoodKind::kClosed
                          ? d_sq <= r_sq
                          : d_sq < r_sq;
      if (adjacent) edges.push_back({i, j});
    }
  }
  return NeighborGraph(planar.agent_count(), std::move(edges),
                       planar.includes_leader());
}

enum class Mode { kLeaderless, kLeader };

// Full record of one run: headings at t = 0..T, the graph actually used at
// each step, positions when the run carried them, and run metadata.
struct Trajectory {
  Mode mode = Mode::kLeaderless;
  int agent_count = 0;
  std::optional<double> theta0;
  std::vector<HeadingState> headings;
  std::vector<NeighborGraph> graphs;
  std::vector<std::vector<std::array<double, 2>>> positions;
  std::string signal_description;

  Time steps() const { return static_cast<Time>(graphs.size()); }

  const HeadingState& initial() const { return headings.front(); }
  const HeadingState& final_state() const { return headings.back(); }
};

inline Trajectory simulate(Mode mode, const HeadingState& initial,
                           const std::optional<LeaderConfig>& leader,
                           const SwitchingSignal& sig, Time steps,
                           std::optional<PlanarState> planar = {}) {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  const bool leader_mode = mode == Mode::kLeader;
  if (leader_mode && !leader) {
    throw std::invalid_argument("leader mode needs a LeaderConfig");
  }
  if (!leader_mode && leader) {
    throw std::invalid_argument("leaderless mode got a LeaderConfig");
  }
  if (initial.includes_leader() != leader_mode) {
    throw std::invalid_argument("heading state shape does not match the mode");
  }
  if (sig.includes_leader() != leader_mode ||
      sig.agent_count() != initial.agent_count()) {
    throw std::invalid_argument("signal vertex set does not match the state");
  }
  if (sig.is_geometric() && !planar) {
    throw std::invalid_argument("geometric signal requires a planar state");
  }
  if (planar) {
    if (planar->size() != initial.size() ||
        planar->includes_leader() != leader_mode) {
      throw std::invalid_argument("planar state does not match the mode");
    }
    if (sig.is_geometric()) {
      const GeometricSignal* geo = sig.geometric_params();
      if (geo->radius != planar->radius()) {
        throw std::invalid_argument(
            "geometric signal and planar state disagree on the radius");
      }
    }
  }

  HeadingState state = initial;
  if (leader_mode) {
    // The leader slot is theta0 by definition, whatever the caller passed.
    std::vector<double> values(state.values().begin(), state.values().end());
    values[0] = leader->theta0;
    state = HeadingState(std::move(values), true);
  }

  Trajectory traj;
  traj.mode = mode;
  traj.agent_count = initial.agent_count();
  if (leader_mode) traj.theta0 = leader->theta0;
  traj.signal_description = sig.describe();
  traj.headings.reserve(static_cast<std::size_t>(steps) + 1);
  traj.graphs.reserve(static_cast<std::size_t>(steps));
  traj.headings.push_back(state);
  if (planar) traj.positions.push_back(planar->positions());

  for (Time t = 0; t < steps; ++t) {
    NeighborGraph g =
        sig.is_geometric() ? geometric_neighbors(*planar) : sig.at(t);
    traj.graphs.push_back(g);
    HeadingState next = leader_mode ? step_headings_leader(state, *leader, g)
                                    : step_headings(state, g);
    if (planar) {
      planar = step_positions(*planar, state);  // moves along theta(t)
      traj.positions.push_back(planar->positions());
    }
    state = std::move(next);
    traj.headings.push_back(state);
  }
  return traj;
}

// CSV with one row per step; headings carry 17 significant digits so the
// text round-trips to the exact doubles.
inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  const Vertex first = traj.mode == Mode::kLeader ? 0 : 1;
  for (Vertex v = first; v <= traj.agent_count; ++v) {
    out += ",theta_" + std::to_string(v);
  }
  out += "\n";
  char buf[40];
  for (std::size_t t = 0; t < traj.headings.size(); ++t) {
    out += std::to_string(t);
    for (double value : traj.headings[t].values()) {
      std::snprintf(buf, sizeof(buf), ",%.17g", value);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace vicsek
