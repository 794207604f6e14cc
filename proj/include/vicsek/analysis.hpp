#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vicsek/dynamics.hpp"
#include "vicsek/graph.hpp"

namespace vicsek {

// Agents within this distance of an interval endpoint are reported as
// boundary-ambiguous instead of being silently classified.
inline constexpr double kBoundaryTolerance = 1e-12;

// Per-step follower minimum, maximum and spread. The leader is excluded: it
// is constant and convergence statements are about the followers.
struct EnvelopeSeries {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> spread;

  std::size_t size() const { return lower.size(); }
};

inline EnvelopeSeries envelope_series(const Trajectory& traj) {
  if (traj.headings.empty()) {
    throw std::invalid_argument("trajectory has no recorded states");
  }
  EnvelopeSeries env;
  env.lower.reserve(traj.headings.size());
  env.upper.reserve(traj.headings.size());
  env.spread.reserve(traj.headings.size());
  for (const HeadingState& state : traj.headings) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Vertex v = 1; v <= state.agent_count(); ++v) {
      double x = state.at_vertex(v);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    env.lower.push_back(lo);
    env.upper.push_back(hi);
    env.spread.push_back(hi - lo);
  }
  return env;
}

// Min/max over every state slot, leader included. This is the series the
// one-step convex-combination argument makes monotone; in leader mode the
// follower-only envelope can sink toward theta0, the hull cannot.
inline EnvelopeSeries hull_series(const Trajectory& traj) {
  if (traj.headings.empty()) {
    throw std::invalid_argument("trajectory has no recorded states");
  }
  EnvelopeSeries env;
  for (const HeadingState& state : traj.headings) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : state.values()) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    env.lower.push_back(lo);
    env.upper.push_back(hi);
    env.spread.push_back(hi - lo);
  }
  return env;
}

struct EnvelopeCheck {
  bool ok = true;
  Time first_violation = -1;
  std::string detail;
};

// Minimum nondecreasing, maximum nonincreasing, within tolerance.
inline EnvelopeCheck check_envelope_monotone(const EnvelopeSeries& env,
                                             double tolerance = 1e-12) {
  EnvelopeCheck check;
  for (std::size_t t = 0; t + 1 < env.size(); ++t) {
    bool lower_ok = env.lower[t + 1] >= env.lower[t] - tolerance;
    bool upper_ok = env.upper[t + 1] <= env.upper[t] + tolerance;
    if (!lower_ok || !upper_ok) {
      check.ok = false;
      check.first_violation = static_cast<Time>(t);
      std::ostringstream out;
      out << "envelope not monotone at step " << t << " -> " << (t + 1)
          << ": min " << env.lower[t] << " -> " << env.lower[t + 1] << ", max "
          << env.upper[t] << " -> " << env.upper[t + 1];
      check.detail = out.str();
      return check;
    }
  }
  return check;
}

// Consensus report for one vertex group (a connected component of the limit
// graph, or the whole system).
struct ComponentReport {
  std::vector<Vertex> vertices;
  bool converged = false;
  double theta_ss = 0.0;
  std::optional<Time> steps_to_tolerance;
  double m_estimate = 0.0;
  double M_estimate = 0.0;
};

struct ConvergenceReport {
  bool converged = false;
  double theta_ss = 0.0;
  std::optional<Time> steps_to_tolerance;
  double m_estimate = 0.0;
  double M_estimate = 0.0;
  double tolerance = 0.0;
  Time tail_window = 0;  // trailing states with spread within tolerance
  std::vector<ComponentReport> components;
};

namespace detail {

// Spread-based verdict over a chosen set of agents (leader slot excluded):
// converged once the spread reaches tolerance and stays there to the end.
inline ComponentReport consensus_over(const Trajectory& traj,
                                      const std::vector<Vertex>& vertices,
                                      double tolerance) {
  ComponentReport report;
  report.vertices = vertices;
  std::vector<Vertex> followers;
  for (Vertex v : vertices) {
    if (v >= 1) followers.push_back(v);
  }
  if (followers.empty()) {
    // A block holding only the leader: its heading is theta0 at all times.
    report.converged = true;
    report.steps_to_tolerance = 0;
    double theta0 = traj.theta0.value_or(0.0);
    report.theta_ss = theta0;
    report.m_estimate = theta0;
    report.M_estimate = theta0;
    return report;
  }
  const std::size_t len = traj.headings.size();
  Time last_above = -1;
  double final_lo = 0.0, final_hi = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Vertex v : followers) {
      double x = traj.headings[t].at_vertex(v);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi - lo > tolerance) last_above = static_cast<Time>(t);
    if (t + 1 == len) {
      final_lo = lo;
      final_hi = hi;
    }
  }
  report.m_estimate = final_lo;
  report.M_estimate = final_hi;
  report.theta_ss = final_lo + (final_hi - final_lo) / 2.0;
  if (last_above < static_cast<Time>(len) - 1) {
    report.converged = true;
    report.steps_to_tolerance = last_above + 1;
  }
  return report;
}

}  // namespace detail

inline ConvergenceReport detect_consensus(const Trajectory& traj,
                                          double tolerance) {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be > 0");
  }
  std::vector<Vertex> followers;
  for (Vertex v = 1; v <= traj.agent_count; ++v) followers.push_back(v);
  ComponentReport whole = detail::consensus_over(traj, followers, tolerance);
  ConvergenceReport report;
  report.converged = whole.converged;
  report.theta_ss = whole.theta_ss;
  report.steps_to_tolerance = whole.steps_to_tolerance;
  report.m_estimate = whole.m_estimate;
  report.M_estimate = whole.M_estimate;
  report.tolerance = tolerance;
  report.tail_window =
      whole.converged
          ? static_cast<Time>(traj.headings.size()) - *whole.steps_to_tolerance
          : 0;
  return report;
}

// Per-component consensus relative to the limit graph's connected components.
inline std::vector<ComponentReport> component_limits(
    const Trajectory& traj, const NeighborGraph& limit, double tolerance) {
  if (limit.agent_count() != traj.agent_count ||
      limit.includes_leader() != (traj.mode == Mode::kLeader)) {
    throw std::invalid_argument(
        "limit graph vertex set does not match the trajectory");
  }
  std::vector<ComponentReport> reports;
  for (const std::vector<Vertex>& block : connected_components(limit).blocks) {
    reports.push_back(detail::consensus_over(traj, block, tolerance));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Separation-step checker
// ---------------------------------------------------------------------------

// The two-band hypothesis around alpha < beta < gamma, with the bands
// A = V_t(alpha-eps, alpha+eps) and B = V_t(beta-eps, gamma+eps) where
// delta = beta - alpha and eps = delta / n^n.
struct SeparationScenario {
  double alpha;
  double beta;
  double gamma;
  int vertex_count;
  double delta;
  double epsilon;

  SeparationScenario(double a, double b, double c, int n_vertices)
      : alpha(a), beta(b), gamma(c), vertex_count(n_vertices) {
    if (!(a < b && b < c)) {
      throw std::invalid_argument("separation scenario needs alpha<beta<gamma");
    }
    if (n_vertices < 1) {
      throw std::invalid_argument("vertex count must be >= 1");
    }
    delta = beta - alpha;
    double nn = 1.0;
    for (int k = 0; k < n_vertices; ++k) nn *= static_cast<double>(n_vertices);
    epsilon = delta / nn;
  }
};

enum class SeparationOutcome {
  kConfirmed,
  kBoundaryAmbiguous,
  kHypothesisViolated,
  kViolated
};

struct SeparationVerdict {
  SeparationOutcome outcome = SeparationOutcome::kHypothesisViolated;
  bool crossing_edge = false;  // were A and B connected in g_t
  std::vector<Vertex> set_a_before;
  std::vector<Vertex> set_b_before;
  std::vector<Vertex> set_a_after;
  std::vector<Vertex> expected_departures;  // A-agents with a neighbor in B
  std::vector<Vertex> violating;
  std::vector<Vertex> boundary_ambiguous;
  std::string detail;
};

namespace detail {

inline bool strictly_inside(double x, double lo, double hi) {
  return x > lo && x < hi;
}

inline bool near_boundary(double x, double lo, double hi) {
  return std::abs(x - lo) <= kBoundaryTolerance ||
         std::abs(x - hi) <= kBoundaryTolerance;
}

inline std::vector<Vertex> band_members(const HeadingState& state,
                                        const NeighborGraph& g, double lo,
                                        double hi) {
  std::vector<Vertex> out;
  for (Vertex v : g.vertices()) {
    if (strictly_inside(state.at_vertex(v), lo, hi)) out.push_back(v);
  }
  return out;
}

inline bool is_member(const std::vector<Vertex>& sorted_set, Vertex v) {
  return std::binary_search(sorted_set.begin(), sorted_set.end(), v);
}

}  // namespace detail

// Checks the one-step separation dichotomy against the actual next state:
// with no A-B crossing edge both bands are fixed; with a crossing edge the
// A-agents touching B depart and everything outside the new A-band lands
// strictly above alpha + delta/n - eps.
inline SeparationVerdict check_separation_step(const SeparationScenario& scn,
                                               const HeadingState& state_t,
                                               const NeighborGraph& g_t,
                                               const HeadingState& state_t1) {
  if (g_t.vertex_count() != scn.vertex_count) {
    throw std::invalid_argument("scenario vertex count does not match graph");
  }
  SeparationVerdict verdict;
  const double a_lo = scn.alpha - scn.epsilon;
  const double a_hi = scn.alpha + scn.epsilon;
  const double b_lo = scn.beta - scn.epsilon;
  const double b_hi = scn.gamma + scn.epsilon;

  auto note_ambiguous = [&](const HeadingState& s, Vertex v) {
    double x = s.at_vertex(v);
    if (detail::near_boundary(x, a_lo, a_hi) ||
        detail::near_boundary(x, b_lo, b_hi)) {
      if (!detail::is_member(verdict.boundary_ambiguous, v)) {
        verdict.boundary_ambiguous.insert(
            std::upper_bound(verdict.boundary_ambiguous.begin(),
                             verdict.boundary_ambiguous.end(), v),
            v);
      }
      return true;
    }
    return false;
  };

  verdict.set_a_before = detail::band_members(state_t, g_t, a_lo, a_hi);
  verdict.set_b_before = detail::band_members(state_t, g_t, b_lo, b_hi);
  const auto& set_a = verdict.set_a_before;
  const auto& set_b = verdict.set_b_before;

  // Hypothesis: both bands nonempty and together they exhaust the vertex set.
  bool hypothesis_ok = !set_a.empty() && !set_b.empty();
  for (Vertex v : g_t.vertices()) {
    bool in_a = detail::is_member(set_a, v);
    bool in_b = detail::is_member(set_b, v);
    if (in_a == in_b) {  // outside both, or (degenerately) inside both
      hypothesis_ok = false;
      note_ambiguous(state_t, v);
    }
  }
  if (!hypothesis_ok) {
    verdict.outcome = SeparationOutcome::kHypothesisViolated;
    verdict.detail = "hypothesis not satisfied at time t; nothing checked";
    return verdict;
  }

  for (Vertex v : g_t.vertices()) note_ambiguous(state_t, v);

  // Branch on whether A and B are connected in g_t.
  std::vector<Vertex> departures;
  for (Vertex i : set_a) {
    for (Vertex j : g_t.neighbors(i)) {
      if (detail::is_member(set_b, j)) {
        departures.push_back(i);
        break;
      }
    }
  }
  verdict.crossing_edge = !departures.empty();
  verdict.expected_departures = departures;

  std::vector<Vertex> actual_a = detail::band_members(state_t1, g_t, a_lo, a_hi);
  verdict.set_a_after = actual_a;

  auto flag_mismatch = [&](Vertex v, const std::string& what) {
    if (note_ambiguous(state_t1, v) || note_ambiguous(state_t, v)) return;
    verdict.violating.push_back(v);
    if (verdict.detail.empty()) {
      verdict.detail = "agent " + std::to_string(v) + ": " + what;
    }
  };

  if (!verdict.crossing_edge) {
    // Claim (1): both bands are identical at t+1.
    std::vector<Vertex> actual_b =
        detail::band_members(state_t1, g_t, b_lo, b_hi);
    for (Vertex v : g_t.vertices()) {
      bool before = detail::is_member(set_a, v);
      bool after = detail::is_member(actual_a, v);
      if (before != after) flag_mismatch(v, "A-band changed without contact");
      bool b_before = detail::is_member(set_b, v);
      bool b_after = detail::is_member(actual_b, v);
      if (b_before != b_after) {
        flag_mismatch(v, "B-band changed without contact");
      }
    }
  } else {
    // Claim (2): exactly the A-agents with a B-neighbor depart, and the
    // complement of the new A-band sits in (alpha + delta/n - eps, gamma+eps).
    const double lifted_lo =
        scn.alpha + scn.delta / static_cast<double>(scn.vertex_count) -
        scn.epsilon;
    for (Vertex v : g_t.vertices()) {
      bool expected_in_a = detail::is_member(set_a, v) &&
                           !detail::is_member(departures, v);
      bool actually_in_a = detail::is_member(actual_a, v);
      if (expected_in_a != actually_in_a) {
        flag_mismatch(v, expected_in_a ? "left the A-band unexpectedly"
                                       : "stayed in the A-band after contact");
      }
      double x_next = state_t1.at_vertex(v);
      bool in_lifted = detail::strictly_inside(x_next, lifted_lo, b_hi);
      if (actually_in_a == in_lifted) {
        if (detail::near_boundary(x_next, lifted_lo, b_hi)) {
          note_ambiguous(state_t1, v);
          if (!detail::is_member(verdict.boundary_ambiguous, v)) {
            verdict.boundary_ambiguous.insert(
                std::upper_bound(verdict.boundary_ambiguous.begin(),
                                 verdict.boundary_ambiguous.end(), v),
                v);
          }
        } else {
          flag_mismatch(v, actually_in_a
                               ? "A-band member also in the lifted band"
                               : "outside the lifted band at t+1");
        }
      }
    }
  }

  if (!verdict.violating.empty()) {
    verdict.outcome = SeparationOutcome::kViolated;
  } else if (!verdict.boundary_ambiguous.empty()) {
    verdict.outcome = SeparationOutcome::kBoundaryAmbiguous;
    verdict.detail = "set membership within 1e-12 of a band boundary";
  } else {
    verdict.outcome = SeparationOutcome::kConfirmed;
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Tail accumulation-bound estimates
// ---------------------------------------------------------------------------

// Finite-horizon stand-ins for the per-agent accumulation bounds: min and max
// of each agent's headings over the trailing window, plus their aggregates.
struct TailBounds {
  std::vector<double> agent_min;  // indexed by vertex - first_vertex
  std::vector<double> agent_max;
  double m = 0.0;  // min over agents of agent_min
  double M = 0.0;  // max over agents of agent_max
  Time window_start = 0;
  Time window_length = 0;
};

inline TailBounds tail_bounds(const Trajectory& traj, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("tail fraction must be in (0, 1]");
  }
  const std::size_t len = traj.headings.size();
  std::size_t window =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(
                                   tail_fraction * static_cast<double>(len))));
  window = std::min(window, len);
  const std::size_t start = len - window;

  TailBounds bounds;
  bounds.window_start = static_cast<Time>(start);
  bounds.window_length = static_cast<Time>(window);
  const HeadingState& first = traj.headings.front();
  bounds.agent_min.assign(static_cast<std::size_t>(first.size()),
                          std::numeric_limits<double>::infinity());
  bounds.agent_max.assign(static_cast<std::size_t>(first.size()),
                          -std::numeric_limits<double>::infinity());
  for (std::size_t t = start; t < len; ++t) {
    std::span<const double> values = traj.headings[t].values();
    for (std::size_t k = 0; k < values.size(); ++k) {
      bounds.agent_min[k] = std::min(bounds.agent_min[k], values[k]);
      bounds.agent_max[k] = std::max(bounds.agent_max[k], values[k]);
    }
  }
  // Aggregate over followers only, mirroring the envelope convention.
  const std::size_t skip = first.includes_leader() ? 1 : 0;
  bounds.m = std::numeric_limits<double>::infinity();
  bounds.M = -std::numeric_limits<double>::infinity();
  for (std::size_t k = skip; k < bounds.agent_min.size(); ++k) {
    bounds.m = std::min(bounds.m, bounds.agent_min[k]);
    bounds.M = std::max(bounds.M, bounds.agent_max[k]);
  }
  return bounds;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json report_json(const ConvergenceReport& report) {
  nlohmann::ordered_json j;
  j["converged"] = report.converged;
  j["theta_ss"] = report.theta_ss;
  if (report.steps_to_tolerance) {
    j["steps_to_tolerance"] = *report.steps_to_tolerance;
  } else {
    j["steps_to_tolerance"] = "not reached";
  }
  j["m_estimate"] = report.m_estimate;
  j["M_estimate"] = report.M_estimate;
  j["tolerance"] = report.tolerance;
  nlohmann::ordered_json components = nlohmann::ordered_json::array();
  for (const ComponentReport& c : report.components) {
    nlohmann::ordered_json jc;
    jc["vertices"] = c.vertices;
    jc["converged"] = c.converged;
    jc["theta_ss"] = c.theta_ss;
    if (c.steps_to_tolerance) {
      jc["steps_to_tolerance"] = *c.steps_to_tolerance;
    } else {
      jc["steps_to_tolerance"] = "not reached";
    }
    jc["m_estimate"] = c.m_estimate;
    jc["M_estimate"] = c.M_estimate;
    components.push_back(std::move(jc));
  }
  j["components"] = std::move(components);
  return j;
}

}  // namespace vicsek
