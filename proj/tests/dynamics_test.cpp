#include "vicsek/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "vicsek/graph.hpp"
#include "vicsek/signal.hpp"

using vicsek::HeadingState;
using vicsek::LeaderConfig;
using vicsek::Mode;
using vicsek::NeighborGraph;
using vicsek::NeighborhoodKind;
using vicsek::PlanarState;
using vicsek::SwitchingSignal;
using vicsek::Time;
using vicsek::Trajectory;
using vicsek::Vertex;

namespace {

HeadingState make_state(std::vector<double> values, bool leader = false) {
  return HeadingState(std::move(values), leader);
}

}  // namespace

TEST(StepHeadings, LoneAgentKeepsItsHeading) {
  HeadingState next = step_headings(make_state({1.25}), NeighborGraph(1));
  EXPECT_EQ(next.at_vertex(1), 1.25);
}

TEST(StepHeadings, PairAveragesExactly) {
  HeadingState next =
      step_headings(make_state({0.0, 1.0}), NeighborGraph(2, {{1, 2}}));
  EXPECT_EQ(next.at_vertex(1), 0.5);
  EXPECT_EQ(next.at_vertex(2), 0.5);
}

TEST(StepHeadings, PathExampleMatchesHandEvaluation) {
  HeadingState next = step_headings(make_state({0.0, 0.6, 1.2}),
                                    NeighborGraph(3, {{1, 2}, {2, 3}}));
  EXPECT_NEAR(next.at_vertex(1), 0.3, 1e-12);  // (0 + 0.6) / 2
  EXPECT_NEAR(next.at_vertex(2), 0.6, 1e-12);  // (0 + 0.6 + 1.2) / 3
  EXPECT_NEAR(next.at_vertex(3), 0.9, 1e-12);  // (0.6 + 1.2) / 2
}

TEST(StepHeadings, SizeMismatchRejected) {
  EXPECT_THROW(step_headings(make_state({0.0, 1.0}), NeighborGraph(3)),
               std::invalid_argument);
  EXPECT_THROW(
      step_headings(make_state({0.0, 1.0}), NeighborGraph(2, {}, true)),
      std::invalid_argument);
}

TEST(StepHeadings, AgreesWithMatrixOracle) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 8);
    NeighborGraph g = oracle::random_graph(rng, n, 0.4);
    std::vector<double> values = oracle::random_headings(rng, n);
    std::vector<double> expected = oracle::apply(oracle::averaging_matrix(g),
                                                 values);
    HeadingState next = step_headings(make_state(values), g);
    for (Vertex v = 1; v <= n; ++v) {
      EXPECT_NEAR(next.at_vertex(v), expected[static_cast<std::size_t>(v - 1)],
                  1e-12);
    }
  }
}

TEST(StepHeadingsLeader, NoEdgesLeavesEveryoneInPlace) {
  HeadingState next = step_headings_leader(
      make_state({0.25, 1.0, 2.0}, true), LeaderConfig{0.25},
      NeighborGraph(2, {}, true));
  EXPECT_EQ(next.at_vertex(0), 0.25);
  EXPECT_EQ(next.at_vertex(1), 1.0);
  EXPECT_EQ(next.at_vertex(2), 2.0);
}

TEST(StepHeadingsLeader, SingleFollowerAveragesWithLeader) {
  HeadingState next = step_headings_leader(
      make_state({0.0, 1.0}, true), LeaderConfig{0.0},
      NeighborGraph(1, {{0, 1}}, true));
  EXPECT_EQ(next.at_vertex(1), 0.5);  // (1.0 + 0.0) / 2
  EXPECT_EQ(next.at_vertex(0), 0.0);
}

TEST(StepHeadingsLeader, FollowerWithLeaderAndPeerNeighbors) {
  // follower 1 sees leader 0 and follower 2: (0.9 + 0.3 + 0.0) / 3
  HeadingState next = step_headings_leader(
      make_state({0.0, 0.9, 0.3}, true), LeaderConfig{0.0},
      NeighborGraph(2, {{0, 1}, {1, 2}}, true));
  EXPECT_NEAR(next.at_vertex(1), 0.4, 1e-12);
}

TEST(StepHeadingsLeader, LeaderSlotIsTheta0Bitwise) {
  std::mt19937 rng(37);
  LeaderConfig leader{1.234567890123456};
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 6);
    NeighborGraph g = oracle::random_graph(rng, n, 0.5, true);
    std::vector<double> values = oracle::random_headings(rng, n + 1);
    values[0] = leader.theta0;
    HeadingState next = step_headings_leader(make_state(values, true), leader, g);
    EXPECT_EQ(next.at_vertex(0), leader.theta0);
  }
}

TEST(StepPositions, MovesAlongTheHeading) {
  PlanarState planar({{0.0, 0.0}}, 1.0, 1.0);
  PlanarState next = step_positions(planar, make_state({0.0}));
  EXPECT_EQ(next.positions()[0][0], 1.0);
  EXPECT_EQ(next.positions()[0][1], 0.0);

  PlanarState up({{3.0, 4.0}}, 2.0, 1.0);
  PlanarState next_up =
      step_positions(up, make_state({std::numbers::pi / 2}));
  EXPECT_NEAR(next_up.positions()[0][0], 3.0, 1e-12);
  EXPECT_NEAR(next_up.positions()[0][1], 6.0, 1e-12);

  PlanarState diag({{0.0, 0.0}}, 1.0, 1.0);
  PlanarState next_diag =
      step_positions(diag, make_state({std::numbers::pi / 4}));
  EXPECT_NEAR(next_diag.positions()[0][0], std::sqrt(2.0) / 2, 1e-12);
  EXPECT_NEAR(next_diag.positions()[0][1], std::sqrt(2.0) / 2, 1e-12);
}

TEST(StepPositions, PerAgentSpeedsHonored) {
  PlanarState planar({{0.0, 0.0}, {0.0, 0.0}}, 1.0, 1.0,
                     NeighborhoodKind::kClosed, false, {1.0, 3.0});
  PlanarState next = step_positions(planar, make_state({0.0, 0.0}));
  EXPECT_EQ(next.positions()[0][0], 1.0);
  EXPECT_EQ(next.positions()[1][0], 3.0);
}

TEST(StepPositions, SizeMismatchRejected) {
  PlanarState planar({{0.0, 0.0}}, 1.0, 1.0);
  EXPECT_THROW(step_positions(planar, make_state({0.0, 1.0})),
               std::invalid_argument);
}

TEST(PlanarState, RejectsNonPositiveParameters) {
  EXPECT_THROW(PlanarState({{0, 0}}, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(PlanarState({{0, 0}}, 1.0, -1.0), std::invalid_argument);
}

TEST(GeometricNeighbors, ClosedIncludesTheBoundaryOpenDoesNot) {
  // two agents at distance exactly r = 2
  PlanarState closed({{0.0, 0.0}, {2.0, 0.0}}, 1.0, 2.0,
                     NeighborhoodKind::kClosed);
  EXPECT_TRUE(geometric_neighbors(closed).has_edge(1, 2));
  PlanarState open({{0.0, 0.0}, {2.0, 0.0}}, 1.0, 2.0,
                   NeighborhoodKind::kOpen);
  EXPECT_FALSE(geometric_neighbors(open).has_edge(1, 2));
}

TEST(GeometricNeighbors, CoincidentAgentsFormACompleteGraph) {
  PlanarState planar({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}, 1.0, 0.5);
  EXPECT_EQ(geometric_neighbors(planar), NeighborGraph::complete(3));
}

TEST(GeometricNeighbors, LineAtSpacingBelowRadiusIsAPath) {
  PlanarState planar({{0.0, 0.0}, {1.5, 0.0}, {3.0, 0.0}, {4.5, 0.0}}, 1.0,
                     2.0);
  EXPECT_EQ(geometric_neighbors(planar), NeighborGraph::path(4));
}

TEST(Simulate, ZeroStepsHoldsOnlyTheInitialState) {
  Trajectory traj = simulate(Mode::kLeaderless, make_state({0.0, 1.0}), {},
                             SwitchingSignal::constant(NeighborGraph(2)), 0);
  EXPECT_EQ(traj.steps(), 0);
  ASSERT_EQ(traj.headings.size(), 1u);
  EXPECT_EQ(traj.headings[0], make_state({0.0, 1.0}));
}

TEST(Simulate, CompleteGraphReachesTheMeanInOneStep) {
  std::vector<double> values{0.1, 0.9, 1.7, 2.9};
  Trajectory traj =
      simulate(Mode::kLeaderless, make_state(values), {},
               SwitchingSignal::constant(NeighborGraph::complete(4)), 1);
  double mean = (0.1 + 0.9 + 1.7 + 2.9) / 4.0;
  for (Vertex v = 1; v <= 4; ++v) {
    EXPECT_NEAR(traj.final_state().at_vertex(v), mean, 1e-12);
  }
}

TEST(Simulate, ConsensusIsAnExactFixedPoint) {
  std::vector<double> equal(5, 0.3);
  Trajectory traj =
      simulate(Mode::kLeaderless, make_state(equal), {},
               SwitchingSignal::sparse_powers_of_two(NeighborGraph::star(5)),
               40);
  for (const HeadingState& state : traj.headings) {
    for (Vertex v = 1; v <= 5; ++v) {
      EXPECT_EQ(state.at_vertex(v), 0.3);  // bitwise
    }
  }
}

TEST(Simulate, GeometricModeRequiresAPlanarState) {
  SwitchingSignal sig =
      SwitchingSignal::geometric(3, 1.0, NeighborhoodKind::kClosed);
  EXPECT_THROW(
      simulate(Mode::kLeaderless, make_state({0.0, 0.0, 0.0}), {}, sig, 5),
      std::invalid_argument);
}

TEST(Simulate, RecordsTheGraphsActuallyUsed) {
  SwitchingSignal sig = SwitchingSignal::periodic(
      2, {NeighborGraph(2, {{1, 2}}), NeighborGraph(2)});
  Trajectory traj =
      simulate(Mode::kLeaderless, make_state({0.0, 1.0}), {}, sig, 4);
  ASSERT_EQ(traj.graphs.size(), 4u);
  EXPECT_EQ(traj.graphs[0], NeighborGraph(2, {{1, 2}}));
  EXPECT_EQ(traj.graphs[1], NeighborGraph(2));
  EXPECT_EQ(traj.graphs[2], NeighborGraph(2, {{1, 2}}));
}

TEST(Simulate, BitReproducible) {
  auto run = [] {
    return simulate(Mode::kLeaderless,
                    make_state({0.0, 0.7, 1.4, 2.1, 2.8, 3.5}), {},
                    SwitchingSignal::random(6, 77, 0.3), 200);
  };
  Trajectory a = run();
  Trajectory b = run();
  ASSERT_EQ(a.headings.size(), b.headings.size());
  for (std::size_t t = 0; t < a.headings.size(); ++t) {
    EXPECT_EQ(a.headings[t], b.headings[t]);
  }
}

// Convex-combination closure: every step stays inside the previous hull, and
// the initial hull bounds the whole run.
TEST(Invariants, ConvexHullContainment) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng() % 9);
    std::vector<double> values = oracle::random_headings(rng, n);
    double lo0 = *std::min_element(values.begin(), values.end());
    double hi0 = *std::max_element(values.begin(), values.end());
    SwitchingSignal sig = SwitchingSignal::random(n, rng(), 0.4);
    Trajectory traj = simulate(Mode::kLeaderless, make_state(values), {}, sig,
                               100);
    for (std::size_t t = 0; t + 1 < traj.headings.size(); ++t) {
      double lo = traj.headings[t].values()[0];
      double hi = lo;
      for (double x : traj.headings[t].values()) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      for (double x : traj.headings[t + 1].values()) {
        EXPECT_GE(x, lo - 1e-12);
        EXPECT_LE(x, hi + 1e-12);
        EXPECT_GE(x, lo0 - 1e-12);
        EXPECT_LE(x, hi0 + 1e-12);
      }
    }
  }
}

TEST(Invariants, PermutationEquivariantBitwise) {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 7);
    NeighborGraph g = oracle::random_graph(rng, n, 0.5);
    std::vector<double> values = oracle::random_headings(rng, n);

    std::vector<Vertex> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<double> permuted_values(static_cast<std::size_t>(n));
    std::vector<vicsek::Edge> permuted_edges;
    for (int i = 1; i <= n; ++i) {
      permuted_values[static_cast<std::size_t>(
          perm[static_cast<std::size_t>(i - 1)] - 1)] =
          values[static_cast<std::size_t>(i - 1)];
    }
    for (const vicsek::Edge& e : g.edges()) {
      permuted_edges.push_back(
          {perm[static_cast<std::size_t>(e.a - 1)],
           perm[static_cast<std::size_t>(e.b - 1)]});
    }
    NeighborGraph permuted_g(n, std::move(permuted_edges));

    HeadingState next = step_headings(make_state(values), g);
    HeadingState permuted_next =
        step_headings(make_state(permuted_values), permuted_g);
    for (int i = 1; i <= n; ++i) {
      EXPECT_EQ(permuted_next.at_vertex(perm[static_cast<std::size_t>(i - 1)]),
                next.at_vertex(i));  // identical arithmetic per agent
    }
  }
}

TEST(Invariants, DisconnectedComponentsDecoupleExactly) {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    // two blocks: vertices 1..k and k+1..n with no crossing edges
    int k = 2 + static_cast<int>(rng() % 3);
    int m = 2 + static_cast<int>(rng() % 3);
    int n = k + m;
    NeighborGraph left = oracle::random_graph(rng, k, 0.6);
    NeighborGraph right = oracle::random_graph(rng, m, 0.6);
    std::vector<vicsek::Edge> edges = left.edges();
    for (const vicsek::Edge& e : right.edges()) {
      edges.push_back({e.a + k, e.b + k});
    }
    NeighborGraph whole(n, edges);
    std::vector<double> values = oracle::random_headings(rng, n);
    std::vector<double> left_values(values.begin(), values.begin() + k);
    std::vector<double> right_values(values.begin() + k, values.end());

    HeadingState next = step_headings(make_state(values), whole);
    HeadingState next_left = step_headings(make_state(left_values), left);
    HeadingState next_right = step_headings(make_state(right_values), right);
    for (int i = 1; i <= k; ++i) {
      EXPECT_EQ(next.at_vertex(i), next_left.at_vertex(i));
    }
    for (int i = 1; i <= m; ++i) {
      EXPECT_EQ(next.at_vertex(k + i), next_right.at_vertex(i));
    }
  }
}

TEST(Invariants, LeaderHeadingConstantAcrossARun) {
  LeaderConfig leader{0.875};
  NeighborGraph g(3, {{0, 1}, {1, 2}, {2, 3}}, true);
  Trajectory traj =
      simulate(Mode::kLeader, make_state({0.875, 1.5, 2.5, 3.5}, true), leader,
               SwitchingSignal::constant(g), 500);
  for (const HeadingState& state : traj.headings) {
    EXPECT_EQ(state.at_vertex(0), 0.875);
  }
}

TEST(TrajectoryCsv, HeaderAndFirstRow) {
  Trajectory traj = simulate(Mode::kLeaderless, make_state({0.0, 0.5}), {},
                             SwitchingSignal::constant(NeighborGraph(2)), 1);
  std::string csv = trajectory_csv(traj);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,theta_1,theta_2");
  EXPECT_NE(csv.find("\n0,0,0.5\n"), std::string::npos);
}

TEST(TrajectoryCsv, LeaderModePrependsThetaZero) {
  Trajectory traj = simulate(
      Mode::kLeader, make_state({0.25, 1.0}, true), LeaderConfig{0.25},
      SwitchingSignal::constant(NeighborGraph(1, {}, true)), 1);
  std::string csv = trajectory_csv(traj);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,theta_0,theta_1");
}

TEST(TrajectoryCsv, SeventeenDigitsRoundTrip) {
  std::mt19937 rng(53);
  std::vector<double> values = oracle::random_headings(rng, 4);
  Trajectory traj =
      simulate(Mode::kLeaderless, make_state(values), {},
               SwitchingSignal::random(4, 3, 0.5), 20);
  std::string csv = trajectory_csv(traj);
  // parse every data row back and compare bitwise
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::size_t t = 0;
  while (std::getline(in, line)) {
    std::vector<double> parsed;
    std::size_t pos = line.find(',');
    while (pos != std::string::npos) {
      std::size_t next = line.find(',', pos + 1);
      std::string field = line.substr(pos + 1, next == std::string::npos
                                                   ? std::string::npos
                                                   : next - pos - 1);
      parsed.push_back(std::stod(field));
      pos = next;
    }
    ASSERT_EQ(parsed.size(), 4u);
    for (int v = 1; v <= 4; ++v) {
      EXPECT_EQ(parsed[static_cast<std::size_t>(v - 1)],
                traj.headings[t].at_vertex(v));
    }
    ++t;
  }
  EXPECT_EQ(t, traj.headings.size());
}
