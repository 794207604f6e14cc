// Test-only reference implementations, kept independent of the library's
// code paths: reachability by boolean matrix closure, stepping by explicit
// row-stochastic matrices, and the matrix contraction coefficient.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "vicsek/dynamics.hpp"
#include "vicsek/graph.hpp"

namespace oracle {

// Reflexive-transitive reachability via repeated boolean squaring.
inline std::vector<std::vector<bool>> reachability(
    const vicsek::NeighborGraph& g) {
  const int n = g.vertex_count();
  const vicsek::Vertex first = g.first_vertex();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) reach[i][i] = true;
  for (const vicsek::Edge& e : g.edges()) {
    reach[e.a - first][e.b - first] = true;
    reach[e.b - first][e.a - first] = true;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  return reach;
}

inline bool connected(const vicsek::NeighborGraph& g) {
  auto reach = reachability(g);
  for (const auto& row : reach)
    for (bool r : row)
      if (!r) return false;
  return true;
}

inline std::vector<std::vector<vicsek::Vertex>> components(
    const vicsek::NeighborGraph& g) {
  auto reach = reachability(g);
  const int n = g.vertex_count();
  const vicsek::Vertex first = g.first_vertex();
  std::vector<bool> placed(n, false);
  std::vector<std::vector<vicsek::Vertex>> blocks;
  for (int i = 0; i < n; ++i) {
    if (placed[i]) continue;
    std::vector<vicsek::Vertex> block;
    for (int j = 0; j < n; ++j) {
      if (reach[i][j]) {
        block.push_back(first + j);
        placed[j] = true;
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

// Row-stochastic matrix of the averaging rule: row i weights itself and each
// neighbor by 1/(1 + degree(i)).
inline std::vector<std::vector<double>> averaging_matrix(
    const vicsek::NeighborGraph& g) {
  const int n = g.vertex_count();
  const vicsek::Vertex first = g.first_vertex();
  std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 0.0));
  for (vicsek::Vertex i = first; i <= g.agent_count(); ++i) {
    const auto& nbrs = g.neighbors(i);
    double w = 1.0 / (1.0 + static_cast<double>(nbrs.size()));
    matrix[i - first][i - first] = w;
    for (vicsek::Vertex j : nbrs) matrix[i - first][j - first] = w;
  }
  return matrix;
}

inline std::vector<double> apply(const std::vector<std::vector<double>>& m,
                                 const std::vector<double>& x) {
  std::vector<double> y(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
  return y;
}

// 1 - min over row pairs of the overlapping mass: an upper bound on the
// one-step spread contraction of a row-stochastic matrix.
inline double ergodicity_coefficient(
    const std::vector<std::vector<double>>& m) {
  double tau = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t k = i + 1; k < m.size(); ++k) {
      double overlap = 0.0;
      for (std::size_t j = 0; j < m.size(); ++j) {
        overlap += std::min(m[i][j], m[k][j]);
      }
      tau = std::max(tau, 1.0 - overlap);
    }
  }
  return tau;
}

inline vicsek::NeighborGraph random_graph(std::mt19937& rng, int n,
                                          double edge_probability,
                                          bool includes_leader = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<vicsek::Edge> edges;
  const vicsek::Vertex first = includes_leader ? 0 : 1;
  for (vicsek::Vertex i = first; i <= n; ++i)
    for (vicsek::Vertex j = i + 1; j <= n; ++j)
      if (unit(rng) < edge_probability) edges.push_back({i, j});
  return vicsek::NeighborGraph(n, std::move(edges), includes_leader);
}

inline std::vector<double> random_headings(std::mt19937& rng, int count,
                                           double low = 0.0,
                                           double high = 6.28) {
  std::uniform_real_distribution<double> dist(low, high);
  std::vector<double> values(static_cast<std::size_t>(count));
  for (double& v : values) v = dist(rng);
  return values;
}

}  // namespace oracle
