#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vicsek {

using Vertex = int;
using Time = std::int64_t;

// Unordered vertex pair, stored with a < b so edge sets compare as sets.
struct Edge {
  Vertex a = 0;
  Vertex b = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Vertex i, Vertex j) {
  if (i == j) {
    throw std::invalid_argument("self-loop edge (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
  }
  return i < j ? Edge{i, j} : Edge{j, i};
}

// Simple undirected graph over a fixed vertex set: agents 1..n, plus vertex 0
// when the graph belongs to a leader-following system. Immutable once built.
class NeighborGraph {
 public:
  explicit NeighborGraph(int agent_count, std::vector<Edge> edges = {},
                         bool includes_leader = false)
      : n_(agent_count), leader_(includes_leader) {
    if (agent_count < 1) {
      throw std::invalid_argument("agent count must be positive, got " +
                                  std::to_string(agent_count));
    }
    for (Edge& e : edges) {
      e = make_edge(e.a, e.b);
      if (e.a < first_vertex() || e.b > n_) {
        throw std::invalid_argument("edge (" + std::to_string(e.a) + "," +
                                    std::to_string(e.b) +
                                    ") leaves the vertex set");
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adjacency_.resize(static_cast<std::size_t>(vertex_count()));
    for (const Edge& e : edges_) {
      adjacency_[index_of(e.a)].push_back(e.b);
      adjacency_[index_of(e.b)].push_back(e.a);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  }

  int agent_count() const { return n_; }
  bool includes_leader() const { return leader_; }
  Vertex first_vertex() const { return leader_ ? 0 : 1; }
  int vertex_count() const { return leader_ ? n_ + 1 : n_; }

  bool contains(Vertex v) const { return v >= first_vertex() && v <= n_; }

  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(vertex_count()));
    for (Vertex v = first_vertex(); v <= n_; ++v) out.push_back(v);
    return out;
  }

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  bool has_edge(Vertex i, Vertex j) const {
    if (!contains(i) || !contains(j) || i == j) return false;
    Edge e = make_edge(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

  const std::vector<Vertex>& neighbors(Vertex i) const {
    require_vertex(i);
    return adjacency_[index_of(i)];
  }

  int degree(Vertex i) const {
    return static_cast<int>(neighbors(i).size());
  }

  bool same_vertex_set(const NeighborGraph& other) const {
    return n_ == other.n_ && leader_ == other.leader_;
  }

  friend bool operator==(const NeighborGraph&, const NeighborGraph&) = default;

  static NeighborGraph empty_graph(int n, bool includes_leader = false) {
    return NeighborGraph(n, {}, includes_leader);
  }

  static NeighborGraph complete(int n, bool includes_leader = false) {
    std::vector<Edge> edges;
    Vertex first = includes_leader ? 0 : 1;
    for (Vertex i = first; i <= n; ++i)
      for (Vertex j = i + 1; j <= n; ++j) edges.push_back({i, j});
    return NeighborGraph(n, std::move(edges), includes_leader);
  }

  // Star over agents 1..n with the given center.
  static NeighborGraph star(int n, Vertex center = 1) {
    std::vector<Edge> edges;
    for (Vertex v = 1; v <= n; ++v)
      if (v != center) edges.push_back(make_edge(center, v));
    return NeighborGraph(n, std::move(edges));
  }

  // Path 1-2-...-n over the agents.
  static NeighborGraph path(int n) {
    std::vector<Edge> edges;
    for (Vertex v = 1; v < n; ++v) edges.push_back({v, v + 1});
    return NeighborGraph(n, std::move(edges));
  }

 private:
  std::size_t index_of(Vertex v) const {
    return static_cast<std::size_t>(v - first_vertex());
  }

  void require_vertex(Vertex v) const {
    if (!contains(v)) {
      throw std::invalid_argument("unknown vertex " + std::to_string(v));
    }
  }

  int n_;
  bool leader_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

// Disjoint nonempty vertex blocks covering the whole vertex set, listed in
// ascending order of smallest member.
struct VertexPartition {
  std::vector<std::vector<Vertex>> blocks;
  std::size_t block_count() const { return blocks.size(); }
};

inline NeighborGraph graph_union(const std::vector<NeighborGraph>& graphs) {
  if (graphs.empty()) {
    throw std::invalid_argument("union of an empty graph sequence");
  }
  const NeighborGraph& first = graphs.front();
  std::vector<Edge> edges;
  for (const NeighborGraph& g : graphs) {
    if (!g.same_vertex_set(first)) {
      throw std::invalid_argument("union over mismatched vertex sets");
    }
    edges.insert(edges.end(), g.edges().begin(), g.edges().end());
  }
  return NeighborGraph(first.agent_count(), std::move(edges),
                       first.includes_leader());
}

inline NeighborGraph graph_union(const NeighborGraph& a,
                                 const NeighborGraph& b) {
  return graph_union(std::vector<NeighborGraph>{a, b});
}

inline VertexPartition connected_components(const NeighborGraph& g) {
  VertexPartition partition;
  std::vector<bool> seen(static_cast<std::size_t>(g.vertex_count()), false);
  const Vertex first = g.first_vertex();
  for (Vertex seed = first; seed <= g.agent_count(); ++seed) {
    if (seen[static_cast<std::size_t>(seed - first)]) continue;
    std::vector<Vertex> block;
    std::vector<Vertex> stack{seed};
    seen[static_cast<std::size_t>(seed - first)] = true;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      block.push_back(v);
      for (Vertex w : g.neighbors(v)) {
        std::size_t idx = static_cast<std::size_t>(w - first);
        if (!seen[idx]) {
          seen[idx] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(block.begin(), block.end());
    partition.blocks.push_back(std::move(block));
  }
  return partition;
}

inline bool is_connected(const NeighborGraph& g) {
  return connected_components(g).block_count() == 1;
}

// Fixture text form: header "n=<count>", then one "i j" line per edge with
// i < j, ascending. Covers graphs over agents 1..n only.
inline std::string format_edge_list(const NeighborGraph& g) {
  std::ostringstream out;
  out << "n=" << g.agent_count() << "\n";
  for (const Edge& e : g.edges()) out << e.a << " " << e.b << "\n";
  return out.str();
}

inline NeighborGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header) || header.rfind("n=", 0) != 0) {
    throw std::invalid_argument("edge list must start with an n=<count> line");
  }
  int n = 0;
  try {
    n = std::stoi(header.substr(2));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad agent count in edge list header: " +
                                header);
  }
  std::vector<Edge> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    Vertex i = 0, j = 0;
    if (!(fields >> i >> j)) {
      throw std::invalid_argument("bad edge line: " + line);
    }
    edges.push_back({i, j});
  }
  return NeighborGraph(n, std::move(edges));
}

}  // namespace vicsek
