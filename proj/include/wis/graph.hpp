#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wis {

using Node = int;
using Edge = std::pair<Node, Node>;

/// Immutable, connected, simple k-regular undirected graph.
///
/// Adjacency lists are sorted. The girth is computed once at construction;
/// `std::nullopt` stands for an acyclic graph (only K_2 among connected
/// regular graphs).
class Graph {
 public:
  /// Validates and builds. Throws Error with kind malformed_input (ids out of
  /// range), not_simple (self-loop or repeated edge), not_regular or
  /// disconnected.
  static Graph from_edges(int n, std::span<const Edge> edges);

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Node> neighbors(Node i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  bool adjacent(Node u, Node v) const;
  /// Edges as (u, v) with u < v, lexicographically sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::optional<int> girth() const noexcept { return girth_; }

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && adjacency_ == other.adjacency_;
  }

 private:
  Graph(int n, int k, std::vector<std::vector<Node>> adjacency, std::vector<Edge> edges);

  int n_ = 0;
  int k_ = 0;
  std::vector<std::vector<Node>> adjacency_;
  std::vector<Edge> edges_;
  std::optional<int> girth_;
};

/// Shortest cycle length by BFS from every node; nullopt for forests.
std::optional<int> compute_girth(int n, const std::vector<std::vector<Node>>& adjacency);
inline std::optional<int> girth(const Graph& g) { return g.girth(); }
bool girth_at_least(const Graph& g, int length);

Graph build_cycle(int n);
Graph build_complete(int n);
/// K_{n/2,n/2}; nodes 0..n/2-1 form the first side.
Graph build_complete_bipartite(int n);

struct RandomRegularOptions {
  std::optional<int> require_girth;
  std::uint64_t seed = 1;
  std::uint64_t max_attempts = 100000;
};
Graph build_random_regular(int n, int k, const RandomRegularOptions& options = {});

/// petersen, heawood, mcgee, tutte_coxeter.
Graph builtin_named(std::string_view name);
std::vector<std::string> builtin_names();

/// Simple paths of one length, aggregated by unordered endpoint pair.
struct EndpointPair {
  Node u;  ///< u < v
  Node v;
  std::int64_t multiplicity;
};
struct PathEndpoints {
  int length = 0;
  std::vector<EndpointPair> pairs;  ///< sorted by (u, v)

  /// Number of paths counted once per direction; n*k*(k-1)^(d-1) when all
  /// walks of this length are simple.
  std::int64_t total_ordered() const;
};
PathEndpoints enumerate_paths(const Graph& g, int length);

/// Edge-list text: one "u v" per line, 0-based ids, '#' comments allowed.
Graph load_edge_list(std::string_view text);
std::string save_edge_list(const Graph& g);
/// JSON descriptor {"n":..,"k":..,"edges":[[u,v],..]}.
Graph load_graph_json(std::string_view text);
std::string save_graph_json(const Graph& g);
/// Dispatches on the first non-space character ('{' means JSON).
Graph load_graph(std::string_view text);

}  // namespace wis
