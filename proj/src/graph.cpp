#include "wis/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "wis/error.hpp"
#include "wis/rng.hpp"

namespace wis {

namespace {

bool is_connected(int n, const std::vector<std::vector<Node>>& adjacency) {
  if (n == 0) return true;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Node> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    Node u = stack.back();
    stack.pop_back();
    for (Node w : adjacency[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

}  // namespace

Graph::Graph(int n, int k, std::vector<std::vector<Node>> adjacency, std::vector<Edge> edges)
    : n_(n), k_(k), adjacency_(std::move(adjacency)), edges_(std::move(edges)) {
  girth_ = compute_girth(n_, adjacency_);
}

Graph Graph::from_edges(int n, std::span<const Edge> edges) {
  if (n < 2) throw Error(ErrorKind::invalid_parameter, "graph needs at least 2 nodes");
  std::vector<std::vector<Node>> adjacency(static_cast<std::size_t>(n));
  std::vector<Edge> canonical;
  canonical.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw Error(ErrorKind::malformed_input,
                  "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    }
    if (u == v) throw Error(ErrorKind::not_simple, "self-loop at node " + std::to_string(u));
    canonical.emplace_back(std::min(u, v), std::max(u, v));
    adjacency[static_cast<std::size_t>(u)].push_back(v);
    adjacency[static_cast<std::size_t>(v)].push_back(u);
  }
  std::sort(canonical.begin(), canonical.end());
  if (auto dup = std::adjacent_find(canonical.begin(), canonical.end()); dup != canonical.end()) {
    throw Error(ErrorKind::not_simple, "repeated edge (" + std::to_string(dup->first) + "," +
                                           std::to_string(dup->second) + ")");
  }
  for (auto& row : adjacency) std::sort(row.begin(), row.end());
  const auto k = adjacency[0].size();
  for (int i = 0; i < n; ++i) {
    if (adjacency[static_cast<std::size_t>(i)].size() != k) {
      throw Error(ErrorKind::not_regular, "node " + std::to_string(i) + " has degree " +
                                              std::to_string(adjacency[static_cast<std::size_t>(i)].size()) +
                                              ", node 0 has degree " + std::to_string(k));
    }
  }
  if (!is_connected(n, adjacency)) throw Error(ErrorKind::disconnected, "graph is not connected");
  return Graph(n, static_cast<int>(k), std::move(adjacency), std::move(canonical));
}

bool Graph::adjacent(Node u, Node v) const {
  auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::optional<int> compute_girth(int n, const std::vector<std::vector<Node>>& adjacency) {
  constexpr int kNone = std::numeric_limits<int>::max();
  int best = kNone;
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::vector<Node> parent(static_cast<std::size_t>(n));
  for (Node source = 0; source < n; ++source) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(source)] = 0;
    parent[static_cast<std::size_t>(source)] = -1;
    std::queue<Node> frontier;
    frontier.push(source);
    while (!frontier.empty()) {
      Node u = frontier.front();
      frontier.pop();
      const int du = dist[static_cast<std::size_t>(u)];
      // No shorter cycle through this source can be found past this depth.
      if (2 * du + 1 >= best) break;
      for (Node w : adjacency[static_cast<std::size_t>(u)]) {
        auto& dw = dist[static_cast<std::size_t>(w)];
        if (dw < 0) {
          dw = du + 1;
          parent[static_cast<std::size_t>(w)] = u;
          frontier.push(w);
        } else if (parent[static_cast<std::size_t>(u)] != w) {
          best = std::min(best, du + dw + 1);
        }
      }
    }
  }
  if (best == kNone) return std::nullopt;
  return best;
}

bool girth_at_least(const Graph& g, int length) {
  auto gi = g.girth();
  return !gi || *gi >= length;
}

Graph build_cycle(int n) {
  if (n < 3) throw Error(ErrorKind::invalid_parameter, "cycle needs n >= 3");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, edges);
}

Graph build_complete(int n) {
  if (n < 2) throw Error(ErrorKind::invalid_parameter, "complete graph needs n >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph build_complete_bipartite(int n) {
  if (n < 4 || n % 2 != 0) {
    throw Error(ErrorKind::invalid_parameter, "complete bipartite graph needs even n >= 4");
  }
  const int half = n / 2;
  std::vector<Edge> edges;
  for (int i = 0; i < half; ++i)
    for (int j = half; j < n; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

namespace {

// One attempt of the sequential pairing model. Returns the edge list or
// nothing on a dead end.
std::optional<std::vector<Edge>> try_pairing(int n, int k, int min_cycle, Rng& rng) {
  std::vector<Node> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
  for (Node i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) stubs.push_back(i);

  std::vector<std::vector<Node>> adjacency(static_cast<std::size_t>(n));
  std::vector<Edge> edges;
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<Node> touched;
  std::vector<std::size_t> admissible;

  while (!stubs.empty()) {
    const std::size_t pick = static_cast<std::size_t>(rng.below(stubs.size()));
    const Node u = stubs[pick];
    std::swap(stubs[pick], stubs.back());
    stubs.pop_back();

    // Nodes within distance min_cycle - 2 of u would close a short cycle.
    const int radius = std::max(0, min_cycle - 2);
    touched.clear();
    dist[static_cast<std::size_t>(u)] = 0;
    touched.push_back(u);
    for (std::size_t head = 0; head < touched.size(); ++head) {
      Node x = touched[head];
      const int dx = dist[static_cast<std::size_t>(x)];
      if (dx == radius) continue;
      for (Node y : adjacency[static_cast<std::size_t>(x)]) {
        if (dist[static_cast<std::size_t>(y)] < 0) {
          dist[static_cast<std::size_t>(y)] = dx + 1;
          touched.push_back(y);
        }
      }
    }
    admissible.clear();
    for (std::size_t s = 0; s < stubs.size(); ++s) {
      const Node w = stubs[s];
      if (w == u || dist[static_cast<std::size_t>(w)] >= 0) continue;
      if (std::find(adjacency[static_cast<std::size_t>(u)].begin(),
                    adjacency[static_cast<std::size_t>(u)].end(), w) !=
          adjacency[static_cast<std::size_t>(u)].end()) {
        continue;
      }
      admissible.push_back(s);
    }
    for (Node x : touched) dist[static_cast<std::size_t>(x)] = -1;
    if (admissible.empty()) return std::nullopt;

    const std::size_t s = admissible[static_cast<std::size_t>(rng.below(admissible.size()))];
    const Node w = stubs[s];
    std::swap(stubs[s], stubs.back());
    stubs.pop_back();
    adjacency[static_cast<std::size_t>(u)].push_back(w);
    adjacency[static_cast<std::size_t>(w)].push_back(u);
    edges.emplace_back(u, w);
  }
  if (!is_connected(n, adjacency)) return std::nullopt;
  return edges;
}

}  // namespace

Graph build_random_regular(int n, int k, const RandomRegularOptions& options) {
  if (k < 2 || k >= n) throw Error(ErrorKind::invalid_parameter, "need 2 <= k < n");
  if ((static_cast<long long>(n) * k) % 2 != 0) {
    throw Error(ErrorKind::invalid_parameter,
                "n*k = " + std::to_string(static_cast<long long>(n) * k) + " is odd");
  }
  const int min_cycle = std::max(3, options.require_girth.value_or(3));
  for (std::uint64_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    Rng rng(derive_seed(options.seed, attempt));
    if (auto edges = try_pairing(n, k, min_cycle, rng)) {
      Graph g = Graph::from_edges(n, *edges);
      if (girth_at_least(g, min_cycle)) return g;
    }
  }
  throw Error(ErrorKind::girth_unsatisfiable,
              "no " + std::to_string(k) + "-regular graph on " + std::to_string(n) +
                  " nodes with girth >= " + std::to_string(min_cycle) + " found in " +
                  std::to_string(options.max_attempts) + " attempts");
}

std::int64_t PathEndpoints::total_ordered() const {
  std::int64_t total = 0;
  for (const auto& p : pairs) total += p.multiplicity;
  return 2 * total;
}

PathEndpoints enumerate_paths(const Graph& g, int length) {
  if (length < 1 || length > 4) throw Error(ErrorKind::invalid_parameter, "path length must be 1..4");
  PathEndpoints out;
  out.length = length;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(g.n()));
  std::vector<Node> path;
  std::vector<char> on_path(static_cast<std::size_t>(g.n()), 0);

  // Depth-first over simple paths starting at `start`; each unordered path is
  // recorded once, from its smaller endpoint.
  auto extend = [&](auto&& self, Node start) -> void {
    const Node tail = path.back();
    if (static_cast<int>(path.size()) == length + 1) {
      if (tail > start) ++counts[static_cast<std::size_t>(tail)];
      return;
    }
    for (Node w : g.neighbors(tail)) {
      if (on_path[static_cast<std::size_t>(w)]) continue;
      on_path[static_cast<std::size_t>(w)] = 1;
      path.push_back(w);
      self(self, start);
      path.pop_back();
      on_path[static_cast<std::size_t>(w)] = 0;
    }
  };

  for (Node u = 0; u < g.n(); ++u) {
    std::fill(counts.begin(), counts.end(), 0);
    path.assign(1, u);
    on_path[static_cast<std::size_t>(u)] = 1;
    extend(extend, u);
    on_path[static_cast<std::size_t>(u)] = 0;
    for (Node v = u + 1; v < g.n(); ++v) {
      if (counts[static_cast<std::size_t>(v)] > 0) {
        out.pairs.push_back({u, v, counts[static_cast<std::size_t>(v)]});
      }
    }
  }
  return out;
}

namespace {

bool parse_int(std::string_view token, int& value) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

Graph load_edge_list(std::string_view text) {
  std::vector<Edge> edges;
  int max_id = -1;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tokens.empty()) continue;
    int u = 0;
    int v = 0;
    if (tokens.size() != 2 || !parse_int(tokens[0], u) || !parse_int(tokens[1], v) || u < 0 || v < 0) {
      throw Error(ErrorKind::malformed_input,
                  "line " + std::to_string(line_no) + ": expected \"u v\", got \"" + std::string(line) + "\"");
    }
    edges.emplace_back(u, v);
    max_id = std::max({max_id, u, v});
  }
  if (edges.empty()) throw Error(ErrorKind::malformed_input, "edge list is empty");
  return Graph::from_edges(max_id + 1, edges);
}

std::string save_edge_list(const Graph& g) {
  std::ostringstream out;
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
  return out.str();
}

Graph load_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::malformed_input, std::string("graph JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("edges") || !doc["edges"].is_array()) {
    throw Error(ErrorKind::malformed_input, "graph JSON needs an \"edges\" array");
  }
  std::vector<Edge> edges;
  int max_id = -1;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw Error(ErrorKind::malformed_input, "graph JSON edge must be [u, v]");
    }
    Edge edge{e[0].get<int>(), e[1].get<int>()};
    edges.push_back(edge);
    max_id = std::max({max_id, edge.first, edge.second});
  }
  const int n = doc.contains("n") ? doc["n"].get<int>() : max_id + 1;
  Graph g = Graph::from_edges(n, edges);
  if (doc.contains("k") && doc["k"].get<int>() != g.k()) {
    throw Error(ErrorKind::not_regular, "declared k=" + std::to_string(doc["k"].get<int>()) +
                                            " but edges give k=" + std::to_string(g.k()));
  }
  return g;
}

std::string save_graph_json(const Graph& g) {
  nlohmann::json doc;
  doc["n"] = g.n();
  doc["k"] = g.k();
  doc["edges"] = nlohmann::json::array();
  for (auto [u, v] : g.edges()) doc["edges"].push_back({u, v});
  return doc.dump();
}

Graph load_graph(std::string_view text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return load_graph_json(text);
  return load_edge_list(text);
}

}  // namespace wis
