#include <array>
#include <span>

#include "wis/error.hpp"
#include "wis/graph.hpp"

namespace wis {

namespace {

// Cubic cages in LCF notation: a Hamiltonian cycle 0..n-1 plus, for node i,
// a chord to i + shifts[i % shifts.size()] (mod n).
constexpr std::array<int, 2> kHeawoodShifts{5, -5};
constexpr std::array<int, 3> kMcGeeShifts{12, 7, -7};
constexpr std::array<int, 6> kTutteCoxeterShifts{-13, -9, 7, -7, 9, 13};

// Outer 5-cycle, spokes, inner pentagram.
constexpr std::array<Edge, 15> kPetersenEdges{{
    {0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4},
    {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
    {5, 7}, {7, 9}, {6, 9}, {6, 8}, {5, 8},
}};

struct NamedGraph {
  std::string_view name;
  int n;
  int girth;
};
constexpr std::array<NamedGraph, 4> kCatalog{{
    {"petersen", 10, 5},
    {"heawood", 14, 6},
    {"mcgee", 24, 7},
    {"tutte_coxeter", 30, 8},
}};

Graph from_lcf(int n, std::span<const int> shifts) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  for (int i = 0; i < n; ++i) {
    int j = ((i + shifts[static_cast<std::size_t>(i) % shifts.size()]) % n + n) % n;
    if (i < j) edges.emplace_back(i, j);
  }
  return Graph::from_edges(n, edges);
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& entry : kCatalog) names.emplace_back(entry.name);
  return names;
}

Graph builtin_named(std::string_view name) {
  for (const auto& entry : kCatalog) {
    if (entry.name != name) continue;
    Graph g = [&] {
      if (name == "petersen") return Graph::from_edges(entry.n, kPetersenEdges);
      if (name == "heawood") return from_lcf(entry.n, kHeawoodShifts);
      if (name == "mcgee") return from_lcf(entry.n, kMcGeeShifts);
      return from_lcf(entry.n, kTutteCoxeterShifts);
    }();
    if (g.k() != 3 || g.girth() != entry.girth) {
      throw Error(ErrorKind::numerical_failure, "embedded table for " + std::string(name) +
                                                    " does not have girth " + std::to_string(entry.girth));
    }
    return g;
  }
  throw Error(ErrorKind::invalid_parameter, "unknown named graph \"" + std::string(name) + "\"");
}

}  // namespace wis
