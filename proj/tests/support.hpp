// Shared generators and independent oracles for the test suites. Nothing
// here calls the library routine it is used to check.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wis/birth_death.hpp"
#include "wis/dynamics.hpp"
#include "wis/graph.hpp"

namespace testing {

using wis::Configuration;
using wis::Graph;
using wis::Node;
using wis::Params;

struct Gen {
  std::mt19937_64 engine;
  explicit Gen(std::uint64_t seed) : engine(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  bool coin() { return integer(0, 1) == 1; }

  Configuration config(int n) {
    Configuration x(n);
    for (Node i = 0; i < n; ++i) x.set(i, coin());
    return x;
  }

  /// b, c > 0 with k(b+c) < 1 - margin.
  Params params(int k, wis::Rule rule, double epsilon) {
    Params p;
    const double budget = real(0.05, 0.95) / k;
    const double share = real(0.05, 0.95);
    p.b = budget * share;
    p.c = budget * (1.0 - share);
    p.epsilon = epsilon;
    p.rule = rule;
    return p;
  }

  /// Mixed bag: complete, complete bipartite, cycles, the McGee graph and
  /// random 3-regular graphs.
  Graph graph() {
    switch (integer(0, 4)) {
      case 0: return wis::build_complete(integer(3, 8));
      case 1: return wis::build_complete_bipartite(2 * integer(2, 5));
      case 2: return wis::build_cycle(integer(3, 16));
      case 3: return wis::builtin_named("mcgee");
      default: {
        wis::RandomRegularOptions opts;
        opts.seed = engine();
        return wis::build_random_regular(2 * integer(3, 10), 3, opts);
      }
    }
  }
};

/// Payoff recomputed from the adjacency structure.
inline double payoff_oracle(const Graph& g, const Configuration& x, Node i, double b, double c) {
  double coop_nbrs = 0;
  for (Node j : g.neighbors(i)) coop_nbrs += x[j] ? 1.0 : 0.0;
  return -g.k() * c * (x[i] ? 1.0 : 0.0) + b * coop_nbrs;
}

/// P(x_i becomes 1 | i updates), enumerating the selector and the sampled
/// neighbour explicitly.
inline double update_oracle(const Graph& g, const Configuration& x, Node i, double b, double c, double eps) {
  const auto nbrs = g.neighbors(i);
  const double k = g.k();
  double mean_u = 0;
  for (Node h : nbrs) mean_u += payoff_oracle(g, x, h, b, c);
  mean_u /= k;
  double uniform = 0, biased = 0;
  for (Node j : nbrs) {
    if (!x[j]) continue;
    uniform += 1.0 / k;
    biased += (payoff_oracle(g, x, j, b, c) + 1.0 - mean_u) / k;
  }
  return (1.0 - eps) * uniform + eps * biased;
}

/// E[N_{t+1} - N_t] under the selector-1 kernel, summed over updaters.
inline double drift_oracle(const Graph& g, const Configuration& x, double b, double c) {
  double total = 0;
  for (Node i = 0; i < g.n(); ++i) total += update_oracle(g, x, i, b, c, 1.0) - (x[i] ? 1.0 : 0.0);
  return total / g.n();
}

/// Simple paths of the given length by DFS, counted per ordered start.
/// Returns (u<v, count) accumulated over unordered endpoint pairs.
inline std::map<std::pair<Node, Node>, std::int64_t> dfs_paths(const Graph& g, int length) {
  std::map<std::pair<Node, Node>, std::int64_t> counts;
  std::vector<Node> path;
  std::vector<char> on_path(static_cast<std::size_t>(g.n()), 0);
  std::function<void(Node)> walk = [&](Node u) {
    if (static_cast<int>(path.size()) == length + 1) {
      if (path.front() < path.back()) ++counts[{path.front(), path.back()}];
      return;
    }
    for (Node v : g.neighbors(u)) {
      if (on_path[static_cast<std::size_t>(v)]) continue;
      on_path[static_cast<std::size_t>(v)] = 1;
      path.push_back(v);
      walk(v);
      path.pop_back();
      on_path[static_cast<std::size_t>(v)] = 0;
    }
  };
  for (Node s = 0; s < g.n(); ++s) {
    path = {s};
    on_path[static_cast<std::size_t>(s)] = 1;
    walk(s);
    on_path[static_cast<std::size_t>(s)] = 0;
  }
  return counts;
}

/// Shortest cycle through edge deletion: for each edge (u,v), BFS from u to
/// v without using that edge. Returns 0 for a forest.
inline int girth_oracle(const Graph& g) {
  int best = 0;
  for (const auto& [u, v] : g.edges()) {
    std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
    std::vector<Node> frontier{u};
    dist[static_cast<std::size_t>(u)] = 0;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const Node a = frontier[head];
      for (Node w : g.neighbors(a)) {
        if ((a == u && w == v) || (a == v && w == u)) continue;
        if (dist[static_cast<std::size_t>(w)] >= 0) continue;
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(a)] + 1;
        frontier.push_back(w);
      }
    }
    const int d = dist[static_cast<std::size_t>(v)];
    if (d >= 0 && (best == 0 || d + 1 < best)) best = d + 1;
  }
  return best;
}

/// Dense transition matrix over all 2^n configurations for the WIS kernel
/// (update probabilities from update_oracle).
inline Eigen::MatrixXd dense_kernel(const Graph& g, double b, double c, double eps) {
  const int n = g.n();
  const std::size_t states = std::size_t{1} << n;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  for (std::size_t s = 0; s < states; ++s) {
    const auto x = Configuration::from_mask(n, s);
    for (Node i = 0; i < n; ++i) {
      const double up = update_oracle(g, x, i, b, c, eps);
      const std::size_t on = s | (std::size_t{1} << i);
      const std::size_t off = s & ~(std::size_t{1} << i);
      p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(on)) += up / n;
      p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(off)) += (1.0 - up) / n;
    }
  }
  return p;
}

/// Fixation probability per state by a dense solve of (I - P) h = 0 with
/// h(all-one) = 1, h(all-zero) = 0.
inline Eigen::VectorXd dense_fixation(const Eigen::MatrixXd& p) {
  const Eigen::Index m = p.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - p;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index e : {Eigen::Index{0}, m - 1}) {
    a.row(e).setZero();
    a(e, e) = 1.0;
  }
  rhs(m - 1) = 1.0;
  return a.partialPivLu().solve(rhs);
}

/// E_a[T_target] for every a: dense Gaussian elimination (partial pivoting)
/// of the hitting equations with the target row pinned to 0. Quad precision,
/// because slow chains make the system badly conditioned.
inline std::vector<double> hitting_oracle(const wis::BirthDeathChain& chain, int target) {
  using Q = __float128;
  const int m = chain.size() + 1;
  std::vector<std::vector<Q>> a(static_cast<std::size_t>(m), std::vector<Q>(static_cast<std::size_t>(m) + 1, 0));
  for (int j = 0; j < m; ++j) {
    auto& row = a[static_cast<std::size_t>(j)];
    const auto u = static_cast<std::size_t>(j);
    row[u] = 1;
    if (j == target) continue;
    row[static_cast<std::size_t>(m)] = 1;
    const Q up = chain.up[u];
    const Q down = chain.down[u];
    if (j + 1 < m) row[u + 1] -= up;
    if (j > 0) row[u - 1] -= down;
    row[u] -= 1 - up - down;
  }
  auto mag = [](Q v) { return v < 0 ? -v : v; };
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r) {
      if (mag(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
          mag(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)])) {
        pivot = r;
      }
    }
    std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
    const auto& prow = a[static_cast<std::size_t>(col)];
    for (int r = col + 1; r < m; ++r) {
      auto& row = a[static_cast<std::size_t>(r)];
      const Q factor = row[static_cast<std::size_t>(col)] / prow[static_cast<std::size_t>(col)];
      if (factor == 0) continue;
      for (int c = col; c <= m; ++c) row[static_cast<std::size_t>(c)] -= factor * prow[static_cast<std::size_t>(c)];
    }
  }
  std::vector<Q> h(static_cast<std::size_t>(m), 0);
  for (int r = m - 1; r >= 0; --r) {
    const auto& row = a[static_cast<std::size_t>(r)];
    Q acc = row[static_cast<std::size_t>(m)];
    for (int c = r + 1; c < m; ++c) acc -= row[static_cast<std::size_t>(c)] * h[static_cast<std::size_t>(c)];
    h[static_cast<std::size_t>(r)] = acc / row[static_cast<std::size_t>(r)];
  }
  return {h.begin(), h.end()};
}

}  // namespace testing
