#include "wis/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "wis/error.hpp"

namespace wis {

double one_step_drift(const Graph& g, const Configuration& x, const Params& params) {
  if (!(g.k() * (params.b + params.c) < 1.0)) {
    throw Error(ErrorKind::precondition_violation, "drift formula needs k(b+c) < 1");
  }
  const double k = g.k();
  const double b = params.b;
  const double c = params.c;
  double total = 0.0;
  for (Node i = 0; i < g.n(); ++i) {
    double coop_neighbors = 0.0;
    double coop_edges_beyond = 0.0;   // j ~ i, l ~ j, l != i, x_l x_j
    double coop_neighbor_pairs = 0.0; // j ~ i, h ~ i, h != j, x_h x_j
    double coop_three_paths = 0.0;    // j ~ i, h ~ i, h != j, g ~ h, g != i, x_g x_j
    auto nbrs = g.neighbors(i);
    for (Node j : nbrs) {
      if (!x[j]) continue;
      coop_neighbors += 1.0;
      for (Node l : g.neighbors(j)) {
        if (l != i && x[l]) coop_edges_beyond += 1.0;
      }
      for (Node h : nbrs) {
        if (h == j) continue;
        if (x[h]) coop_neighbor_pairs += 1.0;
        for (Node gg : g.neighbors(h)) {
          if (gg != i && x[gg]) coop_three_paths += 1.0;
        }
      }
    }
    total += -(k - 1.0) * c * coop_neighbors + (k - 1.0) * b / k * coop_edges_beyond +
             c * coop_neighbor_pairs - b / k * coop_three_paths;
  }
  return total / (g.n() * k);
}

double expected_drift(const Graph& g, const Configuration& x, const Params& params) {
  double total = 0.0;
  for (Node i = 0; i < g.n(); ++i) total += update_probability(g, x, i, params) - (x[i] ? 1.0 : 0.0);
  return total / g.n();
}

double brute_force_drift(const Graph& g, const Configuration& x, const Params& params) {
  Params pd = params;
  pd.rule = Rule::pd;
  return expected_drift(g, x, pd);
}

double drift_complete(int n, int y, double b, double c) {
  if (n < 2 || y < 0 || y > n) throw Error(ErrorKind::invalid_parameter, "need n >= 2 and 0 <= y <= n");
  const double nn = n;
  return -((nn - 2.0) / (nn * (nn - 1.0) * (nn - 1.0))) * (b + (nn - 1.0) * c) * y * (nn - y);
}

double drift_bipartite(int n, int y1, int y2, double /*b*/, double c) {
  if (n < 4 || n % 2 != 0) throw Error(ErrorKind::invalid_parameter, "need even n >= 4");
  const int half = n / 2;
  if (y1 < 0 || y2 < 0 || y1 > half || y2 > half) {
    throw Error(ErrorKind::invalid_parameter, "side counts must lie in [0, n/2]");
  }
  // The benefit cancels: every node on one side sees the same neighbourhood.
  const double h = half;
  const double bracket = (h - y1 + y2) * y1 * (h - y2) + (h - y2 + y1) * y2 * (h - y1);
  return -(c / (static_cast<double>(n) * h)) * bracket;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Direct solve followed by iterative refinement until the residual meets
// 1e-12 relative to max(1, |x|).
Eigen::VectorXd solve_refined(const SparseMatrix& a, const Eigen::SparseLU<SparseMatrix>& lu,
                              const Eigen::VectorXd& rhs, double& residual_out) {
  Eigen::VectorXd x = lu.solve(rhs);
  for (int round = 0;; ++round) {
    Eigen::VectorXd r = rhs - a * x;
    residual_out = inf_norm(r);
    if (residual_out <= 1e-12 * std::max(1.0, inf_norm(x))) return x;
    if (round == 8) {
      throw Error(ErrorKind::numerical_failure, fmt::format("absorption residual {:.3g} above 1e-12", residual_out));
    }
    x += lu.solve(r);
  }
}

}  // namespace

AbsorptionResult absorption_probabilities(const Graph& g, const Params& params, int size_cap) {
  const int n = g.n();
  if (n > size_cap || n > 30) {
    throw Error(ErrorKind::instance_too_large,
                fmt::format("exact absorption needs n <= {} (got {})", std::min(size_cap, 30), n));
  }
  params.validate_for(g);
  const std::uint64_t states = std::uint64_t{1} << n;
  const std::uint64_t all_one = states - 1;
  const auto transient = static_cast<Eigen::Index>(states - 2);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(transient) * (static_cast<std::size_t>(n) + 1));
  Eigen::VectorXd rhs_pi = Eigen::VectorXd::Zero(transient);
  Eigen::VectorXd rhs_time = Eigen::VectorXd::Ones(transient);

  for (std::uint64_t mask = 1; mask < all_one; ++mask) {
    const auto row = static_cast<Eigen::Index>(mask - 1);
    const auto x = Configuration::from_mask(n, mask);
    double leave = 0.0;
    for (Node i = 0; i < n; ++i) {
      const double p = update_probability(g, x, i, params);
      const double flip = (x[i] ? 1.0 - p : p) / n;
      if (flip == 0.0) continue;
      leave += flip;
      const std::uint64_t target = mask ^ (std::uint64_t{1} << i);
      if (target == all_one) {
        rhs_pi[row] += flip;
      } else if (target != 0) {
        triplets.emplace_back(row, static_cast<Eigen::Index>(target - 1), -flip);
      }
    }
    triplets.emplace_back(row, row, leave);
  }
  SparseMatrix a(transient, transient);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical_failure, "absorption system is singular: " + lu.lastErrorMessage());
  }
  AbsorptionResult result;
  result.n = n;
  double residual_pi = 0.0;
  double residual_time = 0.0;
  const Eigen::VectorXd pi = solve_refined(a, lu, rhs_pi, residual_pi);
  const Eigen::VectorXd time = solve_refined(a, lu, rhs_time, residual_time);
  result.max_residual = std::max(residual_pi, residual_time);

  result.pi_by_state.assign(states, 0.0);
  result.expected_time_by_state.assign(states, 0.0);
  result.pi_by_state[all_one] = 1.0;
  for (std::uint64_t mask = 1; mask < all_one; ++mask) {
    const auto row = static_cast<Eigen::Index>(mask - 1);
    result.pi_by_state[mask] = std::clamp(pi[row], 0.0, 1.0);
    result.expected_time_by_state[mask] = std::max(time[row], 0.0);
  }
  return result;
}

double adjacent_pair_fixation(const Graph& g, const AbsorptionResult& result) {
  double total = 0.0;
  for (auto [u, v] : g.edges()) {
    total += result.pi_by_state[(std::uint64_t{1} << u) | (std::uint64_t{1} << v)];
  }
  return total / static_cast<double>(g.edge_count());
}

std::string absorption_csv(const AbsorptionResult& result) {
  std::string out = "mask,cooperators,pi,expected_time\n";
  for (std::size_t mask = 0; mask < result.pi_by_state.size(); ++mask) {
    out += fmt::format("{},{},{:.17g},{:.17g}\n", mask, std::popcount(mask), result.pi_by_state[mask],
                       result.expected_time_by_state[mask]);
  }
  return out;
}

CountTransition count_transition(const Graph& g, const Configuration& x, const Params& params) {
  CountTransition t;
  for (Node i = 0; i < g.n(); ++i) {
    const double p = update_probability(g, x, i, params);
    if (x[i]) {
      t.down += (1.0 - p) / g.n();
    } else {
      t.up += p / g.n();
    }
  }
  return t;
}

BirthDeathChain lump_complete_graph_chain(const Graph& g, const Params& params) {
  if (g.k() != g.n() - 1) {
    throw Error(ErrorKind::unsupported, "cooperator-count lumping is exact only on complete graphs");
  }
  params.validate_for(g);
  const int n = g.n();
  BirthDeathChain chain(n);
  Configuration x(n);
  for (int j = 0; j <= n; ++j) {
    if (j > 0) x.set(j - 1, true);
    const auto t = count_transition(g, x, params);
    chain.up[static_cast<std::size_t>(j)] = t.up;
    chain.down[static_cast<std::size_t>(j)] = t.down;
  }
  chain.validate();
  return chain;
}

BirthDeathChain lump_complete_graph_chain(int n, const Params& params) {
  return lump_complete_graph_chain(build_complete(n), params);
}

}  // namespace wis
