#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wis/birth_death.hpp"
#include "wis/dynamics.hpp"
#include "wis/graph.hpp"

namespace wis {

/// Expected one-step change of the cooperator count when the payoff-biased
/// (PD) kernel is applied once, written as sums over neighbours and short
/// paths. Requires k(b+c) < 1.
double one_step_drift(const Graph& g, const Configuration& x, const Params& params);

/// Same quantity from the kernel itself: (1/n) sum_i [P(x_i -> 1) - x_i]
/// with the rule forced to PD.
double brute_force_drift(const Graph& g, const Configuration& x, const Params& params);

/// (1/n) sum_i [P(x_i -> 1) - x_i] under params.rule as given.
double expected_drift(const Graph& g, const Configuration& x, const Params& params);

/// PD drift on K_n with y cooperators.
double drift_complete(int n, int y, double b, double c);

/// PD drift on K_{n/2,n/2} with y1, y2 cooperators on the two sides.
double drift_bipartite(int n, int y1, int y2, double b, double c);

/// Indexed by configuration bitmask (bit i = node i).
struct AbsorptionResult {
  int n = 0;
  std::vector<double> pi_by_state;
  std::vector<double> expected_time_by_state;
  double max_residual = 0.0;
};

constexpr int kDefaultAbsorptionCap = 20;

/// Solves the absorption equations over all 2^n configurations with the
/// exact kernel of params.rule. Throws instance_too_large above `size_cap`
/// and numerical_failure when the residual stays above 1e-12 after
/// iterative refinement.
AbsorptionResult absorption_probabilities(const Graph& g, const Params& params,
                                          int size_cap = kDefaultAbsorptionCap);

/// Average of pi over the configurations in which exactly one edge is
/// cooperating (the random adjacent pair start).
double adjacent_pair_fixation(const Graph& g, const AbsorptionResult& result);

std::string absorption_csv(const AbsorptionResult& result);

/// Probabilities of moving the cooperator count up / down by one from x.
struct CountTransition {
  double up = 0.0;
  double down = 0.0;
};
CountTransition count_transition(const Graph& g, const Configuration& x, const Params& params);

/// Cooperator-count chain of K_n, exact by symmetry. The graph overload
/// throws unsupported unless g is complete.
BirthDeathChain lump_complete_graph_chain(int n, const Params& params);
BirthDeathChain lump_complete_graph_chain(const Graph& g, const Params& params);

}  // namespace wis
