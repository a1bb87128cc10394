#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wis/graph.hpp"
#include "wis/rng.hpp"

namespace wis {

/// VM copies a uniform neighbour; PD samples by payoff; WIS mixes the two
/// with selector probability epsilon; Nowak is the fitness-proportional
/// death-birth comparison rule.
enum class Rule { voter, pd, wis, nowak };

std::string_view to_string(Rule rule);
Rule parse_rule(std::string_view text);

struct Params {
  double b = 0.0;
  double c = 0.0;
  double epsilon = 0.0;
  Rule rule = Rule::wis;

  /// Selector probability actually used: 0 for VM, 1 for PD.
  double effective_epsilon() const noexcept;
  /// b, c >= 0, epsilon in [0,1], and k(b+c) < 1 on `g`.
  void validate_for(const Graph& g) const;
};

/// Cooperate = 1, defect = 0.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int n, bool value = false);
  static Configuration from_mask(int n, std::uint64_t mask);
  /// "0110..." with character i giving node i.
  static Configuration from_string(std::string_view bits);

  int size() const noexcept { return static_cast<int>(actions_.size()); }
  bool operator[](Node i) const { return actions_[static_cast<std::size_t>(i)] != 0; }
  void set(Node i, bool value);
  int coop_count() const noexcept { return coop_count_; }
  std::uint64_t to_mask() const;
  std::string to_string() const;

  bool operator==(const Configuration&) const = default;

 private:
  std::vector<std::uint8_t> actions_;
  int coop_count_ = 0;
};

struct StepTrace {
  Node updater = -1;
  bool selector = false;
  Node sampled_neighbor = -1;
  bool new_action = false;
};

/// Probabilities aligned with `Graph::neighbors(i)`.
struct NeighborDistribution {
  std::vector<double> probabilities;
};

double payoff(const Graph& g, const Configuration& x, Node i, const Params& params);

/// Payoff-biased neighbour sampling used when the selector is 1. Throws
/// precondition_violation unless k(b+c) < 1.
NeighborDistribution biased_sampling_distribution(const Graph& g, const Configuration& x, Node i,
                                                  const Params& params);

/// P(x_i becomes 1 | i updates) under VM/PD/WIS. Does not depend on x_i.
double coop_update_probability(const Graph& g, const Configuration& x, Node i, const Params& params);

/// Fitness-proportional rule with fitness (1-eps) + eps*U_j. Throws
/// degenerate_fitness when the normaliser is not positive.
double nowak_update_probability(const Graph& g, const Configuration& x, Node i, const Params& params);

/// Dispatches on params.rule.
double update_probability(const Graph& g, const Configuration& x, Node i, const Params& params);

/// One asynchronous update, in place. Consumes exactly three draws from
/// `rng` (updater, selector, neighbour) regardless of the outcome.
StepTrace step(const Graph& g, Configuration& x, const Params& params, Rng& rng);

inline bool is_absorbing(const Configuration& x) {
  return x.coop_count() == 0 || x.coop_count() == x.size();
}

/// Both endpoints of a uniformly chosen edge cooperate, everyone else defects.
Configuration random_adjacent_pair_init(const Graph& g, Rng& rng);

}  // namespace wis
