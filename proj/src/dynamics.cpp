#include "wis/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "wis/error.hpp"

namespace wis {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::voter: return "vm";
    case Rule::pd: return "pd";
    case Rule::wis: return "wis";
    case Rule::nowak: return "nowak";
  }
  return "?";
}

Rule parse_rule(std::string_view text) {
  if (text == "vm" || text == "voter") return Rule::voter;
  if (text == "pd") return Rule::pd;
  if (text == "wis") return Rule::wis;
  if (text == "nowak") return Rule::nowak;
  throw Error(ErrorKind::invalid_parameter, "unknown rule \"" + std::string(text) + "\"");
}

double Params::effective_epsilon() const noexcept {
  switch (rule) {
    case Rule::voter: return 0.0;
    case Rule::pd: return 1.0;
    default: return epsilon;
  }
}

void Params::validate_for(const Graph& g) const {
  if (!(b >= 0.0) || !(c >= 0.0)) throw Error(ErrorKind::invalid_parameter, "b and c must be >= 0");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "epsilon must lie in [0,1]");
  }
  if (!(g.k() * (b + c) < 1.0)) {
    throw Error(ErrorKind::precondition_violation,
                "k(b+c) = " + std::to_string(g.k() * (b + c)) + " must be < 1");
  }
}

Configuration::Configuration(int n, bool value)
    : actions_(static_cast<std::size_t>(n), value ? 1 : 0), coop_count_(value ? n : 0) {}

Configuration Configuration::from_mask(int n, std::uint64_t mask) {
  Configuration x(n);
  for (int i = 0; i < n; ++i) x.set(i, ((mask >> i) & 1U) != 0);
  return x;
}

Configuration Configuration::from_string(std::string_view bits) {
  Configuration x(static_cast<int>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw Error(ErrorKind::invalid_parameter, "configuration must be a 0/1 string");
    }
    x.set(static_cast<Node>(i), bits[i] == '1');
  }
  return x;
}

void Configuration::set(Node i, bool value) {
  auto& slot = actions_[static_cast<std::size_t>(i)];
  coop_count_ += static_cast<int>(value) - static_cast<int>(slot);
  slot = value ? 1 : 0;
}

std::uint64_t Configuration::to_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < actions_.size() && i < 64; ++i) {
    if (actions_[i]) mask |= std::uint64_t{1} << i;
  }
  return mask;
}

std::string Configuration::to_string() const {
  std::string s;
  for (auto a : actions_) s.push_back(a ? '1' : '0');
  return s;
}

double payoff(const Graph& g, const Configuration& x, Node i, const Params& params) {
  int coop_neighbors = 0;
  for (Node j : g.neighbors(i)) coop_neighbors += x[j];
  return -g.k() * params.c * x[i] + params.b * coop_neighbors;
}

namespace {

// U_h for every neighbour h of i, plus their mean.
struct NeighborPayoffs {
  std::vector<double> values;
  double mean = 0.0;
};

NeighborPayoffs neighbor_payoffs(const Graph& g, const Configuration& x, Node i, const Params& params) {
  NeighborPayoffs out;
  auto nbrs = g.neighbors(i);
  out.values.reserve(nbrs.size());
  double total = 0.0;
  for (Node h : nbrs) {
    out.values.push_back(payoff(g, x, h, params));
    total += out.values.back();
  }
  out.mean = total / g.k();
  return out;
}

void require_weak_payoffs(const Graph& g, const Params& params) {
  if (!(g.k() * (params.b + params.c) < 1.0)) {
    throw Error(ErrorKind::precondition_violation, "biased sampling needs k(b+c) < 1");
  }
}

}  // namespace

NeighborDistribution biased_sampling_distribution(const Graph& g, const Configuration& x, Node i,
                                                  const Params& params) {
  require_weak_payoffs(g, params);
  auto u = neighbor_payoffs(g, x, i, params);
  NeighborDistribution dist;
  dist.probabilities.reserve(u.values.size());
  for (double uj : u.values) dist.probabilities.push_back((uj + 1.0 - u.mean) / g.k());
  return dist;
}

double coop_update_probability(const Graph& g, const Configuration& x, Node i, const Params& params) {
  const double eps = params.effective_epsilon();
  auto nbrs = g.neighbors(i);
  if (eps == 0.0) {
    int coop = 0;
    for (Node j : nbrs) coop += x[j];
    return static_cast<double>(coop) / g.k();
  }
  auto u = neighbor_payoffs(g, x, i, params);
  double total = 0.0;
  for (std::size_t idx = 0; idx < nbrs.size(); ++idx) {
    if (x[nbrs[idx]]) total += 1.0 - eps + eps * (u.values[idx] + 1.0 - u.mean);
  }
  // Rounding can overshoot 1 by an ulp when every neighbour cooperates.
  return std::clamp(total / g.k(), 0.0, 1.0);
}

double nowak_update_probability(const Graph& g, const Configuration& x, Node i, const Params& params) {
  const double eps = params.epsilon;
  auto nbrs = g.neighbors(i);
  double numerator = 0.0;
  double denominator = 0.0;
  for (Node j : nbrs) {
    const double fitness = (1.0 - eps) + eps * payoff(g, x, j, params);
    denominator += fitness;
    if (x[j]) numerator += fitness;
  }
  if (!(denominator > 0.0)) {
    throw Error(ErrorKind::degenerate_fitness, "total neighbour fitness is not positive");
  }
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

double update_probability(const Graph& g, const Configuration& x, Node i, const Params& params) {
  if (params.rule == Rule::nowak) return nowak_update_probability(g, x, i, params);
  return coop_update_probability(g, x, i, params);
}

namespace {

std::size_t inverse_cdf(const std::vector<double>& weights, double total, double u) {
  const double target = u * total;
  double cumulative = 0.0;
  for (std::size_t idx = 0; idx < weights.size(); ++idx) {
    cumulative += weights[idx];
    if (target < cumulative) return idx;
  }
  // Rounding can leave target == total; take the last positive weight.
  for (std::size_t idx = weights.size(); idx-- > 0;) {
    if (weights[idx] > 0.0) return idx;
  }
  return weights.size() - 1;
}

}  // namespace

StepTrace step(const Graph& g, Configuration& x, const Params& params, Rng& rng) {
  StepTrace trace;
  trace.updater = static_cast<Node>(rng.below(static_cast<std::uint64_t>(g.n())));
  const double selector_draw = rng.uniform();
  const double neighbor_draw = rng.uniform();
  auto nbrs = g.neighbors(trace.updater);
  const auto k = nbrs.size();

  std::size_t pick = 0;
  if (params.rule == Rule::nowak) {
    const double eps = params.epsilon;
    std::vector<double> fitness;
    fitness.reserve(k);
    double total = 0.0;
    for (Node j : nbrs) {
      fitness.push_back((1.0 - eps) + eps * payoff(g, x, j, params));
      if (fitness.back() < 0.0) throw Error(ErrorKind::degenerate_fitness, "negative fitness");
      total += fitness.back();
    }
    if (!(total > 0.0)) throw Error(ErrorKind::degenerate_fitness, "total neighbour fitness is not positive");
    pick = inverse_cdf(fitness, total, neighbor_draw);
  } else {
    trace.selector = selector_draw < params.effective_epsilon();
    if (trace.selector) {
      auto dist = biased_sampling_distribution(g, x, trace.updater, params);
      pick = inverse_cdf(dist.probabilities, 1.0, neighbor_draw);
    } else {
      pick = std::min(k - 1, static_cast<std::size_t>(neighbor_draw * static_cast<double>(k)));
    }
  }
  trace.sampled_neighbor = nbrs[pick];
  trace.new_action = x[trace.sampled_neighbor];
  x.set(trace.updater, trace.new_action);
  return trace;
}

Configuration random_adjacent_pair_init(const Graph& g, Rng& rng) {
  const auto& edges = g.edges();
  const auto [u, v] = edges[static_cast<std::size_t>(rng.below(edges.size()))];
  Configuration x(g.n());
  x.set(u, true);
  x.set(v, true);
  return x;
}

}  // namespace wis
