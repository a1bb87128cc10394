// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Each criterion also has a wall-clock budget.

#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "support.hpp"
#include "wis/birth_death.hpp"
#include "wis/correlations.hpp"
#include "wis/exact.hpp"
#include "wis/montecarlo.hpp"

using namespace wis;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Verdict()> body;
};

RunOptions run_options(std::uint64_t trials, std::uint64_t seed) {
  RunOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

std::vector<Graph> random_regular_family(testing::Gen& gen, int count) {
  std::vector<Graph> graphs;
  for (int i = 0; i < count; ++i) {
    RandomRegularOptions opts;
    opts.seed = gen.engine();
    const int k = gen.integer(2, 5);
    int n = gen.integer(k + 1, 16);
    if ((n * k) % 2 != 0) ++n;
    graphs.push_back(build_random_regular(n, k, opts));
  }
  return graphs;
}

Verdict kernel_validity() {
  Verdict v;
  testing::Gen gen(101);
  double worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Graph g = gen.graph();
    const Params p = gen.params(g.k(), Rule::wis, gen.real(0, 1));
    const auto x = gen.config(g.n());
    const Node i = gen.integer(0, g.n() - 1);
    double total = 0;
    for (double q : biased_sampling_distribution(g, x, i, p).probabilities) {
      v.require(q >= 0 && q <= 1, fmt::format("entry {} outside [0,1] at instance {}", q, trial));
      total += q;
    }
    worst = std::max(worst, std::abs(total - 1));
    const double up = coop_update_probability(g, x, i, p);
    v.require(up >= 0 && up <= 1, fmt::format("update probability {} outside [0,1]", up));
  }
  v.require(worst <= 1e-12, fmt::format("normalisation error {:.3g}", worst));
  if (v.pass) v.detail = fmt::format("500 instances, max |sum-1| = {:.2g}", worst);
  return v;
}

Verdict zero_voter_drift() {
  Verdict v;
  testing::Gen gen(202);
  double worst = 0;
  const auto graphs = random_regular_family(gen, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph& g = graphs[static_cast<std::size_t>(trial % 40)];
    const Params p{0.1 / g.k(), 0.05 / g.k(), 0.0, Rule::voter};
    worst = std::max(worst, std::abs(expected_drift(g, gen.config(g.n()), p)));
  }
  v.require(worst <= 1e-12, fmt::format("max |drift| = {:.3g}", worst));
  if (v.pass) v.detail = fmt::format("200 configurations, max |drift| = {:.2g}", worst);
  return v;
}

Verdict drift_formula() {
  Verdict v;
  testing::Gen gen(303);
  double worst = 0;
  const std::vector<std::function<Graph()>> families{
      [&] { return build_complete(gen.integer(3, 10)); },
      [&] { return build_complete_bipartite(2 * gen.integer(2, 6)); },
      [&] { return build_cycle(gen.integer(3, 30)); },
      [&] { return builtin_named("mcgee"); },
      [&] {
        RandomRegularOptions opts;
        opts.seed = gen.engine();
        return build_random_regular(2 * gen.integer(3, 20), 3, opts);
      }};
  for (const auto& family : families) {
    for (int trial = 0; trial < 100; ++trial) {
      const Graph g = family();
      const Params p = gen.params(g.k(), Rule::pd, 1.0);
      const auto x = gen.config(g.n());
      worst = std::max(worst, std::abs(one_step_drift(g, x, p) - brute_force_drift(g, x, p)));
    }
  }
  v.require(worst <= 1e-12, fmt::format("max difference {:.3g}", worst));
  if (v.pass) v.detail = fmt::format("5 families x 100, max difference {:.2g}", worst);
  return v;
}

double mean_pi_two_cooperators(const AbsorptionResult& r, double& worst_single) {
  double sum = 0;
  int count = 0;
  for (std::uint64_t s = 0; s < r.pi_by_state.size(); ++s) {
    if (std::popcount(s) != 2) continue;
    sum += r.pi_by_state[s];
    worst_single = std::max(worst_single, r.pi_by_state[s]);
    ++count;
  }
  return sum / count;
}

Verdict complete_graph() {
  Verdict v;
  double worst = 0, max_drift = -1, excess = -1;
  for (int n = 3; n <= 8; ++n) {
    const Graph g = build_complete(n);
    const Params p{0.5 / (n - 1), 0.25 / (n - 1), 1.0, Rule::pd};
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      const auto x = Configuration::from_mask(n, s);
      const double d = drift_complete(n, x.coop_count(), p.b, p.c);
      worst = std::max(worst, std::abs(d - brute_force_drift(g, x, p)));
      max_drift = std::max(max_drift, d);
    }
    for (double eps : {0.01, 0.1}) {
      const auto r = absorption_probabilities(g, Params{p.b, p.c, eps, Rule::wis});
      double single = 0;
      mean_pi_two_cooperators(r, single);
      excess = std::max(excess, single - 2.0 / n);
    }
  }
  v.require(worst <= 1e-12, fmt::format("formula vs brute force {:.3g}", worst));
  v.require(max_drift <= 0, fmt::format("positive drift {:.3g}", max_drift));
  v.require(excess <= 1e-10, fmt::format("pi exceeds 2/n by {:.3g}", excess));
  if (v.pass) {
    v.detail = fmt::format("max difference {:.2g}, max drift {:.2g}, max pi - 2/n = {:.3g}", worst, max_drift, excess);
  }
  return v;
}

Verdict complete_bipartite() {
  Verdict v;
  double worst = 0, max_drift = -1, excess = -1;
  for (int m = 2; m <= 4; ++m) {
    const int n = 2 * m;
    const Graph g = build_complete_bipartite(n);
    const Params p{0.5 / m, 0.25 / m, 1.0, Rule::pd};
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      const auto x = Configuration::from_mask(n, s);
      int y1 = 0;
      for (Node i = 0; i < m; ++i) y1 += x[i] ? 1 : 0;
      const double d = drift_bipartite(n, y1, x.coop_count() - y1, p.b, p.c);
      worst = std::max(worst, std::abs(d - brute_force_drift(g, x, p)));
      max_drift = std::max(max_drift, d);
    }
    if (m <= 3) {
      for (double eps : {0.01, 0.1}) {
        const auto r = absorption_probabilities(g, Params{p.b, p.c, eps, Rule::wis});
        double single = 0;
        mean_pi_two_cooperators(r, single);
        excess = std::max(excess, single - 2.0 / n);
      }
    }
  }
  v.require(worst <= 1e-12, fmt::format("formula vs brute force {:.3g}", worst));
  v.require(max_drift <= 0, fmt::format("positive drift {:.3g}", max_drift));
  v.require(excess <= 1e-10, fmt::format("pi exceeds 2/n by {:.3g}", excess));
  if (v.pass) {
    v.detail = fmt::format("max difference {:.2g}, max drift {:.2g}, max pi - 2/n = {:.3g}", worst, max_drift, excess);
  }
  return v;
}

Verdict voter_martingale() {
  Verdict v;
  const std::vector<std::pair<std::string, Graph>> graphs{
      {"K4", build_complete(4)},          {"K8", build_complete(8)},
      {"K12", build_complete(12)},        {"C5", build_cycle(5)},
      {"C8", build_cycle(8)},             {"C12", build_cycle(12)},
      {"K3,3", build_complete_bipartite(6)}, {"K6,6", build_complete_bipartite(12)},
      {"petersen", builtin_named("petersen")}};
  testing::Gen gen(606);
  double worst = 0, worst_z = 0;
  for (const auto& [name, g] : graphs) {
    const Params p{0.1 / g.k(), 0.05 / g.k(), 0.0, Rule::voter};
    const auto r = absorption_probabilities(g, p);
    for (int s = 0; s < 50; ++s) {
      const auto mask = static_cast<std::uint64_t>(gen.integer(0, (1 << g.n()) - 1));
      worst = std::max(worst, std::abs(r.pi_by_state[mask] - std::popcount(mask) / static_cast<double>(g.n())));
    }
    auto x0 = gen.config(g.n());
    if (is_absorbing(x0)) x0.set(0, !x0[0]);
    const auto est = estimate_fixation(g, InitPolicy::fixed(x0), p, run_options(100000, 6000 + g.n()));
    const double truth = x0.coop_count() / static_cast<double>(g.n());
    const double sigma = std::sqrt(truth * (1 - truth) / est.trials);
    const double z = std::abs(est.pi_hat - truth) / sigma;
    worst_z = std::max(worst_z, z);
    v.require(z <= 4, fmt::format("{}: Monte Carlo off by {:.2f} sigma", name, z));
  }
  v.require(worst <= 1e-10, fmt::format("exact pi off by {:.3g}", worst));
  if (v.pass) v.detail = fmt::format("9 graphs, exact max error {:.2g}, Monte Carlo max {:.2f} sigma", worst, worst_z);
  return v;
}

Verdict correlation_machinery() {
  Verdict v;
  const Graph g = builtin_named("mcgee");
  const auto paths = PathTable::build(g);
  auto field = init_field(g);
  Eigen::MatrixXd scratch;
  bool monotone = true;
  std::vector<AveragedCorrelations> at;
  for (int t = 0; t <= 10000; ++t) {
    const auto q = averaged_q(paths, field);
    monotone = monotone && q_monotone(q, 1e-14);
    if (t == 10 || t == 100) at.push_back(q);
    advance_field(g, field, scratch);
  }
  v.require(monotone, "(a) monotonicity violated");

  const TheoremParams theorem{24, 3, 3.0};
  DriftSeriesOptions one;
  one.max_steps = 1;
  const double d0 = drift_series(g, 0.09, 0.02, theorem, one).drifts.front();
  v.require(std::abs(d0) <= 1e-14, fmt::format("(b) E[Delta_0] = {:.3g}", d0));

  const auto series = drift_series(g, 0.25, 0.02, theorem);
  double lo = 1, hi = 0;
  for (double d : series.drifts) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  v.require(lo >= 0 && hi <= 1, fmt::format("(c) drift range [{:.3g}, {:.3g}]", lo, hi));

  const auto est = empirical_averaged_q(g, InitPolicy::random_adjacent_pair(), Params{0, 0, 0, Rule::voter},
                                        {10, 100}, run_options(100000, 707));
  double worst_z = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t d = 0; d <= 4; ++d) {
      const double diff = std::abs(est.mean[c][d] - at[c].q[d]);
      const double se = est.stderr_[c][d];
      const double z = se > 0 ? diff / se : (diff > 1e-12 ? 1e9 : 0.0);
      worst_z = std::max(worst_z, z);
    }
  }
  v.require(worst_z <= 3, fmt::format("(d) Monte Carlo q off by {:.2f} sigma", worst_z));
  if (v.pass) {
    v.detail = fmt::format("monotone to 1e4, E[Delta_0] = {:.2g}, drift in [{:.2g}, {:.3g}], MC max {:.2f} sigma", d0,
                           lo, hi, worst_z);
  }
  return v;
}

Verdict lemma2() {
  Verdict v;
  const auto series = drift_series(builtin_named("mcgee"), 0.25, 0.02, TheoremParams{24, 3, 3.0});
  const double bound = lemma2_lower_bound(3, 0.25, 0.02);
  v.require(std::abs(bound - 8.0 / 7 * 0.16) <= 1e-14, fmt::format("bound {:.17g}", bound));
  v.require(series.cumulative_sum >= bound, fmt::format("cumulative {:.6g} < bound {:.6g}", series.cumulative_sum, bound));
  if (v.pass) {
    v.detail = fmt::format("cumulative drift {:.6g} >= {:.6g} (T* = {}, {} steps evaluated)", series.cumulative_sum,
                           bound, series.steps, series.drifts.size());
  }
  return v;
}

Verdict death_birth() {
  Verdict v;
  testing::Gen gen(909);
  double worst_rel = 0, worst_balance = 0, worst_lump = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int size = gen.integer(1, 50);
    BirthDeathChain chain(size);
    for (int j = 0; j <= size; ++j) {
      const double total = gen.real(0.05, 1.0);
      const double split = gen.real(0.05, 0.95);
      if (j < size) chain.up[static_cast<std::size_t>(j)] = total * (j > 0 ? split : 1.0);
      if (j > 0) chain.down[static_cast<std::size_t>(j)] = total * (j < size ? 1.0 - split : 1.0);
    }
    const auto pi = bd_stationary(chain);
    for (int j = 0; j < size; ++j) {
      const auto u = static_cast<std::size_t>(j);
      worst_balance = std::max(worst_balance, std::abs(pi[u] * chain.up[u] - pi[u + 1] * chain.down[u + 1]));
    }
    const auto times = bd_hitting_times(chain);
    const int m = size + 1;
    for (int target = 0; target < m; ++target) {
      const auto h = testing::hitting_oracle(chain, target);
      for (int from = 0; from < m; ++from) {
        const double want = h[static_cast<std::size_t>(from)];
        const double rel = std::abs(times.at(from, target) - want) / std::max(1.0, std::abs(want));
        worst_rel = std::max(worst_rel, rel);
      }
    }
  }
  for (int n = 2; n <= 10; ++n) {
    const Graph g = build_complete(n);
    for (double eps : {0.0, 0.1, 0.5}) {
      const Params p{0.4 / (n - 1), 0.2 / (n - 1), eps, Rule::wis};
      const auto chain = lump_complete_graph_chain(g, p);
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        const auto x = Configuration::from_mask(n, s);
        const auto t = count_transition(g, x, p);
        const auto y = static_cast<std::size_t>(x.coop_count());
        worst_lump = std::max({worst_lump, std::abs(t.up - chain.up[y]), std::abs(t.down - chain.down[y])});
      }
    }
  }
  v.require(worst_rel <= 1e-10, fmt::format("hitting times off by rel {:.3g}", worst_rel));
  v.require(worst_balance <= 1e-12, fmt::format("detailed balance off by {:.3g}", worst_balance));
  v.require(worst_lump <= 1e-12, fmt::format("lumping off by {:.3g}", worst_lump));
  if (v.pass) {
    v.detail = fmt::format("hitting rel {:.2g}, balance {:.2g}, lumping {:.2g}", worst_rel, worst_balance, worst_lump);
  }
  return v;
}

Verdict hitting_bound() {
  Verdict v;
  std::ostringstream notes;
  for (const char* family : {"cycle", "complete"}) {
    for (int n : {8, 16, 32}) {
      const Graph g = std::string(family) == "cycle" ? build_cycle(n) : build_complete(n);
      const auto est = estimate_fixation(g, InitPolicy::random_uniform(), Params{0, 0, 0, Rule::voter},
                                         run_options(10000, 1000 + n));
      const double bound = g.k() * n * n / 4.0;
      const double mean = est.mean_absorption_steps;
      const double se = est.absorption_steps_stderr;
      const bool ok = mean <= bound + 3 * se && est.capped_fraction == 0;
      notes << fmt::format(" {}{}: {:.1f}+-{:.1f} vs {:.0f}{};", family == std::string("cycle") ? "C" : "K", n, mean,
                           se, bound, ok ? "" : " FAIL");
      v.require(ok, "");
      std::cout << fmt::format("       info {}{}: mean steps {:.2f} (SE {:.2f}), per-node time {:.2f}, bound {:.0f}\n",
                               family == std::string("cycle") ? "C" : "K", n, mean, se, mean / n, bound);
    }
  }
  v.detail = notes.str();
  return v;
}

Verdict nowak_agreement() {
  Verdict v;
  testing::Gen gen(1111);
  double worst_ratio = 0;
  for (double eps : {1e-2, 1e-3}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Graph g = gen.graph();
      Params p = gen.params(g.k(), Rule::wis, eps);
      const auto x = gen.config(g.n());
      const Node i = gen.integer(0, g.n() - 1);
      const double w = coop_update_probability(g, x, i, p);
      p.rule = Rule::nowak;
      const double gap = std::abs(nowak_update_probability(g, x, i, p) - w);
      worst_ratio = std::max(worst_ratio, gap / (eps * eps));
    }
  }
  v.require(worst_ratio <= 2, fmt::format("gap reaches {:.3g} eps^2", worst_ratio));
  if (v.pass) v.detail = fmt::format("2000 instances, max gap {:.3g} eps^2", worst_ratio);
  return v;
}

Verdict reproducibility() {
  Verdict v;
  const std::vector<std::vector<std::string>> commands{
      {"simulate", "--graph", "petersen", "--epsilon", "0.2", "--trials", "20000", "--init", "uniform"},
      {"simulate", "--graph", "mcgee", "--rule", "vm", "--trace", "500", "50", "--trials", "2000"},
      {"sweep", "--mode", "mc", "--graph", "k6", "--graph", "cycle:8", "--b", "0.05", "--c", "0.02", "--epsilon",
       "0", "0.1", "--trials", "5000"},
      {"graph", "--random-regular", "60", "3", "--girth", "6"},
      {"corr", "--stride", "500"},
      {"exact", "--absorb", "--graph", "cycle:8", "--epsilon", "0.3"}};
  int compared = 0;
  for (auto args : commands) {
    args.insert(args.end(), {"--seed", "12345", "--deterministic"});
    std::string outputs[2];
    int i = 0;
    for (const char* threads : {"1", "4"}) {
      auto with = args;
      with.insert(with.end(), {"--threads", threads});
      std::ostringstream out, err;
      const int code = cli::run(with, out, err);
      v.require(code == 0, fmt::format("{} exited {}: {}", args[0], code, err.str()));
      outputs[i++] = out.str();
    }
    v.require(outputs[0] == outputs[1], fmt::format("{} output differs between 1 and 4 threads", args[0]));
    ++compared;
  }
  if (v.pass) v.detail = fmt::format("{} commands byte-identical at 1 and 4 threads", compared);
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "kernel validity", 1.0, kernel_validity},
      {2, "zero voter drift", 1.0, zero_voter_drift},
      {3, "drift formula vs brute force", 5.0, drift_formula},
      {4, "complete graph drift and fixation", 30.0, complete_graph},
      {5, "complete bipartite drift and fixation", 30.0, complete_bipartite},
      {6, "voter martingale", 120.0, voter_martingale},
      {7, "correlation machinery", 300.0, correlation_machinery},
      {8, "cumulative drift lower bound", 600.0, lemma2},
      {9, "birth-death machinery", 60.0, death_birth},
      {10, "voter hitting-time bound k n^2/4", 120.0, hitting_bound},
      {11, "Nowak agreement within 2 eps^2", 1.0, nowak_agreement},
      {12, "reproducibility across thread counts", 120.0, reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = c.body();
    } catch (const std::exception& e) {
      verdict.pass = false;
      verdict.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      verdict.detail += fmt::format(" [over budget {:.0f} s]", c.budget_seconds);
      verdict.pass = false;
    }
    failures += verdict.pass ? 0 : 1;
    std::cout << fmt::format("{} C{:<2} {} ({:.2f} s): {}\n", verdict.pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                             verdict.detail)
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
