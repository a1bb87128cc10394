#include "wis/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wis/correlations.hpp"
#include "wis/error.hpp"

namespace wis {

std::string_view to_string(Absorption a) {
  switch (a) {
    case Absorption::all_one: return "all_one";
    case Absorption::all_zero: return "all_zero";
    case Absorption::capped: return "capped";
  }
  return "?";
}

TrajectoryOutcome run_trajectory(const Graph& g, Configuration x, const Params& params, std::uint64_t max_steps,
                                 std::uint64_t seed, std::uint64_t trace_stride) {
  if (max_steps < 1) throw Error(ErrorKind::invalid_parameter, "max_steps must be >= 1");
  TrajectoryOutcome out;
  Rng rng(seed);
  auto record = [&](std::uint64_t t) {
    if (trace_stride > 0) out.trace_samples.emplace_back(t, x.coop_count());
  };
  record(0);
  std::uint64_t t = 0;
  while (!is_absorbing(x) && t < max_steps) {
    step(g, x, params, rng);
    ++t;
    if (trace_stride > 0 && t % trace_stride == 0) record(t);
  }
  if (trace_stride > 0 && t % trace_stride != 0) record(t);
  out.steps = t;
  if (x.coop_count() == x.size()) {
    out.absorbed_to = Absorption::all_one;
  } else if (x.coop_count() == 0) {
    out.absorbed_to = Absorption::all_zero;
  } else {
    out.absorbed_to = Absorption::capped;
  }
  return out;
}

std::string InitPolicy::describe() const {
  switch (kind_) {
    case Kind::random_adjacent_pair: return "random_adjacent_pair";
    case Kind::random_uniform: return "random_uniform";
    case Kind::fixed: return "fixed:" + fixed_.to_string();
  }
  return "?";
}

Configuration InitPolicy::draw(const Graph& g, Rng& rng) const {
  switch (kind_) {
    case Kind::random_adjacent_pair: return random_adjacent_pair_init(g, rng);
    case Kind::random_uniform: {
      Configuration x(g.n());
      for (Node i = 0; i < g.n(); ++i) x.set(i, (rng.next() >> 63) != 0);
      return x;
    }
    case Kind::fixed:
      if (fixed_.size() != g.n()) {
        throw Error(ErrorKind::invalid_parameter, "fixed configuration length does not match the graph");
      }
      return fixed_;
  }
  return fixed_;
}

std::uint64_t default_max_steps(const Graph& g) {
  const auto n = static_cast<std::uint64_t>(g.n());
  return 20 * static_cast<std::uint64_t>(g.k()) * n * n;
}

void for_each_trial(std::uint64_t trials, unsigned threads, const std::function<void(std::uint64_t)>& body) {
  threads = std::max(1U, threads);
  if (threads == 1 || trials < 2) {
    for (std::uint64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::uint64_t kChunk = 64;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= trials) return;
      const std::uint64_t end = std::min(trials, begin + kChunk);
      try {
        for (std::uint64_t t = begin; t < end; ++t) body(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  const auto count = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

namespace {

// Trials are processed in blocks: `produce` runs in parallel and fills one
// slot per trial, `consume` then folds the block sequentially in trial order.
template <class Slot, class Produce, class Consume>
void run_blocks(std::uint64_t trials, unsigned threads, Produce produce, Consume consume) {
  constexpr std::uint64_t kBlock = 8192;
  std::vector<Slot> slots;
  for (std::uint64_t begin = 0; begin < trials; begin += kBlock) {
    const std::uint64_t size = std::min(kBlock, trials - begin);
    slots.assign(size, Slot{});
    for_each_trial(size, threads, [&](std::uint64_t offset) { slots[offset] = produce(begin + offset); });
    for (std::uint64_t offset = 0; offset < size; ++offset) consume(begin + offset, slots[offset]);
  }
}

struct TrialSeeds {
  std::uint64_t init;
  std::uint64_t dynamics;
};
TrialSeeds trial_seeds(std::uint64_t master, std::uint64_t trial) {
  return {derive_seed(master, 2 * trial), derive_seed(master, 2 * trial + 1)};
}

}  // namespace

FixationEstimate estimate_fixation(const Graph& g, const InitPolicy& init, const Params& params,
                                   const RunOptions& options) {
  if (options.trials < 1) throw Error(ErrorKind::invalid_parameter, "trials must be >= 1");
  params.validate_for(g);
  const std::uint64_t max_steps = options.max_steps ? options.max_steps : default_max_steps(g);

  struct Slot {
    Absorption absorbed_to = Absorption::capped;
    std::uint64_t steps = 0;
  };
  std::uint64_t all_one = 0;
  std::uint64_t capped = 0;
  double step_sum = 0.0;
  double step_sq_sum = 0.0;
  run_blocks<Slot>(
      options.trials, options.threads,
      [&](std::uint64_t trial) {
        const auto seeds = trial_seeds(options.seed, trial);
        Rng init_rng(seeds.init);
        auto outcome = run_trajectory(g, init.draw(g, init_rng), params, max_steps, seeds.dynamics);
        return Slot{outcome.absorbed_to, outcome.steps};
      },
      [&](std::uint64_t, const Slot& slot) {
        if (slot.absorbed_to == Absorption::all_one) ++all_one;
        if (slot.absorbed_to == Absorption::capped) {
          ++capped;
        } else {
          const auto s = static_cast<double>(slot.steps);
          step_sum += s;
          step_sq_sum += s * s;
        }
      });

  FixationEstimate est;
  est.trials = options.trials;
  const double trials = static_cast<double>(options.trials);
  est.pi_hat = static_cast<double>(all_one) / trials;
  est.ci95_halfwidth = 1.96 * std::sqrt(est.pi_hat * (1.0 - est.pi_hat) / trials);
  est.capped_fraction = static_cast<double>(capped) / trials;
  const double finished = trials - static_cast<double>(capped);
  if (finished > 0) {
    est.mean_absorption_steps = step_sum / finished;
    if (finished > 1) {
      const double var = std::max(0.0, (step_sq_sum - finished * est.mean_absorption_steps * est.mean_absorption_steps) /
                                           (finished - 1.0));
      est.absorption_steps_stderr = std::sqrt(var / finished);
    }
  }
  return est;
}

std::vector<TracePoint> expected_cooperators_trace(const Graph& g, const InitPolicy& init, const Params& params,
                                                   std::uint64_t horizon, std::uint64_t sample_stride,
                                                   const RunOptions& options) {
  if (horizon < 1) throw Error(ErrorKind::invalid_parameter, "horizon must be >= 1");
  if (sample_stride < 1) throw Error(ErrorKind::invalid_parameter, "sample stride must be >= 1");
  if (options.trials < 1) throw Error(ErrorKind::invalid_parameter, "trials must be >= 1");
  params.validate_for(g);

  std::vector<std::uint64_t> times;
  for (std::uint64_t t = 0; t <= horizon; t += sample_stride) times.push_back(t);
  if (times.back() != horizon) times.push_back(horizon);

  std::vector<double> sum(times.size(), 0.0);
  std::vector<double> sq_sum(times.size(), 0.0);
  run_blocks<std::vector<int>>(
      options.trials, options.threads,
      [&](std::uint64_t trial) {
        const auto seeds = trial_seeds(options.seed, trial);
        Rng init_rng(seeds.init);
        Configuration x = init.draw(g, init_rng);
        Rng rng(seeds.dynamics);
        std::vector<int> counts;
        counts.reserve(times.size());
        std::uint64_t t = 0;
        for (std::uint64_t target : times) {
          // Absorbing states never change, so stepping can stop early.
          while (t < target && !is_absorbing(x)) {
            step(g, x, params, rng);
            ++t;
          }
          counts.push_back(x.coop_count());
        }
        return counts;
      },
      [&](std::uint64_t, const std::vector<int>& counts) {
        for (std::size_t s = 0; s < counts.size(); ++s) {
          sum[s] += counts[s];
          sq_sum[s] += static_cast<double>(counts[s]) * counts[s];
        }
      });

  const double trials = static_cast<double>(options.trials);
  std::vector<TracePoint> out;
  for (std::size_t s = 0; s < times.size(); ++s) {
    TracePoint p;
    p.t = times[s];
    p.mean = sum[s] / trials;
    if (trials > 1) {
      const double var = std::max(0.0, (sq_sum[s] - trials * p.mean * p.mean) / (trials - 1.0));
      p.stderr_ = std::sqrt(var / trials);
    }
    out.push_back(p);
  }
  return out;
}

double PairCorrelationEstimate::stderr_of(std::size_t c, std::size_t p) const {
  const double v = estimate[c][p];
  return std::sqrt(v * (1.0 - v) / static_cast<double>(trials));
}

namespace {

std::vector<std::uint64_t> sorted_checkpoints(const std::vector<std::uint64_t>& checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorKind::invalid_parameter, "need at least one checkpoint");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw Error(ErrorKind::invalid_parameter, "checkpoints must be non-decreasing");
  }
  return checkpoints;
}

// Advances x through every checkpoint and calls visit(index, x) at each.
template <class Visit>
void walk_checkpoints(const Graph& g, Configuration& x, const Params& params, Rng& rng,
                      const std::vector<std::uint64_t>& checkpoints, Visit visit) {
  std::uint64_t t = 0;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    while (t < checkpoints[c] && !is_absorbing(x)) {
      step(g, x, params, rng);
      ++t;
    }
    if (is_absorbing(x)) t = checkpoints[c];
    visit(c, x);
  }
}

}  // namespace

PairCorrelationEstimate empirical_pair_correlation(const Graph& g, const InitPolicy& init, const Params& params,
                                                   const std::vector<Edge>& pairs,
                                                   const std::vector<std::uint64_t>& checkpoints,
                                                   const RunOptions& options) {
  if (params.effective_epsilon() != 0.0) {
    throw Error(ErrorKind::unsupported, "pair correlations are tracked for the voter model (epsilon = 0) only");
  }
  if (options.trials < 1) throw Error(ErrorKind::invalid_parameter, "trials must be >= 1");
  for (auto [u, v] : pairs) {
    if (u < 0 || v < 0 || u >= g.n() || v >= g.n()) throw Error(ErrorKind::invalid_parameter, "pair out of range");
  }
  PairCorrelationEstimate est;
  est.checkpoints = sorted_checkpoints(checkpoints);
  est.pairs = pairs;
  est.trials = options.trials;
  const std::size_t width = pairs.size();
  std::vector<std::uint64_t> hits(est.checkpoints.size() * width, 0);

  run_blocks<std::vector<std::uint8_t>>(
      options.trials, options.threads,
      [&](std::uint64_t trial) {
        const auto seeds = trial_seeds(options.seed, trial);
        Rng init_rng(seeds.init);
        Configuration x = init.draw(g, init_rng);
        Rng rng(seeds.dynamics);
        std::vector<std::uint8_t> both(est.checkpoints.size() * width, 0);
        walk_checkpoints(g, x, params, rng, est.checkpoints, [&](std::size_t c, const Configuration& state) {
          for (std::size_t p = 0; p < width; ++p) {
            both[c * width + p] = state[pairs[p].first] && state[pairs[p].second];
          }
        });
        return both;
      },
      [&](std::uint64_t, const std::vector<std::uint8_t>& both) {
        for (std::size_t idx = 0; idx < both.size(); ++idx) hits[idx] += both[idx];
      });

  est.estimate.assign(est.checkpoints.size(), std::vector<double>(width, 0.0));
  for (std::size_t c = 0; c < est.checkpoints.size(); ++c) {
    for (std::size_t p = 0; p < width; ++p) {
      est.estimate[c][p] = static_cast<double>(hits[c * width + p]) / static_cast<double>(options.trials);
    }
  }
  return est;
}

AveragedQEstimate empirical_averaged_q(const Graph& g, const InitPolicy& init, const Params& params,
                                       const std::vector<std::uint64_t>& checkpoints, const RunOptions& options) {
  if (options.trials < 1) throw Error(ErrorKind::invalid_parameter, "trials must be >= 1");
  params.validate_for(g);
  const auto paths = PathTable::build(g);
  AveragedQEstimate est;
  est.checkpoints = sorted_checkpoints(checkpoints);
  const std::size_t count = est.checkpoints.size();

  auto config_q = [&](const Configuration& x) {
    std::array<double, 5> q{};
    q[0] = static_cast<double>(x.coop_count()) / g.n();
    for (int d = 1; d <= 4; ++d) {
      const auto& table = paths.by_length[static_cast<std::size_t>(d - 1)];
      if (table.pairs.empty()) continue;
      std::int64_t total = 0;
      for (const auto& pair : table.pairs) {
        if (x[pair.u] && x[pair.v]) total += pair.multiplicity;
      }
      q[static_cast<std::size_t>(d)] =
          2.0 * static_cast<double>(total) / (g.n() * static_cast<double>(g.k()) * std::pow(g.k() - 1.0, d - 1));
    }
    return q;
  };

  std::vector<std::array<double, 5>> sum(count, std::array<double, 5>{});
  std::vector<std::array<double, 5>> sq_sum(count, std::array<double, 5>{});
  run_blocks<std::vector<std::array<double, 5>>>(
      options.trials, options.threads,
      [&](std::uint64_t trial) {
        const auto seeds = trial_seeds(options.seed, trial);
        Rng init_rng(seeds.init);
        Configuration x = init.draw(g, init_rng);
        Rng rng(seeds.dynamics);
        std::vector<std::array<double, 5>> values(count);
        walk_checkpoints(g, x, params, rng, est.checkpoints,
                         [&](std::size_t c, const Configuration& state) { values[c] = config_q(state); });
        return values;
      },
      [&](std::uint64_t, const std::vector<std::array<double, 5>>& values) {
        for (std::size_t c = 0; c < count; ++c) {
          for (std::size_t d = 0; d < 5; ++d) {
            sum[c][d] += values[c][d];
            sq_sum[c][d] += values[c][d] * values[c][d];
          }
        }
      });

  const double trials = static_cast<double>(options.trials);
  est.mean.assign(count, {});
  est.stderr_.assign(count, {});
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t d = 0; d < 5; ++d) {
      const double mean = sum[c][d] / trials;
      est.mean[c][d] = mean;
      if (trials > 1) {
        const double var = std::max(0.0, (sq_sum[c][d] - trials * mean * mean) / (trials - 1.0));
        est.stderr_[c][d] = std::sqrt(var / trials);
      }
    }
  }
  return est;
}

}  // namespace wis
