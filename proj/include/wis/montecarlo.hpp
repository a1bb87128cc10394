#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wis/dynamics.hpp"
#include "wis/graph.hpp"

namespace wis {

enum class Absorption { all_one, all_zero, capped };
std::string_view to_string(Absorption a);

struct TrajectoryOutcome {
  Absorption absorbed_to = Absorption::capped;
  std::uint64_t steps = 0;
  /// (t, N_t) every `trace_stride` steps when requested, plus the final state.
  std::vector<std::pair<std::uint64_t, int>> trace_samples;
};

/// Runs `step` until absorption or `max_steps` updates. The RNG is seeded
/// with `seed` directly.
TrajectoryOutcome run_trajectory(const Graph& g, Configuration x0, const Params& params, std::uint64_t max_steps,
                                 std::uint64_t seed, std::uint64_t trace_stride = 0);

/// How each trial picks its starting configuration.
class InitPolicy {
 public:
  enum class Kind { random_adjacent_pair, fixed, random_uniform };

  static InitPolicy random_adjacent_pair() { return InitPolicy(Kind::random_adjacent_pair, {}); }
  static InitPolicy fixed(Configuration x0) { return InitPolicy(Kind::fixed, std::move(x0)); }
  /// Every node cooperates independently with probability 1/2.
  static InitPolicy random_uniform() { return InitPolicy(Kind::random_uniform, {}); }

  Kind kind() const noexcept { return kind_; }
  std::string describe() const;
  /// Draws from `rng` only for the random kinds.
  Configuration draw(const Graph& g, Rng& rng) const;

 private:
  InitPolicy(Kind kind, Configuration x0) : kind_(kind), fixed_(std::move(x0)) {}
  Kind kind_;
  Configuration fixed_;
};

/// 20 k n^2.
std::uint64_t default_max_steps(const Graph& g);

struct RunOptions {
  std::uint64_t trials = 10000;
  std::uint64_t max_steps = 0;  ///< 0 means default_max_steps(g)
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct FixationEstimate {
  double pi_hat = 0.0;
  std::uint64_t trials = 0;
  double ci95_halfwidth = 0.0;
  /// Over non-capped trials only.
  double mean_absorption_steps = 0.0;
  double absorption_steps_stderr = 0.0;
  double capped_fraction = 0.0;
};

/// Capped trials count as "not all-one" in pi_hat.
FixationEstimate estimate_fixation(const Graph& g, const InitPolicy& init, const Params& params,
                                   const RunOptions& options);

struct TracePoint {
  std::uint64_t t = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Mean N_t across trials at t = 0, stride, 2 stride, ..., horizon.
std::vector<TracePoint> expected_cooperators_trace(const Graph& g, const InitPolicy& init, const Params& params,
                                                   std::uint64_t horizon, std::uint64_t sample_stride,
                                                   const RunOptions& options);

/// estimate[c][p]: fraction of trials with both ends of pairs[p] cooperating
/// at checkpoints[c]. Only defined for the voter model; throws unsupported
/// when the effective epsilon is not 0.
struct PairCorrelationEstimate {
  std::vector<std::uint64_t> checkpoints;
  std::vector<Edge> pairs;
  std::vector<std::vector<double>> estimate;
  std::uint64_t trials = 0;
  /// Binomial standard error of estimate[c][p].
  double stderr_of(std::size_t c, std::size_t p) const;
};
PairCorrelationEstimate empirical_pair_correlation(const Graph& g, const InitPolicy& init, const Params& params,
                                                   const std::vector<Edge>& pairs,
                                                   const std::vector<std::uint64_t>& checkpoints,
                                                   const RunOptions& options);

/// Monte Carlo counterpart of averaged_q: per-trial path averages of
/// x_u x_v, with their mean and standard error at each checkpoint.
struct AveragedQEstimate {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::array<double, 5>> mean;
  std::vector<std::array<double, 5>> stderr_;
};
AveragedQEstimate empirical_averaged_q(const Graph& g, const InitPolicy& init, const Params& params,
                                       const std::vector<std::uint64_t>& checkpoints, const RunOptions& options);

/// Runs body(trial) for trial in [0, trials) on `threads` workers. Each
/// trial must write only to its own slot; results are reduced afterwards
/// in trial order, so output does not depend on the thread count.
void for_each_trial(std::uint64_t trials, unsigned threads, const std::function<void(std::uint64_t)>& body);

}  // namespace wis
