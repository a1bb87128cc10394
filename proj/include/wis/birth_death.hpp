#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wis {

/// Nearest-neighbour chain on states 0..size(). `up[j]` is p_{j,j+1} and
/// `down[j]` is q_{j,j-1}; both vectors have size()+1 entries with
/// up[size()] = down[0] = 0. Holding probability is 1 - up - down.
struct BirthDeathChain {
  std::vector<double> up;
  std::vector<double> down;

  BirthDeathChain() = default;
  explicit BirthDeathChain(int size) : up(static_cast<std::size_t>(size) + 1, 0.0),
                                       down(static_cast<std::size_t>(size) + 1, 0.0) {}

  int size() const noexcept { return static_cast<int>(up.size()) - 1; }
  /// Probabilities in range and up + down <= 1; throws invalid_chain.
  void validate() const;
  /// validate() plus up[j] > 0 for j < size and down[j] > 0 for j > 0.
  void validate_irreducible() const;
};

/// Reversible stationary law built from up/down ratios.
std::vector<double> bd_stationary(const BirthDeathChain& chain);

/// expected[a][b] = E_a[T_b] for every pair of states (0 on the diagonal).
struct HittingTimes {
  std::vector<std::vector<double>> expected;
  double at(int from, int to) const {
    return expected[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  }
};

/// Closed-form hitting times for an irreducible chain: each one-step time
/// E_{j-1}[T_j], E_j[T_{j-1}] comes from the stationary law and down[j], and
/// longer hits add up along the line.
HittingTimes bd_hitting_times(const BirthDeathChain& chain);

/// Chain with absorbing ends 0 and size(): probability of ending at size()
/// and expected steps to absorption, per start state.
struct BirthDeathAbsorption {
  std::vector<double> fixation;
  std::vector<double> expected_time;
};
BirthDeathAbsorption bd_absorption(const BirthDeathChain& chain);

struct SensitivityReport {
  double max_abs_change = 0.0;
  /// Largest change of E_0[T_size].
  double end_to_end_change = 0.0;
  int perturbations_tried = 0;
};

/// Recomputes hitting times under perturbations of every transition by at
/// most `delta`: the two coherent shifts (all up +delta / down -delta and
/// the reverse) and `random_samples` independent uniform perturbations.
/// Reports only; makes no monotonicity claim.
SensitivityReport perturbation_sensitivity(const BirthDeathChain& chain, double delta,
                                           int random_samples = 8, std::uint64_t seed = 1);

/// CSV rows "state,up,down" (header optional on read).
BirthDeathChain read_chain_csv(std::string_view text);
std::string write_chain_csv(const BirthDeathChain& chain);

}  // namespace wis
