#include "wis/birth_death.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "wis/error.hpp"
#include "wis/rng.hpp"

namespace wis {

void BirthDeathChain::validate() const {
  if (up.size() != down.size() || up.size() < 2) {
    throw Error(ErrorKind::invalid_chain, "chain needs matching up/down vectors over >= 2 states");
  }
  const int n = size();
  for (int j = 0; j <= n; ++j) {
    const double u = up[static_cast<std::size_t>(j)];
    const double d = down[static_cast<std::size_t>(j)];
    if (!(u >= 0.0 && u <= 1.0 && d >= 0.0 && d <= 1.0) || u + d > 1.0 + 1e-12) {
      throw Error(ErrorKind::invalid_chain, fmt::format("state {}: up={} down={} not a valid row", j, u, d));
    }
  }
  if (up.back() != 0.0 || down.front() != 0.0) {
    throw Error(ErrorKind::invalid_chain, "up from the last state and down from state 0 must be 0");
  }
}

void BirthDeathChain::validate_irreducible() const {
  validate();
  const int n = size();
  for (int j = 0; j < n; ++j) {
    if (!(up[static_cast<std::size_t>(j)] > 0.0) || !(down[static_cast<std::size_t>(j) + 1] > 0.0)) {
      throw Error(ErrorKind::invalid_chain, fmt::format("chain is reducible between states {} and {}", j, j + 1));
    }
  }
}

std::vector<double> bd_stationary(const BirthDeathChain& chain) {
  chain.validate_irreducible();
  const auto states = chain.up.size();
  // Log weights keep long chains with extreme ratios finite.
  std::vector<double> log_w(states, 0.0);
  for (std::size_t i = 1; i < states; ++i) {
    log_w[i] = log_w[i - 1] + std::log(chain.up[i - 1]) - std::log(chain.down[i]);
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> pi(states);
  double total = 0.0;
  for (std::size_t i = 0; i < states; ++i) {
    pi[i] = std::exp(log_w[i] - top);
    total += pi[i];
  }
  for (double& p : pi) p /= total;
  return pi;
}

HittingTimes bd_hitting_times(const BirthDeathChain& chain) {
  const auto pi = bd_stationary(chain);
  const int n = chain.size();
  const auto states = static_cast<std::size_t>(n) + 1;

  // below[j] = sum_{z<j} pi_z and above[j] = sum_{z>=j} pi_z, both summed
  // directly so neither tail loses digits to cancellation.
  std::vector<double> below(states + 1, 0.0);
  std::vector<double> above(states + 1, 0.0);
  for (std::size_t z = 0; z < states; ++z) below[z + 1] = below[z] + pi[z];
  for (std::size_t z = states; z-- > 0;) above[z] = above[z + 1] + pi[z];

  // up_time[j] = E_{j-1}[T_j], down_time[j] = E_j[T_{j-1}] for j = 1..n.
  std::vector<double> up_time(states, 0.0);
  std::vector<double> down_time(states, 0.0);
  for (std::size_t j = 1; j < states; ++j) {
    const double flow = pi[j] * chain.down[j];
    up_time[j] = below[j] / flow;
    down_time[j] = above[j] / flow;
  }

  HittingTimes out;
  out.expected.assign(states, std::vector<double>(states, 0.0));
  for (std::size_t a = 0; a < states; ++a) {
    double acc = 0.0;
    for (std::size_t b = a + 1; b < states; ++b) {
      acc += up_time[b];
      out.expected[a][b] = acc;
    }
    acc = 0.0;
    for (std::size_t b = a; b-- > 0;) {
      acc += down_time[b + 1];
      out.expected[a][b] = acc;
    }
  }
  return out;
}

namespace {

// Solves (up_j + down_j) h_j - up_j h_{j+1} - down_j h_{j-1} = rhs_j on the
// interior with fixed boundary values (Thomas algorithm).
std::vector<double> solve_interior(const BirthDeathChain& chain, double rhs, double left, double right) {
  const int n = chain.size();
  std::vector<double> h(static_cast<std::size_t>(n) + 1, 0.0);
  h.front() = left;
  h.back() = right;
  if (n < 2) return h;
  const auto m = static_cast<std::size_t>(n - 1);
  std::vector<double> c_prime(m), d_prime(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t j = r + 1;
    const double diag = chain.up[j] + chain.down[j];
    if (!(diag > 0.0)) throw Error(ErrorKind::invalid_chain, fmt::format("interior state {} never moves", j));
    const double lower = -chain.down[j];
    const double upper = -chain.up[j];
    double d = rhs;
    if (j == 1) d -= lower * left;
    if (j + 1 == static_cast<std::size_t>(n)) d -= upper * right;
    const double denom = r == 0 ? diag : diag - lower * c_prime[r - 1];
    if (!(std::abs(denom) > 0.0)) throw Error(ErrorKind::invalid_chain, "singular absorption system");
    c_prime[r] = upper / denom;
    d_prime[r] = (r == 0 ? d : d - lower * d_prime[r - 1]) / denom;
  }
  for (std::size_t r = m; r-- > 0;) {
    h[r + 1] = d_prime[r] - (r + 1 < m ? c_prime[r] * h[r + 2] : 0.0);
  }
  return h;
}

}  // namespace

BirthDeathAbsorption bd_absorption(const BirthDeathChain& chain) {
  chain.validate();
  BirthDeathAbsorption out;
  out.fixation = solve_interior(chain, 0.0, 0.0, 1.0);
  out.expected_time = solve_interior(chain, 1.0, 0.0, 0.0);
  return out;
}

SensitivityReport perturbation_sensitivity(const BirthDeathChain& chain, double delta, int random_samples,
                                           std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::invalid_parameter, "delta must be >= 0");
  const auto base = bd_hitting_times(chain);
  const int n = chain.size();
  SensitivityReport report;

  auto evaluate = [&](const BirthDeathChain& perturbed) {
    const auto times = bd_hitting_times(perturbed);
    for (std::size_t a = 0; a < times.expected.size(); ++a) {
      for (std::size_t b = 0; b < times.expected.size(); ++b) {
        report.max_abs_change = std::max(report.max_abs_change,
                                         std::abs(times.expected[a][b] - base.expected[a][b]));
      }
    }
    report.end_to_end_change = std::max(report.end_to_end_change, std::abs(times.at(0, n) - base.at(0, n)));
    ++report.perturbations_tried;
  };

  for (double sign : {1.0, -1.0}) {
    BirthDeathChain shifted = chain;
    for (int j = 0; j < n; ++j) shifted.up[static_cast<std::size_t>(j)] += sign * delta;
    for (int j = 1; j <= n; ++j) shifted.down[static_cast<std::size_t>(j)] -= sign * delta;
    evaluate(shifted);
  }
  Rng rng(seed);
  for (int s = 0; s < random_samples; ++s) {
    BirthDeathChain noisy = chain;
    for (int j = 0; j < n; ++j) noisy.up[static_cast<std::size_t>(j)] += delta * (2.0 * rng.uniform() - 1.0);
    for (int j = 1; j <= n; ++j) noisy.down[static_cast<std::size_t>(j)] += delta * (2.0 * rng.uniform() - 1.0);
    evaluate(noisy);
  }
  return report;
}

BirthDeathChain read_chain_csv(std::string_view text) {
  std::vector<double> up;
  std::vector<double> down;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long state = 0;
    double u = 0.0;
    double d = 0.0;
    if (!(fields >> state >> u >> d)) {
      if (up.empty() && line.find("state") != std::string::npos) continue;  // header
      throw Error(ErrorKind::malformed_input, fmt::format("chain CSV line {}: expected state,up,down", line_no));
    }
    if (state != static_cast<long>(up.size())) {
      throw Error(ErrorKind::malformed_input, fmt::format("chain CSV line {}: states must be 0,1,2,...", line_no));
    }
    up.push_back(u);
    down.push_back(d);
  }
  BirthDeathChain chain;
  chain.up = std::move(up);
  chain.down = std::move(down);
  chain.validate();
  return chain;
}

std::string write_chain_csv(const BirthDeathChain& chain) {
  std::string out = "state,up,down\n";
  for (std::size_t j = 0; j < chain.up.size(); ++j) {
    out += fmt::format("{},{:.17g},{:.17g}\n", j, chain.up[j], chain.down[j]);
  }
  return out;
}

}  // namespace wis
