#include "wis/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wis/error.hpp"

namespace wis {

PathTable PathTable::build(const Graph& g) {
  PathTable table;
  table.n = g.n();
  table.k = g.k();
  for (int d = 1; d <= 4; ++d) table.by_length[static_cast<std::size_t>(d - 1)] = enumerate_paths(g, d);
  return table;
}

CorrelationField init_field(const Graph& g) {
  const int n = g.n();
  CorrelationField field;
  field.joint = Eigen::MatrixXd::Zero(n, n);
  const double per_edge = 1.0 / static_cast<double>(g.edge_count());
  for (auto [u, v] : g.edges()) {
    field.joint(u, v) = per_edge;
    field.joint(v, u) = per_edge;
  }
  // Each node lies on k of the |E| = nk/2 edges.
  for (int i = 0; i < n; ++i) field.joint(i, i) = 2.0 / n;
  return field;
}

double advance_field(const Graph& g, CorrelationField& field, Eigen::MatrixXd& scratch) {
  const int n = g.n();
  const double inv_nk = 1.0 / (static_cast<double>(n) * g.k());
  auto& p = field.joint;
  // scratch = P A: column i is the sum of the columns of i's neighbours.
  scratch.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    for (Node h : g.neighbors(i)) scratch.col(i) += p.col(h);
  }
  Eigen::VectorXd marginals = p.diagonal();
  Eigen::VectorXd neighbor_marginals(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (Node h : g.neighbors(i)) s += marginals[h];
    neighbor_marginals[i] = s;
  }

  double change = 0.0;
  const double stay = 1.0 - 2.0 / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double next = 0.0;
      if (i == j) {
        next = (1.0 - 1.0 / n) * marginals[i] + inv_nk * neighbor_marginals[i];
      } else {
        // p_ij' = stay p_ij + (1/nk) [sum_{h~i} p_hj + sum_{l~j} p_il]
        next = stay * p(i, j) + inv_nk * (scratch(j, i) + scratch(i, j));
      }
      change = std::max(change, std::abs(next - p(i, j)));
      p(i, j) = next;
    }
  }
  ++field.t;
  return change;
}

CorrelationField field_step(const Graph& g, const CorrelationField& field) {
  CorrelationField next = field;
  Eigen::MatrixXd scratch;
  advance_field(g, next, scratch);
  return next;
}

bool field_is_valid(const CorrelationField& field, double slack) {
  const auto& p = field.joint;
  const int n = field.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = p(i, j);
      if (!(v >= -slack && v <= 1.0 + slack)) return false;
      if (std::abs(v - p(j, i)) > slack) return false;
      if (i != j && v > std::min(p(i, i), p(j, j)) + slack) return false;
    }
  }
  return true;
}

AveragedCorrelations averaged_q(const PathTable& paths, const CorrelationField& field) {
  AveragedCorrelations out;
  const double n = paths.n;
  const double k = paths.k;
  out[0] = field.joint.diagonal().sum() / n;
  for (int d = 1; d <= 4; ++d) {
    const auto& table = paths.by_length[static_cast<std::size_t>(d - 1)];
    if (table.pairs.empty()) continue;
    double total = 0.0;
    for (const auto& pair : table.pairs) total += static_cast<double>(pair.multiplicity) * field.joint(pair.u, pair.v);
    out[d] = 2.0 * total / (n * k * std::pow(k - 1.0, d - 1));
  }
  return out;
}

AveragedCorrelations averaged_q(const Graph& g, const CorrelationField& field) {
  return averaged_q(PathTable::build(g), field);
}

bool q_monotone(const AveragedCorrelations& q, double slack) {
  return q[4] <= q[3] + slack && q[3] <= q[2] + slack && q[2] <= q[1] + slack;
}

AveragedCorrelations tree_recursion_step(const AveragedCorrelations& q, int n, int k, Q4Closure closure,
                                         std::optional<double> exact_q4_next) {
  const double nn = n;
  const double kk = k;
  const double stay = 1.0 - 2.0 / nn;
  const double inward = 2.0 / (nn * kk);
  const double outward = 2.0 * (kk - 1.0) / (nn * kk);
  AveragedCorrelations next;
  next[0] = q[0];
  for (int d = 1; d <= 3; ++d) next[d] = stay * q[d] + inward * q[d - 1] + outward * q[d + 1];
  if (closure == Q4Closure::exact_field) {
    if (!exact_q4_next) throw Error(ErrorKind::invalid_parameter, "exact_field closure needs the next q4");
    next[4] = *exact_q4_next;
  } else {
    next[4] = next[3];
  }
  return next;
}

double drift_from_q(const AveragedCorrelations& q, int k, double b, double c) {
  const double kk = k;
  const double weighted_b = (kk - 1.0) * b / kk;
  return (kk - 1.0) * (-c * q[0] + weighted_b * q[1] + c * q[2] - weighted_b * q[3]);
}

double TheoremParams::t_star_horizon() const {
  return 0.5 * (k + 1.0) * std::pow(static_cast<double>(n), 2.0 + gamma / 3.0);
}

std::uint64_t TheoremParams::t_star_steps() const {
  return static_cast<std::uint64_t>(std::ceil(t_star_horizon() - 1e-9));
}

double TheoremParams::epsilon_theorem() const { return std::pow(static_cast<double>(n), -(4.0 + gamma)); }

DriftSeries drift_series(const Graph& g, double b, double c, const TheoremParams& theorem,
                         const DriftSeriesOptions& options) {
  if (!girth_at_least(g, 7)) {
    throw Error(ErrorKind::unsupported, "the averaged drift decomposition needs girth >= 7");
  }
  TheoremParams resolved = theorem;
  if (resolved.n == 0) resolved.n = g.n();
  if (resolved.k == 0) resolved.k = g.k();
  if (resolved.n != g.n() || resolved.k != g.k()) {
    throw Error(ErrorKind::invalid_parameter, "theorem parameters do not match the graph");
  }
  if (!(resolved.gamma > 0.0)) throw Error(ErrorKind::invalid_parameter, "gamma must be positive");

  std::uint64_t horizon = resolved.t_star_steps();
  if (options.max_steps) horizon = std::min(horizon, *options.max_steps);

  const auto paths = PathTable::build(g);
  CorrelationField field = init_field(g);
  Eigen::MatrixXd scratch;
  DriftSeries series;
  series.steps = horizon;
  double change = std::numeric_limits<double>::infinity();

  for (std::uint64_t t = 0; t < horizon; ++t) {
    const auto q = averaged_q(paths, field);
    const double drift = drift_from_q(q, g.k(), b, c);
    series.monotone = series.monotone && q_monotone(q, 1e-14);
    series.drifts.push_back(drift);
    if (options.keep_q) series.q.push_back(q);
    series.cumulative_sum += drift;
    series.cumulative.push_back(series.cumulative_sum);

    if (options.truncate && change < options.truncation_tolerance &&
        std::abs(drift) < options.truncation_tolerance) {
      series.cumulative_sum += static_cast<double>(horizon - t - 1) * drift;
      series.truncated = t + 1 < horizon;
      break;
    }
    if (t + 1 < horizon) change = advance_field(g, field, scratch);
  }
  series.running_mean = horizon == 0 ? 0.0 : series.cumulative_sum / static_cast<double>(horizon);
  return series;
}

Eigen::Matrix4d correlation_matrix_a(int n, int k, Corner corner) {
  const double nn = n;
  const double kk = k;
  const double stay = 1.0 - 2.0 / nn;
  const double inward = 2.0 / (nn * kk);
  const double outward = 2.0 * (kk - 1.0) / (nn * kk);
  Eigen::Matrix4d a;
  a << 1.0, 0.0, 0.0, 0.0,
       inward, stay, outward, 0.0,
       0.0, inward, stay, outward,
       0.0, 0.0, inward, corner == Corner::one_minus_2_over_n ? stay : 1.0 - inward;
  return a;
}

Eigen::Matrix4d correlation_matrix_b(int n, int k, Corner corner) {
  Eigen::Matrix4d b = correlation_matrix_a(n, k, corner);
  b(2, 3) *= 1.0 - std::sqrt((k - 1.0) / 2.0);
  return b;
}

Eigen::Vector4d scaled_drift_weights(int k, double b, double c) {
  const double kk = k;
  const double weighted_b = (kk - 1.0) * (kk - 1.0) * b / kk;
  return Eigen::Vector4d(-(kk - 1.0) * c, weighted_b, (kk - 1.0) * c, -weighted_b);
}

double matrix_form_drift(const Eigen::Vector4d& q0_vector, std::span<const double> q4_history, int k, double b,
                         double c, int n, std::uint64_t t_star, Corner corner) {
  if (q4_history.size() < t_star) {
    throw Error(ErrorKind::invalid_parameter, "q4 history shorter than t_star");
  }
  const Eigen::Matrix4d a = correlation_matrix_a(n, k, corner);
  const double feed = 2.0 * (k - 1.0) / (static_cast<double>(n) * k);
  Eigen::Vector4d state = q0_vector;
  for (std::uint64_t s = 0; s < t_star; ++s) {
    state = a * state;
    state[3] += feed * q4_history[s];
  }
  return scaled_drift_weights(k, b, c).dot(state);
}

Eigen::Matrix4d matrix_b_sum(int k, int n, std::uint64_t t_star, Corner corner) {
  const Eigen::Matrix4d b = correlation_matrix_b(n, k, corner);
  Eigen::Matrix4d power = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
  for (std::uint64_t t = 0; t < t_star; ++t) {
    sum += power;
    power = b * power;
  }
  return sum;
}

double b_path_bound(const Eigen::Vector4d& q0_vector, int k, double b, double c, int n, std::uint64_t t_star,
                    Corner corner) {
  return scaled_drift_weights(k, b, c).dot(matrix_b_sum(k, n, t_star, corner) * q0_vector);
}

double lemma2_lower_bound(int k, double b, double c) {
  if (k < 2) throw Error(ErrorKind::invalid_parameter, "need k >= 2");
  const double kk = k;
  const double threshold = kk * kk / (kk - 1.0) * c;
  const double margin = b - threshold;
  if (margin < -1e-12 * std::max({std::abs(b), threshold, 1e-300})) {
    throw Error(ErrorKind::bound_not_applicable, "b/c is below k^2/(k-1)");
  }
  const double root = std::sqrt((kk - 1.0) / 2.0);
  const double coefficient = kk * std::pow(kk - 1.0, 3) * root / (kk * kk * (kk - 1.0) * root + kk);
  return coefficient * std::max(margin, 0.0);
}

double theorem_f(int k, double b, double c, double n, double gamma) {
  const double kk = k;
  const double mixing = 0.75 * (kk + 1.0) * (kk + 1.0) * std::pow(n, -gamma / 3.0);
  // n^(5+gamma) / 2^(n^(gamma/3)) evaluated in log space.
  const double tail = std::exp((5.0 + gamma) * std::log(n) - std::pow(n, gamma / 3.0) * std::log(2.0));
  return lemma2_lower_bound(k, b, c) - mixing - tail;
}

}  // namespace wis
