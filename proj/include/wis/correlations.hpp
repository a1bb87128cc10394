#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wis/graph.hpp"

namespace wis {

/// Joint cooperation probabilities under the voter model. Off-diagonal
/// entries are p_ij(t); the diagonal holds the marginals p_i(t).
struct CorrelationField {
  std::int64_t t = 0;
  Eigen::MatrixXd joint;

  int n() const noexcept { return static_cast<int>(joint.rows()); }
  double marginal(Node i) const { return joint(i, i); }
};

/// q[d] is the mean joint probability of the two ends of a length-d path
/// (q[0] is the mean marginal), d = 0..4.
struct AveragedCorrelations {
  std::array<double, 5> q{};
  double operator[](int d) const { return q[static_cast<std::size_t>(d)]; }
  double& operator[](int d) { return q[static_cast<std::size_t>(d)]; }
};

/// Endpoint tables for path lengths 1..4; build once per graph.
struct PathTable {
  int n = 0;
  int k = 0;
  std::array<PathEndpoints, 4> by_length;
  static PathTable build(const Graph& g);
};

/// Law at t = 0 of the start in which a uniform random edge cooperates.
CorrelationField init_field(const Graph& g);

/// One voter-model update of every pairwise and marginal probability.
CorrelationField field_step(const Graph& g, const CorrelationField& field);
/// In-place variant; returns the largest absolute entry change.
double advance_field(const Graph& g, CorrelationField& field, Eigen::MatrixXd& scratch);

/// Entries in [0,1], symmetric, p_ij <= min(p_i, p_j), all within `slack`.
bool field_is_valid(const CorrelationField& field, double slack);

AveragedCorrelations averaged_q(const PathTable& paths, const CorrelationField& field);
AveragedCorrelations averaged_q(const Graph& g, const CorrelationField& field);

/// q4 <= q3 <= q2 <= q1 within `slack`.
bool q_monotone(const AveragedCorrelations& q, double slack);

/// How the q3 recursion obtains q4: from the exact field, or replaced by
/// q3 (valid upper closure on girth >= 7).
enum class Q4Closure { exact_field, bound_by_q3 };

/// Averaged tree recursion for d = 1..3 (q0 is constant). The returned q4
/// is `exact_q4_next` in exact_field mode (required) or the new q3 in
/// bound_by_q3 mode.
AveragedCorrelations tree_recursion_step(const AveragedCorrelations& q, int n, int k, Q4Closure closure,
                                         std::optional<double> exact_q4_next = std::nullopt);

/// Expected change of the cooperator count when the PD kernel is applied
/// once to a field with these averaged correlations (girth >= 7).
double drift_from_q(const AveragedCorrelations& q, int k, double b, double c);

struct TheoremParams {
  int n = 0;
  int k = 0;
  double gamma = 1.0;

  /// 0.5 (k+1) n^(2 + gamma/3)
  double t_star_horizon() const;
  /// Number of summands t* = 0 .. ceil(T*) - 1.
  std::uint64_t t_star_steps() const;
  /// n^-(4 + gamma)
  double epsilon_theorem() const;
};

struct DriftSeriesOptions {
  /// Stop once the field has converged (largest entry change and the
  /// current drift both below the tolerance); the remaining summands are
  /// added as (remaining steps) x (current drift).
  bool truncate = true;
  double truncation_tolerance = 1e-15;
  /// Hard cap on evaluated steps (after T*).
  std::optional<std::uint64_t> max_steps;
  bool keep_q = true;
};

struct DriftSeries {
  std::vector<double> drifts;               ///< E[Delta_t*] for evaluated t*
  std::vector<AveragedCorrelations> q;      ///< q at each evaluated t* (if kept)
  std::vector<double> cumulative;           ///< running sum of drifts
  double cumulative_sum = 0.0;              ///< sum over all t* < T* (incl. tail)
  double running_mean = 0.0;                ///< cumulative_sum / steps
  std::uint64_t steps = 0;                  ///< number of t* summed
  bool truncated = false;
  bool monotone = true;                     ///< q4<=q3<=q2<=q1 at every t* (1e-14)
};

/// Evolves the exact field from the adjacent-pair start and evaluates the
/// drift at every t* < T*. Throws unsupported when girth(g) < 7.
DriftSeries drift_series(const Graph& g, double b, double c, const TheoremParams& theorem,
                         const DriftSeriesOptions& options = {});

/// Diagonal corner of the fourth row in the 4x4 recursion matrices.
enum class Corner {
  one_minus_2_over_n,   ///< 1 - 2/n (the A matrix as printed)
  one_minus_2_over_nk,  ///< 1 - 2/(nk) (the B matrix as printed)
};

Eigen::Matrix4d correlation_matrix_a(int n, int k, Corner corner = Corner::one_minus_2_over_n);
Eigen::Matrix4d correlation_matrix_b(int n, int k, Corner corner = Corner::one_minus_2_over_nk);
/// (k-1) c Y, i.e. the drift as a linear functional of (q0, q1, q2, q3).
Eigen::Vector4d scaled_drift_weights(int k, double b, double c);

/// (k-1)c Y^T [A^t* Q0 + 2(k-1)/(nk) sum_s A^(t*-s-1) R_s] with
/// R_s = q4_history[s] e_4; q4_history needs at least t_star entries.
double matrix_form_drift(const Eigen::Vector4d& q0_vector, std::span<const double> q4_history, int k, double b,
                         double c, int n, std::uint64_t t_star, Corner corner = Corner::one_minus_2_over_n);

/// sum_{t < t_star} B^t.
Eigen::Matrix4d matrix_b_sum(int k, int n, std::uint64_t t_star, Corner corner = Corner::one_minus_2_over_nk);
/// (k-1)c Y^T [sum_t B^t] Q0.
double b_path_bound(const Eigen::Vector4d& q0_vector, int k, double b, double c, int n, std::uint64_t t_star,
                    Corner corner = Corner::one_minus_2_over_nk);

/// Lower bound on the cumulative drift; throws bound_not_applicable when
/// b/c is below k^2/(k-1). At the threshold it is 0.
double lemma2_lower_bound(int k, double b, double c);

/// lemma2_lower_bound - (3/4)(k+1)^2 n^(-gamma/3) - n^(5+gamma) / 2^(n^(gamma/3)).
double theorem_f(int k, double b, double c, double n, double gamma);

}  // namespace wis
