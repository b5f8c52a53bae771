#pragma once

#include "ttcov/rearrange.hpp"
#include "ttcov/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ttcov {

/// Partial trace over the listed factor modes (1 = p, 2 = q, 3 = r), by
/// direct index summation. Tracing every mode gives a 1 x 1 matrix.
[[nodiscard]] Matrix partial_trace(const Matrix& sigma, const FactorShape& shape,
                                   const std::vector<int>& modes);

/// Effective dimensions r1, r2, r3 of a symmetric PSD covariance:
///   r1 = max(|Tr1| / |S|, |Tr12| / |Tr2|)
///   r2 = max(|Tr2| / |S|, |Tr23| / |Tr3|)
///   r3 = max(|Tr3| / |S|, |Tr13| / |Tr1|, |Tr123| / |Tr12|)
/// with spectral norms throughout.
struct EffectiveDims {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  std::vector<double> ratios1;  // candidates in the order listed above
  std::vector<double> ratios2;
  std::vector<double> ratios3;
};

[[nodiscard]] EffectiveDims effective_dims(const Matrix& sigma, const FactorShape& shape);

/// Norms of the misspecification tensor E_bar = R(S) - T* (zero for an exactly
/// TT-structured covariance).
struct BiasNorms {
  double m1 = 0.0;        // |m1(E_bar)|
  double m3 = 0.0;        // |m3(E_bar)|
  double alpha_u = 0.0;   // |m1(V*^T x_3 E_bar)|
  double alpha_v = 0.0;   // |m3(U*^T x_1 E_bar)|
  double beta_u = 0.0;    // sup over |V| <= 1 of |m1(V^T x_3 E_bar)|
  double beta_v = 0.0;    // sup over |U| <= 1 of |m3(U^T x_1 E_bar)|
  double frobenius = 0.0; // |E_bar|_F
  double sup_term = 0.0;  // sup over orthonormal U, V of |U^T x_1 V^T x_3 E_bar|_F
};

/// One inequality lhs >= rhs.
struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] bool holds() const noexcept { return lhs >= rhs; }
  /// lhs / rhs; infinite when rhs is zero.
  [[nodiscard]] double margin() const noexcept;
};

/// Evaluation of the singular-value conditions, variance term and remainder
/// terms of the covariance error bound at given (n, J, K, omega, delta).
struct ConditionReport {
  EffectiveDims dims;
  double sigma_norm = 0.0;
  double sigma_j = 0.0;  // sigma_J(m1(R(S)))
  double sigma_k = 0.0;  // sigma_K(m3(R(S)))
  Inequality first;
  Inequality second;
  double variance = 0.0;  // v_hat
  double r_delta = 0.0;
  bool sample_size_ok = false;  // n >= r_delta

  double alpha_u = 0.0;
  double beta_u = 0.0;
  double alpha_v = 0.0;
  double beta_v = 0.0;
  double diamond2 = 0.0;
  double r_t = 0.0;
  double bias = 0.0;   // b_bar
  double bound = 0.0;  // bias + variance + diamond2 + r_t

  std::vector<std::string> notes;

  [[nodiscard]] bool conditions_hold() const noexcept {
    return first.holds() && second.holds() && sample_size_ok;
  }
};

/// Throws std::invalid_argument for omega <= 0, delta outside (0, 1), n < 1
/// or ranks outside the matricization sizes.
[[nodiscard]] ConditionReport check_conditions(const Matrix& sigma, const FactorShape& shape,
                                               Index n, Index rank_j, Index rank_k, double omega,
                                               double delta, const BiasNorms& bias = {},
                                               int iterations = 10);

/// Lower estimate and rigorous upper bound for a supremum that cannot be
/// computed exactly.
struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  [[nodiscard]] double mid() const noexcept { return 0.5 * (lower + upper); }
  [[nodiscard]] double width() const noexcept { return upper - lower; }
};

struct SensitivityOptions {
  int restarts = 20;
  int max_iterations = 100;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
};

/// Perturbation terms for Y = T* + E with T* = U* x_1 V* x_3 W*.
struct SensitivityReport {
  double alpha_u = 0.0;  // |m1(V*^T x_3 E)|
  double alpha_v = 0.0;  // |m3(U*^T x_1 E)|
  Bracket beta_u;        // upper = |m1(E)|
  Bracket beta_v;        // upper = |m3(E)|
  Bracket sup_term;      // upper = min(sqrt(J)|m1(E)|, sqrt(K)|m3(E)|, |E|_F)
  double sigma_j = 0.0;  // sigma_J(m1(T*))
  double sigma_k = 0.0;  // sigma_K(m3(T*))
  double m1_norm = 0.0;  // |m1(E)|

  Bracket diamond2;
  Bracket r_t;
  Bracket bound;  // sup_term + 4 sqrt(K) alpha_v + 4 sqrt(J) alpha_u + diamond2 + r_t

  /// sigma_J(m1(T*)) >= 24 |m1(E)|.
  Inequality first;
  /// sigma_K(m3(T*)) >= 24 sup |m3(E)(U (x) I)|, with the supremum replaced by
  /// its value at U = U* (exact anchor), the lower estimate, or the upper bound.
  Inequality second_anchor;
  Inequality second_heuristic;
  Inequality second_rigorous;
};

/// Throws std::invalid_argument when u_star / v_star are not orthonormal or
/// their shapes disagree with the tensors and ranks.
[[nodiscard]] SensitivityReport sensitivity_report(const Tensor3& t_star, const Tensor3& e,
                                                   const Matrix& u_star, const Matrix& v_star,
                                                   int iterations,
                                                   const SensitivityOptions& opts = {});

/// max over |V| <= 1 (V: d3 x k) of |m1(V^T x_3 e)|, by alternating
/// maximization from `restarts` random starts.
[[nodiscard]] double beta_u_lower(const Tensor3& e, Index rank_k, const SensitivityOptions& opts);

/// max over |U| <= 1 (U: d1 x j) of |m3(U^T x_1 e)|.
[[nodiscard]] double beta_v_lower(const Tensor3& e, Index rank_j, const SensitivityOptions& opts);

/// max over orthonormal U (d1 x j), V (d3 x k) of |U^T x_1 V^T x_3 e|_F.
[[nodiscard]] double sup_term_lower(const Tensor3& e, Index rank_j, Index rank_k,
                                    const SensitivityOptions& opts);

}  // namespace ttcov
