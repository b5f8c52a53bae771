#pragma once

#include "ttcov/linalg.hpp"
#include "ttcov/rearrange.hpp"
#include "ttcov/tensor.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ttcov {

/// u x_1 v x_3 core with orthonormal u (d1 x J) and v (d3 x K).
struct Tucker2Factorization {
  Matrix u;
  Matrix v;
  Tensor3 core;  // J x d2 x K

  [[nodiscard]] Tensor3 reconstruct() const;
};

struct Tucker3Factorization {
  std::array<Matrix, 3> factors;  // d_i x r_i, orthonormal
  Tensor3 core;                   // r1 x r2 x r3

  [[nodiscard]] Tensor3 reconstruct() const;
};

[[nodiscard]] Tensor3 reconstruct(const Tucker2Factorization& f);
[[nodiscard]] Tensor3 reconstruct(const Tucker3Factorization& f);

/// HardTTh output plus the initial (t = 0) subspaces, kept for sin-theta
/// diagnostics.
struct HardTThResult {
  Tucker2Factorization factors;
  Matrix u_init;
  Matrix v_init;
};

/// How V_0 is obtained. `sequential` takes SVD_K(m3(U_0^T x_1 Y)); `independent`
/// takes SVD_K(m3(Y)), so U_0 and V_0 come from separate one-shot SVDs.
enum class TtInit { sequential, independent };

[[nodiscard]] std::string_view init_name(TtInit init);
[[nodiscard]] TtInit parse_init(std::string_view name);

/// Alternating truncated-SVD refinement of the two Tucker-2 factors.
///
///   U_0 = SVD_J(m1(Y)),            V_0 = SVD_K(m3(U_0^T x_1 Y))
///   U_t = SVD_J(m1(V_{t-1}^T x_3 Y)), V_t = SVD_K(m3(U_t^T x_1 Y)),  t = 1..T
///   W   = U_T^T x_1 V_T^T x_3 Y
///
/// T = 0 is TT-HOSVD. Requires 1 <= J <= min(d1, d2 d3), 1 <= K <= min(d3, J d2).
[[nodiscard]] HardTThResult hardtth(const Tensor3& y, Index rank_j, Index rank_k, int iterations,
                                    const SvdOptions& svd = {},
                                    TtInit init = TtInit::sequential);

[[nodiscard]] HardTThResult tt_hosvd(const Tensor3& y, Index rank_j, Index rank_k,
                                     const SvdOptions& svd = {},
                                     TtInit init = TtInit::sequential);

/// HOSVD initialization followed by `iterations` HOOI sweeps (modes 1, 2, 3
/// in that order).
[[nodiscard]] Tucker3Factorization tucker_hooi(const Tensor3& y, const std::array<Index, 3>& ranks,
                                               int iterations, const SvdOptions& svd = {});

/// Soft-thresholds the singular values of m1 by lambda1/2, refolds, then the
/// singular values of m3 by lambda2/2, refolds.
[[nodiscard]] Tensor3 prls(const Tensor3& y, double lambda1, double lambda2);

/// Grid search for PRLS penalties scored against a known target tensor.
struct PrlsTuning {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double rel_error = 0.0;  // ||prls(y) - target||_F / ||target||_F at the optimum
};

/// `points` log-spaced values per penalty from 1e-3 sigma_1 to sigma_1 of the
/// matricization being thresholded (m1(y) for lambda1, m3 of the lambda1
/// output for lambda2).
[[nodiscard]] PrlsTuning tune_prls(const Tensor3& y, const Tensor3& target, int points = 20);

[[nodiscard]] Matrix sample_covariance(const Matrix& x);

enum class Method { sample, hardtth, tt_hosvd, tucker, tucker_hooi, prls };

[[nodiscard]] std::string_view method_name(Method m);
[[nodiscard]] Method parse_method(std::string_view name);

/// Estimator choice and hyperparameters.
struct EstimatorSpec {
  Method method = Method::hardtth;
  Index rank_j = 1;
  Index rank_k = 1;
  /// Tucker ranks; defaults to (J, J*K, K) when unset.
  std::optional<std::array<Index, 3>> tucker_ranks;
  int iterations = 10;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  SvdOptions svd;
  TtInit init = TtInit::sequential;
  bool psd_projection = false;
  bool center = false;

  void validate() const;
  [[nodiscard]] std::array<Index, 3> effective_tucker_ranks() const;
};

struct CovarianceEstimate {
  Matrix covariance;
  /// Set for hardtth / tt_hosvd.
  std::optional<HardTThResult> tt;
};

/// Denoises R(sigma_hat) with the chosen method and maps back:
/// rearrange -> denoise -> rearrange_inv -> symmetrize [-> PSD clip].
[[nodiscard]] CovarianceEstimate estimate_from_sample_covariance(const Matrix& sigma_hat,
                                                                 const FactorShape& shape,
                                                                 const EstimatorSpec& spec);

/// Full pipeline from n x d row observations.
[[nodiscard]] Matrix estimate_covariance(const Matrix& x, const FactorShape& shape,
                                         const EstimatorSpec& spec);

/// Clips negative eigenvalues of a symmetric matrix at zero.
[[nodiscard]] Matrix psd_project(const Matrix& s);

struct SelectedRanks {
  Index rank_j = 0;
  Index rank_k = 0;
  double threshold_j = 0.0;
  double threshold_k = 0.0;
};

/// Threshold-based TT-rank selection on R(sigma_hat):
///   J = max{J' : sigma_J'(m1) >= c' w ||S|| sqrt((r1^2 + r2^2 r3^2 + log(6/delta)) / n)}
///   K = max{K' : sigma_K'(m3) >= c' w ||S|| sqrt((J r1^2 + J r2^2 + r3^2 + log(48/delta)) / n)}
/// with effective dimensions evaluated on sigma_hat.
[[nodiscard]] SelectedRanks select_ranks(const Matrix& sigma_hat, const FactorShape& shape,
                                         Index n, double omega, double delta, double c_prime);

}  // namespace ttcov
