#pragma once

#include "ttcov/random.hpp"
#include "ttcov/rearrange.hpp"
#include "ttcov/tensor.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace ttcov {

enum class DecayKind { gaussian, inverse_quadratic, exponential, linear };

[[nodiscard]] std::string_view decay_name(DecayKind k);
[[nodiscard]] DecayKind parse_decay(std::string_view name);

/// How random symmetric factors are drawn. `gaussian` fills the diagonal and
/// upper triangle with i.i.d. N(0, 1) and mirrors. The decay kinds use a
/// random orthogonal eigenbasis with eigenvalues
///   inverse_quadratic: 1 / i^2
///   exponential:       exp(-rate * (i - 1))
///   linear:            (n - i + 1) / n
/// for i = 1..n.
struct SpectrumDecay {
  DecayKind kind = DecayKind::gaussian;
  double rate = 0.5;

  /// Eigenvalue profile of length n (nonincreasing, nonnegative). Throws for
  /// the gaussian kind, which has no fixed profile.
  [[nodiscard]] Vector profile(Index n) const;
};

/// Factors of Sigma = sum_{j,k} A_j^2 (x) B_jk^2 (x) C_k^2.
struct GroundTruth {
  FactorShape shape;
  std::vector<Matrix> a;  // J matrices p x p
  std::vector<Matrix> b;  // J*K matrices q x q, index j*K + k
  std::vector<Matrix> c;  // K matrices r x r
  std::uint64_t seed = 0;

  [[nodiscard]] Index rank_j() const noexcept { return static_cast<Index>(a.size()); }
  [[nodiscard]] Index rank_k() const noexcept { return static_cast<Index>(c.size()); }
  [[nodiscard]] const Matrix& b_at(Index j, Index k) const {
    return b[static_cast<std::size_t>(j * rank_k() + k)];
  }
  /// Throws std::invalid_argument when factor counts or sizes are inconsistent.
  void validate() const;
};

/// Random symmetric n x n matrix of the given kind.
[[nodiscard]] Matrix random_symmetric(Index n, const SpectrumDecay& decay, Rng& rng);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of R's diagonal folded into Q.
[[nodiscard]] Matrix random_orthogonal(Index n, Rng& rng);

/// Draws A_1..A_J, then B_11..B_1K, B_21.., then C_1..C_K from one stream.
[[nodiscard]] GroundTruth gen_ground_truth(const FactorShape& shape, Index rank_j, Index rank_k,
                                           const SpectrumDecay& decay, std::uint64_t seed);

[[nodiscard]] Matrix true_covariance(const GroundTruth& gt);

/// n x pqr matrix whose rows are vec(sum_{j,k} A_j x_1 B_jk x_2 C_k x_3 E_ijk)
/// with fresh standard Gaussian E_ijk. The noise for pair (j, k) is drawn for
/// all n observations at once, pairs in (j, k) lexicographic order.
[[nodiscard]] Matrix sample_observations(const GroundTruth& gt, Index n, std::uint64_t seed);

/// Y = T* + sigma * Z with T* = R(sum_{j,k} U_j (x) W_jk (x) V_k).
struct TensorInstance {
  Tensor3 t_star;
  Tensor3 y;
  Matrix u_star;  // leading J left singular vectors of m1(T*)
  Matrix v_star;  // leading K left singular vectors of m3(T*)
};

/// Sub-components are drawn in the same order as gen_ground_truth.
[[nodiscard]] TensorInstance gen_tensor_instance(const FactorShape& shape, Index rank_j,
                                                 Index rank_k, const SpectrumDecay& decay,
                                                 double noise_sigma, std::uint64_t seed);

/// T* = R(sum_{j,k} U_j (x) W_jk (x) V_k) built directly in TT form.
[[nodiscard]] Tensor3 tt_tensor(const GroundTruth& components);

}  // namespace ttcov
