#pragma once

#include "ttcov/tensor.hpp"

#include <cstdint>

namespace ttcov {

enum class SvdMethod { exact, randomized };

/// How truncated SVDs are computed. The randomized path is a Gaussian range
/// finder with `oversample` extra columns and `power_iters` re-orthogonalized
/// subspace iterations.
struct SvdOptions {
  SvdMethod method = SvdMethod::exact;
  Index oversample = 10;
  int power_iters = 2;
  std::uint64_t seed = 0;
};

/// Leading k singular triplets: m ~ u * diag(s) * vt.
struct TruncatedSvd {
  Matrix u;   // rows x k, orthonormal columns
  Vector s;   // k values, nonincreasing
  Matrix vt;  // k x cols, orthonormal rows
};

[[nodiscard]] TruncatedSvd truncated_svd(const Matrix& m, Index k, const SvdOptions& opts = {});

/// Only the leading k left singular vectors; cheaper for wide inputs.
[[nodiscard]] Matrix leading_left_singular_vectors(const Matrix& m, Index k,
                                                   const SvdOptions& opts = {});

/// U diag(max(s - lambda/2, 0)) V^T from a full SVD of m.
[[nodiscard]] Matrix soft_threshold_svd(const Matrix& m, double lambda);

/// All singular values, nonincreasing.
[[nodiscard]] Vector singular_values(const Matrix& m);

/// Largest singular value by power iteration on the smaller Gram matrix
/// (relative tolerance 1e-10, at most 1000 iterations).
[[nodiscard]] double spectral_norm(const Matrix& m);

/// k-th largest singular value (1-based k), exact.
[[nodiscard]] double sigma_k(const Matrix& m, Index k);

/// Largest |eigenvalue| of a symmetric matrix, exact.
[[nodiscard]] double symmetric_spectral_norm(const Matrix& m);

/// ||(I - u1 u1^T) u2||, the sine of the largest principal angle between the
/// column spaces. Both inputs must have orthonormal columns.
[[nodiscard]] double sin_theta(const Matrix& u1, const Matrix& u2);

/// min over orthogonal O of ||u1 - u2 O|| (spectral norm), via the polar
/// factor of u2^T u1.
[[nodiscard]] double procrustes_distance(const Matrix& u1, const Matrix& u2);

/// Orthonormal basis of the column space of m (thin Householder QR).
[[nodiscard]] Matrix orthonormalize(const Matrix& m);

/// Max-abs deviation of u^T u from the identity.
[[nodiscard]] double orthonormality_defect(const Matrix& u);

}  // namespace ttcov
