#pragma once

#include "ttcov/tensor.hpp"

namespace ttcov {

/// Kronecker block sizes of a covariance of side d = p*q*r.
struct FactorShape {
  Index p = 1;
  Index q = 1;
  Index r = 1;

  [[nodiscard]] Index side() const noexcept { return p * q * r; }
  /// Dimensions (p^2, q^2, r^2) of the rearranged tensor.
  [[nodiscard]] Tensor3::Dims tensor_dims() const noexcept { return {p * p, q * q, r * r}; }

  void validate() const;
  bool operator==(const FactorShape&) const = default;
};

/// Row-major flattening: vec(M)_{(a-1)*cols + b} = M_{a,b}.
[[nodiscard]] Vector vec(const Matrix& m);

/// Inverse of vec for a rows x cols matrix.
[[nodiscard]] Matrix unvec(const Vector& v, Index rows, Index cols);

[[nodiscard]] Matrix kron(const Matrix& a, const Matrix& b);

/// Rearranges a pqr x pqr matrix into a p^2 x q^2 x r^2 tensor so that
/// U (x) V (x) W maps to vec(U) o vec(V) o vec(W).
///
/// 1-based: R(S)_{a,b,c} = S_{row, col} with
///   row = (ceil(a/p)-1) qr + (ceil(b/q)-1) r + ceil(c/r),
///   col = ((a-1)%p) qr + ((b-1)%q) r + (c-1)%r + 1.
[[nodiscard]] Tensor3 rearrange(const Matrix& s, const FactorShape& shape);

/// Exact inverse of rearrange.
[[nodiscard]] Matrix rearrange_inv(const Tensor3& t, const FactorShape& shape);

}  // namespace ttcov
