#include "ttcov/rearrange.hpp"

#include <stdexcept>
#include <string>

namespace ttcov {

void FactorShape::validate() const {
  if (p <= 0 || q <= 0 || r <= 0) {
    throw std::invalid_argument("FactorShape: p, q, r must be positive");
  }
}

Vector vec(const Matrix& m) {
  Vector v(m.size());
  for (Index a = 0; a < m.rows(); ++a)
    for (Index b = 0; b < m.cols(); ++b) v(a * m.cols() + b) = m(a, b);
  return v;
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec: length mismatch");
  Matrix m(rows, cols);
  for (Index a = 0; a < rows; ++a)
    for (Index b = 0; b < cols; ++b) m(a, b) = v(a * cols + b);
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// The map is a permutation of entries. Loop over the factor indices directly:
// row = (i1 q + i2) r + i3, col = (j1 q + j2) r + j3, a = i1 p + j1, etc.
Tensor3 rearrange(const Matrix& s, const FactorShape& shape) {
  shape.validate();
  const Index d = shape.side();
  if (s.rows() != d || s.cols() != d) {
    throw std::invalid_argument("rearrange: matrix side " + std::to_string(s.rows()) + "x" +
                                std::to_string(s.cols()) + " does not equal p*q*r = " +
                                std::to_string(d));
  }
  const auto [p, q, r] = shape;
  Tensor3 t(shape.tensor_dims());
  for (Index i1 = 0; i1 < p; ++i1)
    for (Index j1 = 0; j1 < p; ++j1)
      for (Index i2 = 0; i2 < q; ++i2)
        for (Index j2 = 0; j2 < q; ++j2)
          for (Index i3 = 0; i3 < r; ++i3)
            for (Index j3 = 0; j3 < r; ++j3)
              t(i1 * p + j1, i2 * q + j2, i3 * r + j3) =
                  s((i1 * q + i2) * r + i3, (j1 * q + j2) * r + j3);
  return t;
}

Matrix rearrange_inv(const Tensor3& t, const FactorShape& shape) {
  shape.validate();
  if (t.dims() != shape.tensor_dims()) {
    throw std::invalid_argument("rearrange_inv: tensor dims do not equal (p^2, q^2, r^2)");
  }
  const auto [p, q, r] = shape;
  const Index d = shape.side();
  Matrix s(d, d);
  for (Index i1 = 0; i1 < p; ++i1)
    for (Index j1 = 0; j1 < p; ++j1)
      for (Index i2 = 0; i2 < q; ++i2)
        for (Index j2 = 0; j2 < q; ++j2)
          for (Index i3 = 0; i3 < r; ++i3)
            for (Index j3 = 0; j3 < r; ++j3)
              s((i1 * q + i2) * r + i3, (j1 * q + j2) * r + j3) =
                  t(i1 * p + j1, i2 * q + j2, i3 * r + j3);
  return s;
}

}  // namespace ttcov
