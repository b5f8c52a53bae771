#include "ttcov/tensor.hpp"

#include "ttcov/errors.hpp"

#include <cmath>
#include <string>

namespace ttcov {
namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

void check_same_dims(const Tensor3& s, const Tensor3& t, const char* op) {
  if (s.dims() != t.dims()) {
    throw std::invalid_argument(std::string(op) + ": tensor dimensions differ");
  }
}

Index product(const Tensor3::Dims& d) { return d[0] * d[1] * d[2]; }

}  // namespace

Tensor3::Tensor3(Dims dims) : dims_(dims) {
  for (Index d : dims) {
    if (d <= 0) throw std::invalid_argument("Tensor3 dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(product(dims)), 0.0);
}

Tensor3::Tensor3(Dims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  for (Index d : dims) {
    if (d <= 0) throw std::invalid_argument("Tensor3 dimensions must be positive");
  }
  if (static_cast<Index>(data_.size()) != product(dims)) {
    throw std::invalid_argument("Tensor3 data length does not match d1*d2*d3");
  }
}

Index Tensor3::dim(int mode) const {
  check_mode(mode);
  return dims_[static_cast<std::size_t>(mode - 1)];
}

Eigen::Map<const RowMajorMatrix> Tensor3::as_mode1() const {
  return {data_.data(), dims_[0], dims_[1] * dims_[2]};
}
Eigen::Map<RowMajorMatrix> Tensor3::as_mode1() {
  return {data_.data(), dims_[0], dims_[1] * dims_[2]};
}
Eigen::Map<const RowMajorMatrix> Tensor3::as_mode3_transposed() const {
  return {data_.data(), dims_[0] * dims_[1], dims_[2]};
}
Eigen::Map<RowMajorMatrix> Tensor3::as_mode3_transposed() {
  return {data_.data(), dims_[0] * dims_[1], dims_[2]};
}

Matrix unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [d1, d2, d3] = t.dims();
  switch (mode) {
    case 1:
      return t.as_mode1();
    case 3:
      return t.as_mode3_transposed().transpose();
    default: {
      Matrix m(d2, d1 * d3);
      for (Index a = 0; a < d1; ++a)
        for (Index b = 0; b < d2; ++b)
          for (Index c = 0; c < d3; ++c) m(b, c * d1 + a) = t(a, b, c);
      return m;
    }
  }
}

Tensor3 fold(const Matrix& m, int mode, const Tensor3::Dims& dims) {
  check_mode(mode);
  const auto [d1, d2, d3] = dims;
  const Index rows = dims[static_cast<std::size_t>(mode - 1)];
  const Index cols = product(dims) / rows;
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument("fold: matrix shape does not match the unfolded shape of dims");
  }
  Tensor3 t(dims);
  switch (mode) {
    case 1:
      t.as_mode1() = m;
      break;
    case 3:
      t.as_mode3_transposed() = m.transpose();
      break;
    default:
      for (Index a = 0; a < d1; ++a)
        for (Index b = 0; b < d2; ++b)
          for (Index c = 0; c < d3; ++c) t(a, b, c) = m(b, c * d1 + a);
  }
  return t;
}

Tensor3 mode_product(const Matrix& m, const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [d1, d2, d3] = t.dims();
  if (m.cols() != t.dim(mode)) {
    throw std::invalid_argument("mode_product: matrix columns (" + std::to_string(m.cols()) +
                                ") do not match tensor mode size (" +
                                std::to_string(t.dim(mode)) + ")");
  }
  const Index out = m.rows();
  switch (mode) {
    case 1: {
      Tensor3 r({out, d2, d3});
      r.as_mode1().noalias() = m * t.as_mode1();
      return r;
    }
    case 3: {
      Tensor3 r({d1, d2, out});
      r.as_mode3_transposed().noalias() = t.as_mode3_transposed() * m.transpose();
      return r;
    }
    default: {
      Tensor3 r({d1, out, d3});
      const double* src = t.data().data();
      double* dst = r.data().data();
      for (Index a = 0; a < d1; ++a) {
        Eigen::Map<const RowMajorMatrix> slab(src + a * d2 * d3, d2, d3);
        Eigen::Map<RowMajorMatrix> res(dst + a * out * d3, out, d3);
        res.noalias() = m * slab;
      }
      return r;
    }
  }
}

double frobenius_norm(const Tensor3& t) { return t.as_mode1().norm(); }

double inner_product(const Tensor3& s, const Tensor3& t) {
  check_same_dims(s, t, "inner_product");
  return s.as_mode1().cwiseProduct(t.as_mode1()).sum();
}

Tensor3 operator+(const Tensor3& s, const Tensor3& t) {
  check_same_dims(s, t, "add");
  Tensor3 r(s.dims());
  r.as_mode1() = s.as_mode1() + t.as_mode1();
  return r;
}

Tensor3 operator-(const Tensor3& s, const Tensor3& t) {
  check_same_dims(s, t, "sub");
  Tensor3 r(s.dims());
  r.as_mode1() = s.as_mode1() - t.as_mode1();
  return r;
}

Tensor3 operator*(double alpha, const Tensor3& t) {
  Tensor3 r(t.dims());
  r.as_mode1() = alpha * t.as_mode1();
  return r;
}

Tensor3 outer(const Vector& x, const Vector& y, const Vector& z) {
  Tensor3 r({x.size(), y.size(), z.size()});
  for (Index a = 0; a < x.size(); ++a)
    for (Index b = 0; b < y.size(); ++b)
      for (Index c = 0; c < z.size(); ++c) r(a, b, c) = x(a) * y(b) * z(c);
  return r;
}

void check_finite(const Tensor3& t, const char* what) {
  for (double v : t.data()) {
    if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite entry");
  }
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + ": non-finite entry");
}

}  // namespace ttcov
