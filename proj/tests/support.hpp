#pragma once

// Test-side oracles. Everything here is written from the 1-based index
// formulas with plain loops and never calls the library routine it checks.

#include "ttcov/random.hpp"
#include "ttcov/rearrange.hpp"
#include "ttcov/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

namespace ttcov::test {

inline Tensor3 random_tensor(Index d1, Index d2, Index d3, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor3 t({d1, d2, d3});
  for (double& v : t.data()) v = normal(rng);
  return t;
}

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return gaussian_matrix(rows, cols, rng);
}

inline Matrix random_psd(Index n, std::uint64_t seed) {
  const Matrix g = random_matrix(n, n + 2, seed);
  return g * g.transpose();
}

inline Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, cols, seed));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

// m_1(T)_{x,y} = T_{x, ceil(y/d3), (y-1)%d3+1}
inline Matrix oracle_m1(const Tensor3& t) {
  const auto [d1, d2, d3] = t.dims();
  Matrix m(d1, d2 * d3);
  for (Index x = 1; x <= d1; ++x)
    for (Index y = 1; y <= d2 * d3; ++y) {
      const Index b = (y + d3 - 1) / d3;
      const Index c = (y - 1) % d3 + 1;
      m(x - 1, y - 1) = t(x - 1, b - 1, c - 1);
    }
  return m;
}

// m_2(T)_{b, (c-1) d1 + a} = T_{a,b,c}
inline Matrix oracle_m2(const Tensor3& t) {
  const auto [d1, d2, d3] = t.dims();
  Matrix m(d2, d1 * d3);
  for (Index a = 1; a <= d1; ++a)
    for (Index b = 1; b <= d2; ++b)
      for (Index c = 1; c <= d3; ++c) m(b - 1, (c - 1) * d1 + a - 1) = t(a - 1, b - 1, c - 1);
  return m;
}

// m_3(T)_{c, (a-1) d2 + b} = T_{a,b,c}
inline Matrix oracle_m3(const Tensor3& t) {
  const auto [d1, d2, d3] = t.dims();
  Matrix m(d3, d1 * d2);
  for (Index a = 1; a <= d1; ++a)
    for (Index b = 1; b <= d2; ++b)
      for (Index c = 1; c <= d3; ++c) m(c - 1, (a - 1) * d2 + b - 1) = t(a - 1, b - 1, c - 1);
  return m;
}

// (A (x) B)_{(i1-1)m+i2, (j1-1)n+j2} = A_{i1,j1} B_{i2,j2}
inline Matrix oracle_kron(const Matrix& a, const Matrix& b) {
  const Index m = b.rows();
  const Index n = b.cols();
  Matrix out(a.rows() * m, a.cols() * n);
  for (Index i1 = 0; i1 < a.rows(); ++i1)
    for (Index j1 = 0; j1 < a.cols(); ++j1)
      for (Index i2 = 0; i2 < m; ++i2)
        for (Index j2 = 0; j2 < n; ++j2) out(i1 * m + i2, j1 * n + j2) = a(i1, j1) * b(i2, j2);
  return out;
}

// vec(M)_{(a-1) cols + b} = M_{a,b}
inline Vector oracle_vec(const Matrix& m) {
  Vector v(m.size());
  for (Index a = 0; a < m.rows(); ++a)
    for (Index b = 0; b < m.cols(); ++b) v(a * m.cols() + b) = m(a, b);
  return v;
}

// Rearrangement from the 1-based formula:
//   row = (ceil(a/p)-1) qr + (ceil(b/q)-1) r + ceil(c/r)
//   col = ((a-1)%p) qr + ((b-1)%q) r + (c-1)%r + 1
inline Tensor3 oracle_rearrange(const Matrix& s, Index p, Index q, Index r) {
  Tensor3 t({p * p, q * q, r * r});
  auto ceil_div = [](Index x, Index y) { return (x + y - 1) / y; };
  for (Index a = 1; a <= p * p; ++a)
    for (Index b = 1; b <= q * q; ++b)
      for (Index c = 1; c <= r * r; ++c) {
        const Index row = (ceil_div(a, p) - 1) * q * r + (ceil_div(b, q) - 1) * r + ceil_div(c, r);
        const Index col = ((a - 1) % p) * q * r + ((b - 1) % q) * r + (c - 1) % r + 1;
        t(a - 1, b - 1, c - 1) = s(row - 1, col - 1);
      }
  return t;
}

inline Tensor3 oracle_outer(const Vector& x, const Vector& y, const Vector& z) {
  Tensor3 t({x.size(), y.size(), z.size()});
  for (Index a = 0; a < x.size(); ++a)
    for (Index b = 0; b < y.size(); ++b)
      for (Index c = 0; c < z.size(); ++c) t(a, b, c) = x(a) * y(b) * z(c);
  return t;
}

// (M x_mode T) by explicit summation over the contracted index.
inline Tensor3 oracle_mode_product(const Matrix& m, const Tensor3& t, int mode) {
  auto dims = t.dims();
  dims[static_cast<std::size_t>(mode - 1)] = m.rows();
  Tensor3 out(dims);
  for (Index a = 0; a < dims[0]; ++a)
    for (Index b = 0; b < dims[1]; ++b)
      for (Index c = 0; c < dims[2]; ++c) {
        double s = 0.0;
        const Index inner = t.dim(mode);
        for (Index k = 0; k < inner; ++k) {
          const double tv = mode == 1 ? t(k, b, c) : mode == 2 ? t(a, k, c) : t(a, b, k);
          const Index row = mode == 1 ? a : mode == 2 ? b : c;
          s += m(row, k) * tv;
        }
        out(a, b, c) = s;
      }
  return out;
}

inline double max_abs_diff(const Tensor3& s, const Tensor3& t) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.data().size(); ++i) m = std::max(m, std::abs(s.data()[i] - t.data()[i]));
  return m;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline double rel_diff(const Tensor3& a, const Tensor3& b) {
  const double scale = std::max(frobenius_norm(a), frobenius_norm(b));
  return scale == 0.0 ? 0.0 : frobenius_norm(a - b) / scale;
}

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ttcov_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ttcov::test
