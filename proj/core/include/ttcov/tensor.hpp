#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace ttcov {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense order-3 tensor of doubles.
///
/// Entry (a, b, c) (0-based) lives at offset (a * d2 + b) * d3 + c. Public
/// index formulas in the docs are 1-based: m_1(T)_{x,y} = T_{x, ceil(y/d3),
/// (y-1)%d3+1} and so on.
class Tensor3 {
 public:
  using Dims = std::array<Index, 3>;

  Tensor3() = default;
  explicit Tensor3(Dims dims);
  Tensor3(Dims dims, std::vector<double> data);

  static Tensor3 zeros(Index d1, Index d2, Index d3) { return Tensor3({d1, d2, d3}); }

  [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
  [[nodiscard]] Index dim(int mode) const;
  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(data_.size()); }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }

  double& operator()(Index a, Index b, Index c) { return data_[offset(a, b, c)]; }
  double operator()(Index a, Index b, Index c) const { return data_[offset(a, b, c)]; }

  /// Row-major view of the storage as a d1 x (d2*d3) matrix, i.e. m_1.
  [[nodiscard]] Eigen::Map<const RowMajorMatrix> as_mode1() const;
  [[nodiscard]] Eigen::Map<RowMajorMatrix> as_mode1();
  /// Row-major view of the storage as a (d1*d2) x d3 matrix, i.e. m_3 transposed.
  [[nodiscard]] Eigen::Map<const RowMajorMatrix> as_mode3_transposed() const;
  [[nodiscard]] Eigen::Map<RowMajorMatrix> as_mode3_transposed();

  bool operator==(const Tensor3&) const = default;

 private:
  [[nodiscard]] std::size_t offset(Index a, Index b, Index c) const noexcept {
    return static_cast<std::size_t>((a * dims_[1] + b) * dims_[2] + c);
  }

  Dims dims_{0, 0, 0};
  std::vector<double> data_;
};

/// Mode-m matricization. Shapes: (d1, d2*d3), (d2, d1*d3), (d3, d1*d2).
/// Column order (1-based): mode 1 -> (b-1)*d3 + c, mode 2 -> (c-1)*d1 + a,
/// mode 3 -> (a-1)*d2 + b.
[[nodiscard]] Matrix unfold(const Tensor3& t, int mode);

/// Inverse of unfold for the given target dims.
[[nodiscard]] Tensor3 fold(const Matrix& m, int mode, const Tensor3::Dims& dims);

/// (M x_mode T): contracts the mode index of T with the columns of M.
[[nodiscard]] Tensor3 mode_product(const Matrix& m, const Tensor3& t, int mode);

[[nodiscard]] double frobenius_norm(const Tensor3& t);
[[nodiscard]] double inner_product(const Tensor3& s, const Tensor3& t);

[[nodiscard]] Tensor3 operator+(const Tensor3& s, const Tensor3& t);
[[nodiscard]] Tensor3 operator-(const Tensor3& s, const Tensor3& t);
[[nodiscard]] Tensor3 operator*(double alpha, const Tensor3& t);

/// Outer product x o y o z.
[[nodiscard]] Tensor3 outer(const Vector& x, const Vector& y, const Vector& z);

void check_finite(const Tensor3& t, const char* what);
void check_finite(const Matrix& m, const char* what);

}  // namespace ttcov
