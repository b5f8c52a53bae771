#include "ttcov/linalg.hpp"

#include "ttcov/errors.hpp"
#include "ttcov/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ttcov {
namespace {

constexpr double kOrthonormalTolerance = 1e-8;

void check_rank(const Matrix& m, Index k) {
  const Index max_rank = std::min(m.rows(), m.cols());
  if (k < 1 || k > max_rank) {
    throw std::invalid_argument("truncated_svd: rank " + std::to_string(k) +
                                " outside [1, " + std::to_string(max_rank) + "]");
  }
}

TruncatedSvd exact_svd(const Matrix& m, Index k) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(k), svd.singularValues().head(k),
          svd.matrixV().leftCols(k).transpose()};
}

// Range finder with subspace iteration; returns an orthonormal basis of an
// approximate dominant column space of m with `width` columns.
Matrix randomized_range(const Matrix& m, Index width, const SvdOptions& opts) {
  Rng rng(opts.seed);
  const Matrix omega = gaussian_matrix(m.cols(), width, rng);
  Matrix q = orthonormalize(m * omega);
  for (int i = 0; i < opts.power_iters; ++i) {
    const Matrix z = orthonormalize(m.transpose() * q);
    q = orthonormalize(m * z);
  }
  return q;
}

TruncatedSvd randomized_svd(const Matrix& m, Index k, const SvdOptions& opts) {
  if (opts.oversample < 0 || opts.power_iters < 0) {
    throw std::invalid_argument("randomized svd: oversample and power_iters must be >= 0");
  }
  const Index width = std::min(k + opts.oversample, std::min(m.rows(), m.cols()));
  const Matrix q = randomized_range(m, width, opts);
  const Matrix b = q.transpose() * m;
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {q * svd.matrixU().leftCols(k), svd.singularValues().head(k),
          svd.matrixV().leftCols(k).transpose()};
}

void check_orthonormal(const Matrix& u, const char* what) {
  if (orthonormality_defect(u) > kOrthonormalTolerance) {
    throw std::invalid_argument(std::string(what) + ": columns are not orthonormal");
  }
}

double exact_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

}  // namespace

TruncatedSvd truncated_svd(const Matrix& m, Index k, const SvdOptions& opts) {
  check_rank(m, k);
  check_finite(m, "truncated_svd");
  return opts.method == SvdMethod::exact ? exact_svd(m, k) : randomized_svd(m, k, opts);
}

Matrix leading_left_singular_vectors(const Matrix& m, Index k, const SvdOptions& opts) {
  check_rank(m, k);
  check_finite(m, "truncated_svd");
  if (opts.method == SvdMethod::exact) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(k);
  }
  return randomized_svd(m, k, opts).u;
}

Matrix soft_threshold_svd(const Matrix& m, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("soft_threshold_svd: lambda must be >= 0");
  check_finite(m, "soft_threshold_svd");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector shrunk = (svd.singularValues().array() - lambda / 2.0).max(0.0).matrix();
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

Vector singular_values(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0 || m.isZero(0.0)) return 0.0;
  const bool wide = m.rows() <= m.cols();
  const Index n = wide ? m.rows() : m.cols();
  Rng rng(0x5eedULL);
  Vector x = gaussian_matrix(n, 1, rng).col(0).normalized();
  double prev = 0.0;
  double value = 0.0;
  for (int it = 0; it < 1000; ++it) {
    // Rayleigh quotient of the Gram matrix at x, then one power step.
    Vector y = wide ? Vector(m * (m.transpose() * x)) : Vector(m.transpose() * (m * x));
    value = std::sqrt(std::max(x.dot(y), 0.0));
    const double len = y.norm();
    if (len == 0.0) break;
    x = y / len;
    if (it > 0 && std::abs(value - prev) <= 1e-10 * value) break;
    prev = value;
  }
  return value;
}

double sigma_k(const Matrix& m, Index k) {
  const Index max_rank = std::min(m.rows(), m.cols());
  if (k < 1 || k > max_rank) {
    throw std::invalid_argument("sigma_k: k " + std::to_string(k) + " outside [1, " +
                                std::to_string(max_rank) + "]");
  }
  return singular_values(m)(k - 1);
}

double symmetric_spectral_norm(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("symmetric_spectral_norm: not square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double sin_theta(const Matrix& u1, const Matrix& u2) {
  if (u1.rows() != u2.rows()) throw std::invalid_argument("sin_theta: ambient dimensions differ");
  check_orthonormal(u1, "sin_theta");
  check_orthonormal(u2, "sin_theta");
  const Matrix residual = u2 - u1 * (u1.transpose() * u2);
  return std::clamp(exact_norm(residual), 0.0, 1.0);
}

double procrustes_distance(const Matrix& u1, const Matrix& u2) {
  if (u1.rows() != u2.rows() || u1.cols() != u2.cols()) {
    throw std::invalid_argument("procrustes_distance: shapes differ");
  }
  Eigen::JacobiSVD<Matrix> svd(u2.transpose() * u1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix o = svd.matrixU() * svd.matrixV().transpose();
  return exact_norm(u1 - u2 * o);
}

Matrix orthonormalize(const Matrix& m) {
  if (m.rows() < m.cols()) throw std::invalid_argument("orthonormalize: more columns than rows");
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

double orthonormality_defect(const Matrix& u) {
  if (u.cols() == 0) return 0.0;
  return (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace ttcov
