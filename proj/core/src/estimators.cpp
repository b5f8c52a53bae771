#include "ttcov/estimators.hpp"

#include "ttcov/diagnostics.hpp"
#include "ttcov/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ttcov {
namespace {

SvdOptions step_options(const SvdOptions& base, std::uint64_t step) {
  SvdOptions opts = base;
  opts.seed = derive_seed(base.seed, 0x771ULL, step);
  return opts;
}

void check_tt_ranks(const Tensor3& y, Index j, Index k, int iterations) {
  const auto [d1, d2, d3] = y.dims();
  if (j < 1 || j > std::min(d1, d2 * d3)) {
    throw std::invalid_argument("hardtth: J = " + std::to_string(j) + " outside [1, min(d1, d2*d3)]");
  }
  if (k < 1 || k > std::min(d3, j * d2)) {
    throw std::invalid_argument("hardtth: K = " + std::to_string(k) + " outside [1, min(d3, J*d2)]");
  }
  // m1(V^T x_3 Y) is d1 x (d2 K); the refinement steps need J <= d2 K.
  if (iterations > 0 && j > d2 * k) {
    throw std::invalid_argument("hardtth: J must not exceed d2*K when iterations > 0");
  }
  if (iterations < 0) throw std::invalid_argument("hardtth: iterations must be >= 0");
}

// y contracted with the transposes of every factor except `skip` (0-based).
Tensor3 contract_except(const Tensor3& y, const std::array<Matrix, 3>& factors, int skip) {
  Tensor3 t = y;
  for (int mode = 0; mode < 3; ++mode) {
    if (mode == skip) continue;
    t = mode_product(factors[static_cast<std::size_t>(mode)].transpose(), t, mode + 1);
  }
  return t;
}

Vector log_grid(double top, int points) {
  Vector grid(points);
  for (int i = 0; i < points; ++i) {
    grid(i) = top * std::pow(10.0, -3.0 + 3.0 * i / static_cast<double>(points - 1));
  }
  return grid;
}

Matrix symmetrize(const Matrix& s) { return 0.5 * (s + s.transpose()); }

}  // namespace

Tensor3 Tucker2Factorization::reconstruct() const {
  return mode_product(u, mode_product(v, core, 3), 1);
}

Tensor3 Tucker3Factorization::reconstruct() const {
  Tensor3 t = core;
  for (int mode = 0; mode < 3; ++mode) {
    t = mode_product(factors[static_cast<std::size_t>(mode)], t, mode + 1);
  }
  return t;
}

Tensor3 reconstruct(const Tucker2Factorization& f) { return f.reconstruct(); }
Tensor3 reconstruct(const Tucker3Factorization& f) { return f.reconstruct(); }

std::string_view init_name(TtInit init) {
  return init == TtInit::sequential ? "sequential" : "independent";
}

TtInit parse_init(std::string_view name) {
  if (name == "sequential") return TtInit::sequential;
  if (name == "independent") return TtInit::independent;
  throw std::invalid_argument("unknown initialization '" + std::string(name) + "'");
}

HardTThResult hardtth(const Tensor3& y, Index rank_j, Index rank_k, int iterations,
                      const SvdOptions& svd, TtInit init) {
  check_tt_ranks(y, rank_j, rank_k, iterations);
  check_finite(y, "hardtth");

  std::uint64_t step = 0;
  Matrix u = leading_left_singular_vectors(unfold(y, 1), rank_j, step_options(svd, step++));
  Matrix v = init == TtInit::sequential
                 ? leading_left_singular_vectors(unfold(mode_product(u.transpose(), y, 1), 3),
                                                 rank_k, step_options(svd, step))
                 : leading_left_singular_vectors(unfold(y, 3), rank_k, step_options(svd, step));
  ++step;
  HardTThResult result;
  result.u_init = u;
  result.v_init = v;

  for (int t = 1; t <= iterations; ++t) {
    u = leading_left_singular_vectors(unfold(mode_product(v.transpose(), y, 3), 1), rank_j,
                                      step_options(svd, step++));
    v = leading_left_singular_vectors(unfold(mode_product(u.transpose(), y, 1), 3), rank_k,
                                      step_options(svd, step++));
  }

  result.factors.core = mode_product(u.transpose(), mode_product(v.transpose(), y, 3), 1);
  result.factors.u = std::move(u);
  result.factors.v = std::move(v);
  return result;
}

HardTThResult tt_hosvd(const Tensor3& y, Index rank_j, Index rank_k, const SvdOptions& svd,
                       TtInit init) {
  return hardtth(y, rank_j, rank_k, 0, svd, init);
}

Tucker3Factorization tucker_hooi(const Tensor3& y, const std::array<Index, 3>& ranks,
                                 int iterations, const SvdOptions& svd) {
  if (iterations < 0) throw std::invalid_argument("tucker_hooi: iterations must be >= 0");
  for (int i = 0; i < 3; ++i) {
    const Index r = ranks[static_cast<std::size_t>(i)];
    const Index others = ranks[static_cast<std::size_t>((i + 1) % 3)] *
                         ranks[static_cast<std::size_t>((i + 2) % 3)];
    if (r < 1 || r > y.dim(i + 1) || r > y.size() / y.dim(i + 1)) {
      throw std::invalid_argument("tucker_hooi: rank " + std::to_string(r) + " out of range for mode " +
                                  std::to_string(i + 1));
    }
    if (iterations > 0 && r > others) {
      throw std::invalid_argument("tucker_hooi: each rank must not exceed the product of the other two");
    }
  }
  check_finite(y, "tucker_hooi");

  std::uint64_t step = 0;
  Tucker3Factorization f;
  for (int i = 0; i < 3; ++i) {
    f.factors[static_cast<std::size_t>(i)] = leading_left_singular_vectors(
        unfold(y, i + 1), ranks[static_cast<std::size_t>(i)], step_options(svd, step++));
  }
  for (int t = 0; t < iterations; ++t) {
    for (int i = 0; i < 3; ++i) {
      f.factors[static_cast<std::size_t>(i)] =
          leading_left_singular_vectors(unfold(contract_except(y, f.factors, i), i + 1),
                                        ranks[static_cast<std::size_t>(i)], step_options(svd, step++));
    }
  }
  f.core = mode_product(f.factors[2].transpose(), contract_except(y, f.factors, 2), 3);
  return f;
}

Tensor3 prls(const Tensor3& y, double lambda1, double lambda2) {
  const Tensor3 first = fold(soft_threshold_svd(unfold(y, 1), lambda1), 1, y.dims());
  return fold(soft_threshold_svd(unfold(first, 3), lambda2), 3, y.dims());
}

PrlsTuning tune_prls(const Tensor3& y, const Tensor3& target, int points) {
  if (points < 2) throw std::invalid_argument("tune_prls: need at least 2 grid points");
  if (y.dims() != target.dims()) throw std::invalid_argument("tune_prls: dims differ");
  check_finite(y, "tune_prls");

  const Eigen::BDCSVD<Matrix> first(unfold(y, 1), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix target3 = unfold(target, 3);
  const double target_sq = target3.squaredNorm();
  const double target_norm = std::sqrt(target_sq);
  const Vector grid1 = log_grid(first.singularValues()(0), points);

  PrlsTuning best;
  double best_sq = std::numeric_limits<double>::infinity();
  for (double lambda1 : grid1) {
    const Vector s1 = (first.singularValues().array() - lambda1 / 2.0).max(0.0).matrix();
    const Matrix m1 = first.matrixU() * s1.asDiagonal() * first.matrixV().transpose();
    const Matrix m3 = unfold(fold(m1, 1, y.dims()), 3);
    const Eigen::BDCSVD<Matrix> third(m3, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s3 = third.singularValues();
    if (s3(0) <= 0.0) {
      if (target_sq < best_sq) best = {lambda1, 0.0, 1.0}, best_sq = target_sq;
      continue;
    }
    // ||U diag(s') V^T - T||^2 = ||s'||^2 - 2 sum_i s'_i u_i^T T v_i + ||T||^2
    const Matrix projected = third.matrixU().transpose() * target3;
    const Vector overlap =
        projected.cwiseProduct(third.matrixV().transpose()).rowwise().sum();
    for (double lambda2 : log_grid(s3(0), points)) {
      const Vector s = (s3.array() - lambda2 / 2.0).max(0.0).matrix();
      const double err_sq = std::max(s.squaredNorm() - 2.0 * s.dot(overlap) + target_sq, 0.0);
      if (err_sq < best_sq) {
        best_sq = err_sq;
        best = {lambda1, lambda2, target_norm > 0 ? std::sqrt(err_sq) / target_norm : 0.0};
      }
    }
  }
  return best;
}

Matrix sample_covariance(const Matrix& x) {
  if (x.rows() < 1) throw std::invalid_argument("sample_covariance: empty sample");
  check_finite(x, "sample_covariance");
  Matrix lower = Matrix::Zero(x.cols(), x.cols());
  lower.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(x.rows()));
  return lower.selfadjointView<Eigen::Lower>();
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::sample: return "sample";
    case Method::hardtth: return "hardtth";
    case Method::tt_hosvd: return "tt_hosvd";
    case Method::tucker: return "tucker";
    case Method::tucker_hooi: return "tucker_hooi";
    case Method::prls: return "prls";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::sample, Method::hardtth, Method::tt_hosvd, Method::tucker,
                   Method::tucker_hooi, Method::prls}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown estimator method '" + std::string(name) + "'");
}

void EstimatorSpec::validate() const {
  if (iterations < 0) throw std::invalid_argument("EstimatorSpec: iterations must be >= 0");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2)) {
    throw std::invalid_argument("EstimatorSpec: lambdas must be finite and >= 0");
  }
  if (svd.oversample < 0 || svd.power_iters < 0) {
    throw std::invalid_argument("EstimatorSpec: oversample and power_iters must be >= 0");
  }
  switch (method) {
    case Method::hardtth:
    case Method::tt_hosvd:
      if (rank_j < 1 || rank_k < 1) throw std::invalid_argument("EstimatorSpec: J, K must be >= 1");
      break;
    case Method::tucker:
    case Method::tucker_hooi:
      for (Index r : effective_tucker_ranks()) {
        if (r < 1) throw std::invalid_argument("EstimatorSpec: Tucker ranks must be >= 1");
      }
      break;
    case Method::sample:
    case Method::prls:
      break;
  }
}

std::array<Index, 3> EstimatorSpec::effective_tucker_ranks() const {
  return tucker_ranks.value_or(std::array<Index, 3>{rank_j, rank_j * rank_k, rank_k});
}

Matrix psd_project(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s));
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  return symmetrize(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose());
}

CovarianceEstimate estimate_from_sample_covariance(const Matrix& sigma_hat,
                                                   const FactorShape& shape,
                                                   const EstimatorSpec& spec) {
  spec.validate();
  shape.validate();
  if (sigma_hat.rows() != shape.side() || sigma_hat.cols() != shape.side()) {
    throw std::invalid_argument("estimate: covariance side does not equal p*q*r");
  }

  CovarianceEstimate out;
  if (spec.method == Method::sample) {
    out.covariance = symmetrize(sigma_hat);
  } else {
    const Tensor3 y = rearrange(sigma_hat, shape);
    Tensor3 denoised;
    switch (spec.method) {
      case Method::hardtth:
      case Method::tt_hosvd: {
        const int iters = spec.method == Method::tt_hosvd ? 0 : spec.iterations;
        HardTThResult r = hardtth(y, spec.rank_j, spec.rank_k, iters, spec.svd, spec.init);
        denoised = r.factors.reconstruct();
        out.tt = std::move(r);
        break;
      }
      case Method::tucker:
        denoised = tucker_hooi(y, spec.effective_tucker_ranks(), 0, spec.svd).reconstruct();
        break;
      case Method::tucker_hooi:
        denoised = tucker_hooi(y, spec.effective_tucker_ranks(), spec.iterations, spec.svd).reconstruct();
        break;
      case Method::prls:
        denoised = prls(y, spec.lambda1, spec.lambda2);
        break;
      case Method::sample:
        break;
    }
    out.covariance = symmetrize(rearrange_inv(denoised, shape));
  }
  if (spec.psd_projection) out.covariance = psd_project(out.covariance);
  return out;
}

Matrix estimate_covariance(const Matrix& x, const FactorShape& shape, const EstimatorSpec& spec) {
  shape.validate();
  if (x.cols() != shape.side()) {
    throw std::invalid_argument("estimate_covariance: observation dimension does not equal p*q*r");
  }
  if (spec.center) {
    const Matrix centered = x.rowwise() - x.colwise().mean();
    return estimate_from_sample_covariance(sample_covariance(centered), shape, spec).covariance;
  }
  return estimate_from_sample_covariance(sample_covariance(x), shape, spec).covariance;
}

SelectedRanks select_ranks(const Matrix& sigma_hat, const FactorShape& shape, Index n,
                           double omega, double delta, double c_prime) {
  if (!(omega > 0.0)) throw std::invalid_argument("select_ranks: omega must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("select_ranks: delta must be in (0, 1)");
  if (!(c_prime > 0.0)) throw std::invalid_argument("select_ranks: c_prime must be > 0");
  if (n < 1) throw std::invalid_argument("select_ranks: n must be >= 1");

  const Tensor3 y = rearrange(sigma_hat, shape);
  const EffectiveDims ed = effective_dims(sigma_hat, shape);
  const double scale = c_prime * omega * symmetric_spectral_norm(sigma_hat);
  const double nn = static_cast<double>(n);

  SelectedRanks out;
  const Vector sv1 = singular_values(unfold(y, 1));
  out.threshold_j =
      scale * std::sqrt((ed.r1 * ed.r1 + ed.r2 * ed.r2 * ed.r3 * ed.r3 + std::log(6.0 / delta)) / nn);
  while (out.rank_j < sv1.size() && sv1(out.rank_j) >= out.threshold_j) ++out.rank_j;

  const double jj = static_cast<double>(out.rank_j);
  const Vector sv3 = singular_values(unfold(y, 3));
  out.threshold_k = scale * std::sqrt((jj * ed.r1 * ed.r1 + jj * ed.r2 * ed.r2 + ed.r3 * ed.r3 +
                                       std::log(48.0 / delta)) / nn);
  while (out.rank_k < sv3.size() && sv3(out.rank_k) >= out.threshold_k) ++out.rank_k;
  return out;
}

}  // namespace ttcov
