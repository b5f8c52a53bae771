#include "ttcov/diagnostics.hpp"

#include "ttcov/linalg.hpp"
#include "ttcov/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ttcov {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

// num / den with 0 / anything = 0 and positive / 0 = inf.
double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return den > 0.0 ? num / den : kInf;
}

// Orthonormal polar factor of g (the maximizer of <V, g> over |V| <= 1).
Matrix polar(const Matrix& g) {
  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

struct TopPair {
  double value = 0.0;
  Vector left;
  Vector right;
};

// Leading singular triplet through the eigenproblem of the smaller Gram matrix.
TopPair top_pair(const Matrix& m) {
  TopPair out;
  if (m.rows() <= m.cols()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m * m.transpose());
    out.left = es.eigenvectors().col(m.rows() - 1);
    out.right = m.transpose() * out.left;
    out.value = out.right.norm();
    if (out.value > 0.0) out.right /= out.value;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
    out.right = es.eigenvectors().col(m.cols() - 1);
    out.left = m * out.right;
    out.value = out.left.norm();
    if (out.value > 0.0) out.left /= out.value;
  }
  return out;
}

// Row-major reshape of v into rows x cols.
Matrix reshape_rows(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const RowMajorMatrix>(v.data(), rows, cols);
}

bool converged(double value, double prev, double tol) {
  return std::abs(value - prev) <= tol * std::max(value, 1e-300);
}

void check_star(const Matrix& star, Index rows, const char* name) {
  if (star.rows() != rows || star.cols() < 1) {
    throw std::invalid_argument(std::string("sensitivity_report: ") + name + " has wrong shape");
  }
  if (orthonormality_defect(star) > 1e-8) {
    throw std::invalid_argument(std::string("sensitivity_report: ") + name + " is not orthonormal");
  }
}

}  // namespace

Matrix partial_trace(const Matrix& sigma, const FactorShape& shape, const std::vector<int>& modes) {
  shape.validate();
  if (sigma.rows() != shape.side() || sigma.cols() != shape.side()) {
    throw std::invalid_argument("partial_trace: matrix side does not equal p*q*r");
  }
  if (modes.empty()) throw std::invalid_argument("partial_trace: empty mode set");
  std::array<bool, 3> traced{false, false, false};
  for (int m : modes) {
    if (m < 1 || m > 3) throw std::invalid_argument("partial_trace: mode must be 1, 2 or 3");
    if (traced[static_cast<std::size_t>(m - 1)]) {
      throw std::invalid_argument("partial_trace: repeated mode");
    }
    traced[static_cast<std::size_t>(m - 1)] = true;
  }

  const std::array<Index, 3> dims{shape.p, shape.q, shape.r};
  // Keep-extent per mode: 1 when traced, so the surviving index stays lexicographic.
  std::array<Index, 3> kept{};
  for (std::size_t i = 0; i < 3; ++i) kept[i] = traced[i] ? 1 : dims[i];
  const Index out_side = kept[0] * kept[1] * kept[2];
  Matrix out = Matrix::Zero(out_side, out_side);

  auto out_index = [&](Index a, Index b, Index c) {
    return ((traced[0] ? 0 : a) * kept[1] + (traced[1] ? 0 : b)) * kept[2] + (traced[2] ? 0 : c);
  };
  const Index qr = shape.q * shape.r;
  for (Index a1 = 0; a1 < shape.p; ++a1)
    for (Index b1 = 0; b1 < shape.q; ++b1)
      for (Index c1 = 0; c1 < shape.r; ++c1) {
        const Index row = a1 * qr + b1 * shape.r + c1;
        const Index orow = out_index(a1, b1, c1);
        for (Index a2 = 0; a2 < shape.p; ++a2) {
          if (traced[0] && a2 != a1) continue;
          for (Index b2 = 0; b2 < shape.q; ++b2) {
            if (traced[1] && b2 != b1) continue;
            for (Index c2 = 0; c2 < shape.r; ++c2) {
              if (traced[2] && c2 != c1) continue;
              out(orow, out_index(a2, b2, c2)) += sigma(row, a2 * qr + b2 * shape.r + c2);
            }
          }
        }
      }
  return out;
}

EffectiveDims effective_dims(const Matrix& sigma, const FactorShape& shape) {
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("effective_dims: not square");
  check_finite(sigma, "effective_dims");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * std::max(1.0, sigma.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("effective_dims: matrix is not symmetric");
  }
  auto nrm = [&](std::vector<int> modes) {
    return symmetric_spectral_norm(partial_trace(sigma, shape, modes));
  };
  const double s = symmetric_spectral_norm(sigma);
  if (s == 0.0) throw std::invalid_argument("effective_dims: zero matrix");

  const double t1 = nrm({1});
  const double t2 = nrm({2});
  const double t3 = nrm({3});
  const double t12 = nrm({1, 2});
  const double t13 = nrm({1, 3});
  const double t23 = nrm({2, 3});
  const double t123 = std::abs(sigma.trace());

  EffectiveDims out;
  out.ratios1 = {t1 / s, ratio(t12, t2)};
  out.ratios2 = {t2 / s, ratio(t23, t3)};
  out.ratios3 = {t3 / s, ratio(t13, t1), ratio(t123, t12)};
  out.r1 = *std::max_element(out.ratios1.begin(), out.ratios1.end());
  out.r2 = *std::max_element(out.ratios2.begin(), out.ratios2.end());
  out.r3 = *std::max_element(out.ratios3.begin(), out.ratios3.end());
  return out;
}

double Inequality::margin() const noexcept {
  if (rhs == 0.0) return lhs >= 0.0 ? kInf : -kInf;
  return lhs / rhs;
}

ConditionReport check_conditions(const Matrix& sigma, const FactorShape& shape, Index n,
                                 Index rank_j, Index rank_k, double omega, double delta,
                                 const BiasNorms& bias, int iterations) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("check_conditions: omega must be a positive finite number");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("check_conditions: delta must be in (0, 1)");
  if (n < 1) throw std::invalid_argument("check_conditions: n must be >= 1");
  if (iterations < 0) throw std::invalid_argument("check_conditions: iterations must be >= 0");

  ConditionReport rep;
  rep.dims = effective_dims(sigma, shape);
  rep.sigma_norm = symmetric_spectral_norm(sigma);
  const Tensor3 y = rearrange(sigma, shape);
  rep.sigma_j = sigma_k(unfold(y, 1), rank_j);
  rep.sigma_k = sigma_k(unfold(y, 3), rank_k);

  const double r1 = rep.dims.r1 * rep.dims.r1;
  const double r2 = rep.dims.r2 * rep.dims.r2;
  const double r3 = rep.dims.r3 * rep.dims.r3;
  const double jj = static_cast<double>(rank_j);
  const double kk = static_cast<double>(rank_k);
  const double nn = static_cast<double>(n);
  const double l6 = std::log(6.0 / delta);
  const double l48 = std::log(48.0 / delta);
  const double s = omega * rep.sigma_norm;
  auto dev = [&](double c, double complexity) { return c * s * std::sqrt(complexity / nn); };

  rep.first = {rep.sigma_j, 25.0 * bias.m1 + dev(768.0, r1 + r2 * r3 + l6)};
  rep.second = {rep.sigma_k, 25.0 * bias.m3 + dev(768.0, jj * r1 + jj * r2 + r3 + l48)};
  rep.variance = dev(96.0, jj * r1 + jj * kk * r2 + kk * r3 + l48);
  rep.r_delta = jj * r1 + jj * kk * r2 + kk * r3 + r2 * r3 + l48;
  rep.sample_size_ok = nn >= rep.r_delta;

  rep.alpha_u = bias.alpha_u + dev(32.0, r1 + kk * r2 + l48);
  rep.beta_u = bias.beta_u + dev(32.0, r1 + kk * r2 + kk * r3 + l48);
  rep.alpha_v = bias.alpha_v + dev(32.0, r3 + jj * r2 + l48);
  rep.beta_v = bias.beta_v + dev(32.0, r2 + jj * r1 + jj * r3 + l48);
  rep.diamond2 = 96.0 * (std::sqrt(kk) * ratio(rep.beta_v * rep.alpha_u, rep.sigma_j) +
                         std::sqrt(jj) * ratio(rep.beta_u * rep.alpha_v, rep.sigma_k));
  const double contraction = 200.0 * ratio(rep.beta_v * rep.beta_u, rep.sigma_j * rep.sigma_k);
  rep.r_t = (std::sqrt(jj) + std::sqrt(kk)) * std::pow(contraction, iterations) *
            (bias.m1 + dev(32.0, r1 + r2 * r3 + l6));
  rep.bias = bias.frobenius + bias.sup_term + 4.0 * std::sqrt(jj) * bias.alpha_u +
             4.0 * std::sqrt(kk) * bias.alpha_v;
  rep.bound = rep.bias + rep.variance + rep.diamond2 + rep.r_t;

  rep.notes.push_back(
      "r_t: the variance part of its last factor is scaled by |Sigma| like every other "
      "variance term");
  if (!rep.sample_size_ok) {
    rep.notes.push_back("n = " + std::to_string(n) + " is below the sample-size gate " +
                        std::to_string(rep.r_delta));
  }
  if (contraction >= 1.0) {
    rep.notes.push_back("r_t contraction factor >= 1; the remainder does not decay with iterations");
  }
  return rep;
}

double beta_u_lower(const Tensor3& e, Index rank_k, const SensitivityOptions& opts) {
  const Index d2 = e.dim(2);
  const Index d3 = e.dim(3);
  if (rank_k < 1) throw std::invalid_argument("beta_u_lower: rank must be >= 1");
  double best = 0.0;
  for (int s = 0; s < opts.restarts; ++s) {
    Rng rng(derive_seed(opts.seed, 0xb0, static_cast<std::uint64_t>(s)));
    Matrix v = polar(gaussian_matrix(d3, rank_k, rng));
    double prev = -1.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      const TopPair tp = top_pair(unfold(mode_product(v.transpose(), e, 3), 1));
      best = std::max(best, tp.value);
      if (tp.value == 0.0 || converged(tp.value, prev, opts.tolerance)) break;
      prev = tp.value;
      // <x, m1(V^T x_3 E) y> = <V, Z^T Y> with Z(b, c) = sum_a x_a E_abc.
      const Matrix z = unfold(mode_product(tp.left.transpose(), e, 1), 2);
      v = polar(z.transpose() * reshape_rows(tp.right, d2, rank_k));
    }
  }
  return best;
}

double beta_v_lower(const Tensor3& e, Index rank_j, const SensitivityOptions& opts) {
  const Index d1 = e.dim(1);
  const Index d2 = e.dim(2);
  if (rank_j < 1) throw std::invalid_argument("beta_v_lower: rank must be >= 1");
  double best = 0.0;
  for (int s = 0; s < opts.restarts; ++s) {
    Rng rng(derive_seed(opts.seed, 0xb1, static_cast<std::uint64_t>(s)));
    Matrix u = polar(gaussian_matrix(d1, rank_j, rng));
    double prev = -1.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      const TopPair tp = top_pair(unfold(mode_product(u.transpose(), e, 1), 3));
      best = std::max(best, tp.value);
      if (tp.value == 0.0 || converged(tp.value, prev, opts.tolerance)) break;
      prev = tp.value;
      // <x, m3(U^T x_1 E) y> = <U, Z Y^T> with Z(a, b) = sum_c E_abc x_c.
      const Matrix z = unfold(mode_product(tp.left.transpose(), e, 3), 1);
      u = polar(z * reshape_rows(tp.right, rank_j, d2).transpose());
    }
  }
  return best;
}

double sup_term_lower(const Tensor3& e, Index rank_j, Index rank_k, const SensitivityOptions& opts) {
  const auto [d1, d2, d3] = e.dims();
  if (rank_j < 1 || rank_k < 1 || rank_j > std::min(d1, d2 * rank_k) ||
      rank_k > std::min(d3, d2 * rank_j)) {
    throw std::invalid_argument("sup_term_lower: ranks out of range");
  }
  double best = 0.0;
  for (int s = 0; s < opts.restarts; ++s) {
    Rng rng(derive_seed(opts.seed, 0xb2, static_cast<std::uint64_t>(s)));
    Matrix v = orthonormalize(gaussian_matrix(d3, rank_k, rng));
    double prev = -1.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      const Matrix u = leading_left_singular_vectors(unfold(mode_product(v.transpose(), e, 3), 1), rank_j);
      const Tensor3 ue = mode_product(u.transpose(), e, 1);
      v = leading_left_singular_vectors(unfold(ue, 3), rank_k);
      const double value = frobenius_norm(mode_product(v.transpose(), ue, 3));
      best = std::max(best, value);
      if (value == 0.0 || converged(value, prev, opts.tolerance)) break;
      prev = value;
    }
  }
  return best;
}

SensitivityReport sensitivity_report(const Tensor3& t_star, const Tensor3& e, const Matrix& u_star,
                                     const Matrix& v_star, int iterations,
                                     const SensitivityOptions& opts) {
  if (t_star.dims() != e.dims()) throw std::invalid_argument("sensitivity_report: dims differ");
  if (iterations < 0) throw std::invalid_argument("sensitivity_report: iterations must be >= 0");
  if (opts.restarts < 1 || opts.max_iterations < 1) {
    throw std::invalid_argument("sensitivity_report: restarts and max_iterations must be >= 1");
  }
  const Index d1 = e.dim(1);
  const Index d3 = e.dim(3);
  check_star(u_star, d1, "u_star");
  check_star(v_star, d3, "v_star");
  check_finite(e, "sensitivity_report");
  const Index rank_j = u_star.cols();
  const Index rank_k = v_star.cols();
  const double jj = static_cast<double>(rank_j);
  const double kk = static_cast<double>(rank_k);

  SensitivityReport rep;
  rep.alpha_u = norm2(unfold(mode_product(v_star.transpose(), e, 3), 1));
  rep.alpha_v = norm2(unfold(mode_product(u_star.transpose(), e, 1), 3));
  rep.m1_norm = norm2(unfold(e, 1));
  const double m3_norm = norm2(unfold(e, 3));

  rep.beta_u = {beta_u_lower(e, rank_k, opts), rep.m1_norm};
  rep.beta_v = {beta_v_lower(e, rank_j, opts), m3_norm};
  rep.beta_u.lower = std::min(rep.beta_u.lower, rep.beta_u.upper);
  rep.beta_v.lower = std::min(rep.beta_v.lower, rep.beta_v.upper);
  const double sup_upper = std::min({std::sqrt(jj) * rep.m1_norm, std::sqrt(kk) * m3_norm, frobenius_norm(e)});
  rep.sup_term = {std::min(sup_term_lower(e, rank_j, rank_k, opts), sup_upper), sup_upper};

  rep.sigma_j = sigma_k(unfold(t_star, 1), rank_j);
  rep.sigma_k = sigma_k(unfold(t_star, 3), rank_k);

  auto diamond = [&](double bu, double bv) {
    return 48.0 * (std::sqrt(kk) * ratio(bv * rep.alpha_u, rep.sigma_j) +
                   std::sqrt(jj) * ratio(bu * rep.alpha_v, rep.sigma_k));
  };
  auto remainder = [&](double bu, double bv) {
    if (rep.m1_norm == 0.0) return 0.0;
    const double contraction = 64.0 * ratio(bv * bu, rep.sigma_j * rep.sigma_k);
    return 3.0 * (std::sqrt(jj) + std::sqrt(kk)) * std::pow(contraction, iterations) * rep.m1_norm;
  };
  rep.diamond2 = {diamond(rep.beta_u.lower, rep.beta_v.lower), diamond(rep.beta_u.upper, rep.beta_v.upper)};
  rep.r_t = {remainder(rep.beta_u.lower, rep.beta_v.lower), remainder(rep.beta_u.upper, rep.beta_v.upper)};
  const double fixed = 4.0 * std::sqrt(kk) * rep.alpha_v + 4.0 * std::sqrt(jj) * rep.alpha_u;
  rep.bound = {rep.sup_term.lower + fixed + rep.diamond2.lower + rep.r_t.lower,
               rep.sup_term.upper + fixed + rep.diamond2.upper + rep.r_t.upper};

  rep.first = {rep.sigma_j, 24.0 * rep.m1_norm};
  rep.second_anchor = {rep.sigma_k, 24.0 * rep.alpha_v};
  rep.second_heuristic = {rep.sigma_k, 24.0 * rep.beta_v.lower};
  rep.second_rigorous = {rep.sigma_k, 24.0 * rep.beta_v.upper};
  return rep;
}

}  // namespace ttcov
