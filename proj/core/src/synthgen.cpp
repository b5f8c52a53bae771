#include "ttcov/synthgen.hpp"

#include "ttcov/linalg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ttcov {
namespace {

std::vector<Matrix> draw(Index count, Index n, const SpectrumDecay& decay, Rng& rng) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) out.push_back(random_symmetric(n, decay, rng));
  return out;
}

GroundTruth draw_components(const FactorShape& shape, Index rank_j, Index rank_k,
                            const SpectrumDecay& decay, std::uint64_t seed) {
  shape.validate();
  if (rank_j < 1 || rank_k < 1) throw std::invalid_argument("generator: J and K must be >= 1");
  Rng rng(seed);
  GroundTruth gt;
  gt.shape = shape;
  gt.seed = seed;
  gt.a = draw(rank_j, shape.p, decay, rng);
  gt.b = draw(rank_j * rank_k, shape.q, decay, rng);
  gt.c = draw(rank_k, shape.r, decay, rng);
  return gt;
}

Matrix stack_vecs(const std::vector<Matrix>& ms) {
  Matrix out(ms.front().size(), static_cast<Index>(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) out.col(static_cast<Index>(i)) = vec(ms[i]);
  return out;
}

}  // namespace

std::string_view decay_name(DecayKind k) {
  switch (k) {
    case DecayKind::gaussian: return "gaussian";
    case DecayKind::inverse_quadratic: return "inverse_quadratic";
    case DecayKind::exponential: return "exponential";
    case DecayKind::linear: return "linear";
  }
  return "unknown";
}

DecayKind parse_decay(std::string_view name) {
  for (DecayKind k : {DecayKind::gaussian, DecayKind::inverse_quadratic, DecayKind::exponential,
                      DecayKind::linear}) {
    if (decay_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown spectrum decay '" + std::string(name) + "'");
}

Vector SpectrumDecay::profile(Index n) const {
  if (n < 1) throw std::invalid_argument("SpectrumDecay: n must be >= 1");
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const double k = static_cast<double>(i + 1);
    switch (kind) {
      case DecayKind::inverse_quadratic: v(i) = 1.0 / (k * k); break;
      case DecayKind::exponential: v(i) = std::exp(-rate * (k - 1.0)); break;
      case DecayKind::linear: v(i) = static_cast<double>(n - i) / static_cast<double>(n); break;
      case DecayKind::gaussian:
        throw std::invalid_argument("SpectrumDecay: the gaussian kind has no fixed profile");
    }
  }
  return v;
}

void GroundTruth::validate() const {
  shape.validate();
  const Index j = rank_j();
  const Index k = rank_k();
  if (j < 1 || k < 1 || static_cast<Index>(b.size()) != j * k) {
    throw std::invalid_argument("GroundTruth: expected J A's, J*K B's and K C's");
  }
  auto check = [](const std::vector<Matrix>& ms, Index n, const char* name) {
    for (const Matrix& m : ms) {
      if (m.rows() != n || m.cols() != n) {
        throw std::invalid_argument(std::string("GroundTruth: ") + name + " factor has wrong size");
      }
    }
  };
  check(a, shape.p, "A");
  check(b, shape.q, "B");
  check(c, shape.r, "C");
}

Matrix random_orthogonal(Index n, Rng& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (Index i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

Matrix random_symmetric(Index n, const SpectrumDecay& decay, Rng& rng) {
  if (decay.kind == DecayKind::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) m(i, j) = m(j, i) = normal(rng);
    return m;
  }
  const Matrix q = random_orthogonal(n, rng);
  const Matrix m = q * decay.profile(n).asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

GroundTruth gen_ground_truth(const FactorShape& shape, Index rank_j, Index rank_k,
                             const SpectrumDecay& decay, std::uint64_t seed) {
  return draw_components(shape, rank_j, rank_k, decay, seed);
}

Matrix true_covariance(const GroundTruth& gt) {
  gt.validate();
  const Index d = gt.shape.side();
  Matrix sigma = Matrix::Zero(d, d);
  for (Index k = 0; k < gt.rank_k(); ++k) {
    const Matrix c2 = gt.c[static_cast<std::size_t>(k)] * gt.c[static_cast<std::size_t>(k)];
    for (Index j = 0; j < gt.rank_j(); ++j) {
      const Matrix& b = gt.b_at(j, k);
      sigma += kron(gt.a[static_cast<std::size_t>(j)] * gt.a[static_cast<std::size_t>(j)],
                    kron(b * b, c2));
    }
  }
  return 0.5 * (sigma + sigma.transpose());
}

Matrix sample_observations(const GroundTruth& gt, Index n, std::uint64_t seed) {
  gt.validate();
  if (n < 1) throw std::invalid_argument("sample_observations: n must be >= 1");
  const auto [p, q, r] = gt.shape;
  const Index d = gt.shape.side();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Buffers hold n stacked p x q x r tensors in row-major (i, a, b, c) order.
  RowMajorMatrix noise(n * p * q, r);
  RowMajorMatrix after_c(n * p * q, r);
  RowMajorMatrix partial(n * p * q, r);
  RowMajorMatrix x = RowMajorMatrix::Zero(n, d);

  for (Index j = 0; j < gt.rank_j(); ++j) {
    partial.setZero();
    for (Index k = 0; k < gt.rank_k(); ++k) {
      for (Index i = 0; i < noise.size(); ++i) noise.data()[i] = normal(rng);
      after_c.noalias() = noise * gt.c[static_cast<std::size_t>(k)].transpose();
      const Matrix& b = gt.b_at(j, k);
      for (Index s = 0; s < n * p; ++s) {
        Eigen::Map<const RowMajorMatrix> in(after_c.data() + s * q * r, q, r);
        Eigen::Map<RowMajorMatrix> out(partial.data() + s * q * r, q, r);
        out.noalias() += b * in;
      }
    }
    const Matrix& a = gt.a[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      Eigen::Map<const RowMajorMatrix> in(partial.data() + i * d, p, q * r);
      Eigen::Map<RowMajorMatrix> out(x.data() + i * d, p, q * r);
      out.noalias() += a * in;
    }
  }
  return x;
}

Tensor3 tt_tensor(const GroundTruth& components) {
  components.validate();
  const Index jj = components.rank_j();
  const Index kk = components.rank_k();
  const Index q2 = components.shape.q * components.shape.q;
  Tensor3 core({jj, q2, kk});
  for (Index j = 0; j < jj; ++j)
    for (Index k = 0; k < kk; ++k) {
      const Vector w = vec(components.b_at(j, k));
      for (Index b = 0; b < q2; ++b) core(j, b, k) = w(b);
    }
  return mode_product(stack_vecs(components.a), mode_product(stack_vecs(components.c), core, 3), 1);
}

TensorInstance gen_tensor_instance(const FactorShape& shape, Index rank_j, Index rank_k,
                                   const SpectrumDecay& decay, double noise_sigma,
                                   std::uint64_t seed) {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("gen_tensor_instance: noise sigma must be finite and >= 0");
  }
  const GroundTruth components = draw_components(shape, rank_j, rank_k, decay, seed);
  TensorInstance inst;
  inst.t_star = tt_tensor(components);
  inst.y = inst.t_star;
  if (noise_sigma > 0.0) {
    Rng rng(derive_seed(seed, 0xe0, 0));
    std::normal_distribution<double> normal(0.0, noise_sigma);
    for (double& v : inst.y.data()) v += normal(rng);
  }
  const Index j_eff = std::min(rank_j, std::min(inst.t_star.dim(1), inst.t_star.size() / inst.t_star.dim(1)));
  const Index k_eff = std::min(rank_k, inst.t_star.dim(3));
  inst.u_star = leading_left_singular_vectors(unfold(inst.t_star, 1), j_eff);
  inst.v_star = leading_left_singular_vectors(unfold(inst.t_star, 3), k_eff);
  return inst;
}

}  // namespace ttcov
