#include "support.hpp"

#include "ttcov/estimators.hpp"
#include "ttcov/synthgen.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ttcov {
namespace {

using test::oracle_kron;
using test::oracle_vec;

Matrix oracle_sigma(const GroundTruth& gt) {
  const Index d = gt.shape.side();
  Matrix s = Matrix::Zero(d, d);
  for (Index j = 0; j < gt.rank_j(); ++j)
    for (Index k = 0; k < gt.rank_k(); ++k) {
      const Matrix& a = gt.a[static_cast<std::size_t>(j)];
      const Matrix& b = gt.b[static_cast<std::size_t>(j * gt.rank_k() + k)];
      const Matrix& c = gt.c[static_cast<std::size_t>(k)];
      s += oracle_kron(a * a, oracle_kron(b * b, c * c));
    }
  return s;
}

GroundTruth identity_truth(const FactorShape& shape) {
  GroundTruth gt;
  gt.shape = shape;
  gt.a = {Matrix::Identity(shape.p, shape.p)};
  gt.b = {Matrix::Identity(shape.q, shape.q)};
  gt.c = {Matrix::Identity(shape.r, shape.r)};
  return gt;
}

// Each entry of the sample covariance of Gaussian rows has variance
// (S_ii S_jj + S_ij^2) / n.
int entries_outside_three_se(const Matrix& sample, const Matrix& sigma, Index n) {
  int bad = 0;
  for (Index i = 0; i < sigma.rows(); ++i)
    for (Index j = i; j < sigma.cols(); ++j) {
      const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / static_cast<double>(n));
      if (std::abs(sample(i, j) - sigma(i, j)) > 3.0 * se) ++bad;
    }
  return bad;
}

TEST(Synthgen, DeterministicAndSymmetric) {
  const GroundTruth a = gen_ground_truth({3, 2, 4}, 2, 3, {}, 9);
  const GroundTruth b = gen_ground_truth({3, 2, 4}, 2, 3, {}, 9);
  ASSERT_EQ(a.b.size(), 6u);
  for (std::size_t i = 0; i < a.a.size(); ++i) EXPECT_EQ(a.a[i], b.a[i]);
  for (std::size_t i = 0; i < a.b.size(); ++i) EXPECT_EQ(a.b[i], b.b[i]);
  for (std::size_t i = 0; i < a.c.size(); ++i) EXPECT_EQ(a.c[i], b.c[i]);
  for (const auto* group : {&a.a, &a.b, &a.c})
    for (const Matrix& m : *group) EXPECT_EQ(m, m.transpose());
  EXPECT_EQ(sample_observations(a, 5, 3), sample_observations(b, 5, 3));
  EXPECT_NE(sample_observations(a, 5, 3), sample_observations(b, 5, 4));
  EXPECT_THROW((void)gen_ground_truth({2, 2, 2}, 0, 1, {}, 1), std::invalid_argument);
}

TEST(Synthgen, DecayProfiles) {
  for (DecayKind kind : {DecayKind::inverse_quadratic, DecayKind::exponential, DecayKind::linear}) {
    const Vector v = SpectrumDecay{kind, 0.4}.profile(6);
    for (Index i = 0; i < v.size(); ++i) {
      EXPECT_GE(v(i), 0.0);
      if (i > 0) EXPECT_LE(v(i), v(i - 1));
    }
    EXPECT_EQ(parse_decay(decay_name(kind)), kind);
  }
  EXPECT_THROW((void)SpectrumDecay{}.profile(3), std::invalid_argument);
  EXPECT_THROW((void)parse_decay("cubic"), std::invalid_argument);
}

TEST(Synthgen, InverseQuadraticSpectrumRecovered) {
  Rng rng(4);
  const Matrix m = random_symmetric(4, {DecayKind::inverse_quadratic}, rng);
  EXPECT_EQ(m, m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector ev = es.eigenvalues().reverse();
  const double expected[] = {1.0, 1.0 / 4, 1.0 / 9, 1.0 / 16};
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(ev(i), expected[i], 1e-10);
}

TEST(Synthgen, RandomOrthogonalIsOrthogonal) {
  Rng rng(5);
  const Matrix q = random_orthogonal(7, rng);
  EXPECT_LE((q.transpose() * q - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Synthgen, TrueCovarianceMatchesKroneckerOracle) {
  EXPECT_EQ(true_covariance(identity_truth({2, 3, 2})), Matrix::Identity(12, 12));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GroundTruth gt = gen_ground_truth({2, 2, 2}, 1 + seed % 2, 1 + seed % 3, {}, seed);
    const Matrix s = true_covariance(gt);
    EXPECT_LE(test::rel_diff(s, oracle_sigma(gt)), 1e-14);
    EXPECT_EQ(s, s.transpose());
  }
}

TEST(Synthgen, ZeroFactorsGiveZeroObservations) {
  GroundTruth gt = identity_truth({2, 2, 2});
  gt.a[0].setZero();
  EXPECT_TRUE(sample_observations(gt, 10, 1).isZero(0.0));
}

TEST(Synthgen, IdentityFactorsGiveStandardNormalRows) {
  const Matrix x = sample_observations(identity_truth({2, 2, 2}), 100'000, 7);
  const Matrix s = sample_covariance(x);
  EXPECT_LE((s - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Synthgen, EmpiricalCovarianceApproachesTruth) {
  const GroundTruth gt = gen_ground_truth({2, 2, 2}, 2, 2, {}, 8);
  const Matrix sigma = true_covariance(gt);
  const Matrix s = sample_covariance(sample_observations(gt, 200'000, 9));
  EXPECT_LE((s - sigma).norm() / sigma.norm(), 0.05);
}

TEST(Synthgen, TensorInstanceStructure) {
  const TensorInstance clean = gen_tensor_instance({3, 2, 3}, 2, 3, {}, 0.0, 10);
  EXPECT_EQ(clean.y, clean.t_star);
  Eigen::JacobiSVD<Matrix> s1(unfold(clean.t_star, 1));
  Eigen::JacobiSVD<Matrix> s3(unfold(clean.t_star, 3));
  EXPECT_LE(s1.singularValues()(2), 1e-9 * s1.singularValues()(0));
  EXPECT_LE(s3.singularValues()(3), 1e-9 * s3.singularValues()(0));
  EXPECT_LE(orthonormality_defect(clean.u_star), 1e-10);
  EXPECT_LE(orthonormality_defect(clean.v_star), 1e-10);
  EXPECT_EQ(clean.u_star.cols(), 2);
  EXPECT_EQ(clean.v_star.cols(), 3);

  const TensorInstance noisy = gen_tensor_instance({3, 2, 3}, 2, 3, {}, 0.5, 10);
  EXPECT_EQ(noisy.t_star, clean.t_star);
  const Tensor3 e = noisy.y - noisy.t_star;
  const double rms = frobenius_norm(e) / std::sqrt(static_cast<double>(e.size()));
  EXPECT_NEAR(rms, 0.5, 0.1);
  EXPECT_THROW((void)gen_tensor_instance({2, 2, 2}, 1, 1, {}, -1.0, 1), std::invalid_argument);
}

TEST(Synthgen, TtTensorIsRearrangedSum) {
  const GroundTruth parts = gen_ground_truth({2, 3, 2}, 2, 2, {}, 11);
  Matrix s = Matrix::Zero(12, 12);
  for (Index j = 0; j < 2; ++j)
    for (Index k = 0; k < 2; ++k) {
      s += oracle_kron(parts.a[static_cast<std::size_t>(j)],
                       oracle_kron(parts.b_at(j, k), parts.c[static_cast<std::size_t>(k)]));
    }
  EXPECT_LE(test::rel_diff(tt_tensor(parts), test::oracle_rearrange(s, 2, 3, 2)), 1e-14);
}

TEST(SynthgenProperty, TransportConsistency) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GroundTruth gt = gen_ground_truth({2, 3, 2}, 2, 3, {}, 20 + seed);
    Tensor3 expected({4, 9, 4});
    for (Index j = 0; j < 2; ++j)
      for (Index k = 0; k < 3; ++k) {
        const Matrix& a = gt.a[static_cast<std::size_t>(j)];
        const Matrix& b = gt.b_at(j, k);
        const Matrix& c = gt.c[static_cast<std::size_t>(k)];
        expected = expected + test::oracle_outer(oracle_vec(a * a), oracle_vec(b * b), oracle_vec(c * c));
      }
    EXPECT_LE(test::rel_diff(rearrange(true_covariance(gt), gt.shape), expected), 1e-10);
  }
}

TEST(SynthgenProperty, TrueCovarianceIsPsd) {
  for (DecayKind kind : {DecayKind::gaussian, DecayKind::linear, DecayKind::exponential}) {
    const GroundTruth gt = gen_ground_truth({3, 2, 3}, 3, 2, {kind, 0.5}, 30);
    const Matrix s = true_covariance(gt);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
  }
}

TEST(SynthgenProperty, MonteCarloLawSingleTerm) {
  constexpr Index kN = 200'000;
  const GroundTruth gt = gen_ground_truth({2, 2, 2}, 1, 1, {}, 40);
  const Matrix sigma = oracle_kron(gt.a[0] * gt.a[0], oracle_kron(gt.b[0] * gt.b[0], gt.c[0] * gt.c[0]));
  const Matrix s = sample_covariance(sample_observations(gt, kN, 41));
  EXPECT_EQ(entries_outside_three_se(s, sigma, kN), 0);
}

TEST(SynthgenProperty, MonteCarloLawSumOfTerms) {
  constexpr Index kN = 200'000;
  const GroundTruth gt = gen_ground_truth({2, 2, 2}, 2, 2, {}, 42);
  const Matrix sigma = oracle_sigma(gt);
  const Matrix s = sample_covariance(sample_observations(gt, kN, 43));
  EXPECT_EQ(entries_outside_three_se(s, sigma, kN), 0);
}

}  // namespace
}  // namespace ttcov
