#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "simplexi/models.hpp"
#include "simplexi/sketch.hpp"
#include "test_util.hpp"

using namespace simplexi;
using simplexi::testing::random_sparse;

namespace {

DenseMatrix oracle_u(const SparseColMatrix& a, Index k) {
  Eigen::JacobiSVD<DenseMatrix> svd(a.to_dense(), Eigen::ComputeThinU);
  return svd.matrixU().leftCols(k);
}

}  // namespace

TEST(CountSketch, SingleBucket) {
  const auto s = make_countsketch(4, 1, 3);
  for (Index b : s.bucket) EXPECT_EQ(b, 0);
  for (auto sg : s.sign) EXPECT_TRUE(sg == 1 || sg == -1);
}

TEST(CountSketch, DeterministicAndValidated) {
  const auto a = make_countsketch(100, 7, 42), b = make_countsketch(100, 7, 42);
  EXPECT_EQ(a.bucket, b.bucket);
  EXPECT_EQ(a.sign, b.sign);
  EXPECT_THROW(make_countsketch(10, 0, 1), ParameterError);
}

TEST(CountSketch, BucketLoadsAreBalanced) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = make_countsketch(1000, 100, seed);
    std::vector<int> load(100, 0);
    for (Index b : s.bucket) ++load[b];
    EXPECT_LE(*std::max_element(load.begin(), load.end()), 40);
  }
}

TEST(CountSketch, ApplyExamples) {
  const auto id = sparse_from_dense(DenseMatrix::Identity(2, 2));
  CountSketch s{2, 2, {0, 1}, {1, 1}, 0};
  EXPECT_TRUE(apply_countsketch(id, s) == DenseMatrix::Identity(2, 2));
  s.sign = {-1, 1};
  DenseMatrix expect = DenseMatrix::Identity(2, 2);
  expect(0, 0) = -1;
  EXPECT_TRUE(apply_countsketch(id, s) == expect);
  EXPECT_THROW(apply_countsketch(random_sparse(2, 3, 0.5, 1), s), DimensionError);
}

TEST(CountSketch, ApplyMatchesDenseProduct) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = random_sparse(3, 5, 0.6, seed);
    const auto s = make_countsketch(5, 3, seed);
    const DenseMatrix dense = simplexi::testing::naive_product(a.to_dense(), s.to_dense());
    EXPECT_LT((apply_countsketch(a, s) - dense).norm(), 1e-14);
  }
}

TEST(MixedLra, ExactRankKInputHasZeroResidual) {
  Rng rng(2);
  const DenseMatrix m = gaussian_matrix(40, 4, rng) * gaussian_matrix(4, 60, rng);
  const auto a = sparse_from_dense(m);
  const auto f = mixed_lra(a, 4, 16, 3);
  EXPECT_EQ(f.Y.cols(), 4);
  EXPECT_FALSE(f.rank_deficient);
  const double resid = Eigen::JacobiSVD<DenseMatrix>(m - f.Y * f.Z.transpose()).singularValues()(0);
  EXPECT_LE(resid, 1e-8 * Eigen::JacobiSVD<DenseMatrix>(m).singularValues()(0));
}

TEST(MixedLra, DiagonalTwoByTwo) {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m.diagonal() << 10, 1;
  const auto a = sparse_from_dense(m);
  const auto f = mixed_lra(a, 1, 1, 5);
  const auto q = evaluate_lra(a, f);
  EXPECT_NEAR(q.tail.spectral_sq, 1.0, 1e-12);
  const double eps = q.achieved_epsilon;
  EXPECT_LE(std::sqrt(q.residual_sq), std::sqrt((1 + eps) * 1.0 + eps * 1.0) + 1e-12);
}

TEST(MixedLra, FactorsAreOrthonormalAndConsistent) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = random_sparse(60, 200, 0.05, seed);
    const auto f = mixed_lra(a, 5, 25, seed);
    ASSERT_EQ(f.Y.cols(), 5);
    EXPECT_LT((f.Y.transpose() * f.Y - DenseMatrix::Identity(5, 5)).norm(), 1e-8);
    EXPECT_LT((f.Z - transpose_apply(a, f.Y)).norm(), 1e-10 * (f.Z.norm() + 1));
  }
}

TEST(MixedLra, BernoulliOracleBoundHoldsInMostSeeds) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = gen_bernoulli(100, 1000, 0.01, seed);
    ok += evaluate_lra(a, mixed_lra(a, 5, 25, seed)).within_bound;
  }
  EXPECT_GE(ok, 95);
}

TEST(MixedLra, RankDeficientSketchIsFlagged) {
  // Only two nonzero columns: the sketch cannot reach rank 3.
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 5, 2.0}};
  const auto a = build_csc(t, 6, 8);
  const auto f = mixed_lra(a, 3, 9, 1);
  EXPECT_TRUE(f.rank_deficient);
  EXPECT_LE(f.Y.cols(), 2);
  EXPECT_THROW(mixed_lra(a, 7, 49, 1), ParameterError);
  EXPECT_THROW(mixed_lra(a, 3, 2, 1), ParameterError);
}

TEST(MixedLra, StreamingAndGramRoutesAgree) {
  // Wide, very sparse input takes the Gram route; a denser short-wide one streams.
  for (const auto& [d, n, p] : {std::tuple{30, 3000, 0.002}, std::tuple{30, 400, 0.5}}) {
    const auto a = random_sparse(d, n, p, 17);
    const auto f = mixed_lra(a, 3, 9, 4);
    const Basis yb(f.Y);
    // Same sketch, same seed: compare against the projection-based reference.
    const auto s = make_countsketch(n, 9, 4);
    const Basis q = orthonormalize(apply_countsketch(a, s));
    const DenseMatrix w = q.cols.transpose() * a.to_dense();
    Eigen::JacobiSVD<DenseMatrix> svd(w, Eigen::ComputeThinU);
    const Basis ref(DenseMatrix(q.cols * svd.matrixU().leftCols(3)));
    EXPECT_LT(sin_theta(yb, ref), 1e-8);
  }
}

TEST(MixedLra, RoundTripThroughText) {
  const auto a = random_sparse(20, 30, 0.2, 3);
  const auto f = mixed_lra(a, 2, 4, 3);
  std::stringstream s;
  write_rank_k_factors(s, f);
  const auto g = read_rank_k_factors(s);
  EXPECT_TRUE(g.Y == f.Y);
  EXPECT_TRUE(g.Z == f.Z);
}

TEST(ExactSvd, Examples) {
  DenseMatrix d3 = DenseMatrix::Zero(3, 3);
  d3.diagonal() << 3, 2, 1;
  const auto s = exact_topk_svd(d3, 2);
  EXPECT_NEAR(s.S(0), 3.0, 1e-12);
  EXPECT_NEAR(s.S(1), 2.0, 1e-12);

  Rng rng(1);
  const Vector u = gaussian_vector(5, rng), v = gaussian_vector(7, rng);
  EXPECT_NEAR(exact_topk_svd(DenseMatrix(u * v.transpose()), 1).S(0), u.norm() * v.norm(), 1e-12);

  DenseMatrix fib(2, 2);
  fib << 1, 1, 0, 1;
  const auto sf = exact_topk_svd(fib, 2);
  EXPECT_NEAR(sf.S(0), (1 + std::sqrt(5.0)) / 2, 1e-12);
  EXPECT_NEAR(sf.S(1), (std::sqrt(5.0) - 1) / 2, 1e-12);
}

TEST(ExactSvd, DenseAndGramPathsMatchReference) {
  Vector sv(6);
  sv << 9, 7, 5, 3, 2, 1;
  const DenseMatrix m = simplexi::testing::with_singular_values(50, 90000, sv, 3);
  // 50 x 90000 exceeds the dense-entry threshold, so this takes the Gram side.
  const auto s = exact_topk_svd(sparse_from_dense(m), 4);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(s.S(i), sv(i), 1e-9 * sv(i));
  EXPECT_LT((s.U.transpose() * s.U - DenseMatrix::Identity(4, 4)).norm(), 1e-8);
  EXPECT_LT((s.V.transpose() * s.V - DenseMatrix::Identity(4, 4)).norm(), 1e-8);
  const DenseMatrix small = simplexi::testing::with_singular_values(30, 40, sv, 4);
  const auto t = exact_topk_svd(small, 6);
  for (Index i = 0; i < 6; ++i) EXPECT_NEAR(t.S(i), sv(i), 1e-9 * sv(i));
}

TEST(ExactSvd, RefusesBeyondTheLimit) {
  EXPECT_THROW(exact_topk_svd(SparseColMatrix(10, 10), 2, 5), NumericalError);
  EXPECT_THROW(exact_topk_svd(SparseColMatrix(10, 10), 11), ParameterError);
}

TEST(SubspacePower, DominantAxis) {
  DenseMatrix m = DenseMatrix::Zero(3, 3);
  m.diagonal() << 10, 1, 0.1;
  const auto r = subspace_power(sparse_from_dense(m), 1, 10, 1);
  const Basis e1(DenseMatrix(Vector::Unit(3, 0)));
  EXPECT_LE(sin_theta(Basis(r.Q), e1), 1e-6);
  EXPECT_FALSE(r.gap_flag);
}

TEST(SubspacePower, EqualSingularValuesRaiseTheGapFlag) {
  const auto r = subspace_power(sparse_from_dense(DenseMatrix::Identity(6, 6)), 2, 5, 1);
  EXPECT_TRUE(r.gap_flag);
  EXPECT_LT((r.Q.transpose() * r.Q - DenseMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(SubspacePower, ConvergesAtHalfGap) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Index d = 60, k = 3;
    Vector sv(10);
    sv << 8, 6, 4, 2, 1.5, 1, 0.8, 0.6, 0.4, 0.2;
    const DenseMatrix m = simplexi::testing::with_singular_values(d, 80, sv, seed);
    const int t = static_cast<int>(std::ceil(std::log2(static_cast<double>(d)))) + 20;
    const auto r = subspace_power(sparse_from_dense(m), k, t, seed);
    EXPECT_LE(sin_theta(Basis(r.Q), Basis(DenseMatrix(oracle_u(sparse_from_dense(m), k)))), 1e-4);
    EXPECT_NEAR(r.ritz_values(0), 8.0, 1e-6);
    EXPECT_NEAR(r.complement_estimate, 2.0, 0.05);
  }
}

TEST(SubspacePower, ObserverSeesEveryIterate) {
  const auto a = random_sparse(20, 30, 0.3, 2);
  std::vector<int> seen;
  subspace_power(a, 2, 4, 1, [&](int t, const DenseMatrix& q) {
    seen.push_back(t);
    EXPECT_EQ(q.cols(), 2);
  });
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(SubspacePower, DefaultIterationCount) {
  EXPECT_EQ(default_power_iterations(1000), 21);
  EXPECT_EQ(default_power_iterations(1000, 1), 7);
  EXPECT_EQ(default_power_iterations(1), 3);
}

TEST(TailMass, FromSpectrum) {
  Vector s(4);
  s << 4, 3, 2, 1;
  const auto t = tail_mass(s, 2);
  EXPECT_DOUBLE_EQ(t.spectral_sq, 4.0);
  EXPECT_DOUBLE_EQ(t.frobenius_sq, 5.0);
  EXPECT_DOUBLE_EQ(tail_mass(s, 4).frobenius_sq, 0.0);
}
