#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "simplexi/kernels.hpp"
#include "simplexi/sparse_matrix.hpp"
#include "test_util.hpp"

using namespace simplexi;
using simplexi::testing::naive_product;
using simplexi::testing::random_sparse;
using simplexi::testing::rel_err;

TEST(BuildCsc, EmptyInputGivesZeroMatrix) {
  const auto a = build_csc({}, 2, 3);
  EXPECT_EQ(a.rows(), 2);
  EXPECT_EQ(a.cols(), 3);
  EXPECT_EQ(a.nnz(), 0);
  EXPECT_TRUE(a.to_dense().isZero());
}

TEST(BuildCsc, DuplicatesAreSummed) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 0, 2.0}};
  const auto a = build_csc(t, 1, 1);
  ASSERT_EQ(a.nnz(), 1);
  EXPECT_DOUBLE_EQ(a.values()[0], 3.0);
}

TEST(BuildCsc, CancellationDropsTheEntry) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 0, -1.0}};
  EXPECT_EQ(build_csc(t, 1, 1).nnz(), 0);
}

TEST(BuildCsc, OutOfRangeNamesTheTriplet) {
  const std::vector<Triplet> t{{0, 0, 1.0}, {5, 1, 2.5}};
  try {
    build_csc(t, 2, 2);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("(5, 1"), std::string::npos) << e.what();
  }
}

TEST(BuildCsc, InvariantsHoldOnRandomInput) {
  Rng rng(3);
  std::uniform_int_distribution<Index> ri(0, 9), cj(0, 14);
  std::uniform_int_distribution<int> val(-2, 2);
  std::vector<Triplet> t;
  for (int i = 0; i < 300; ++i) t.push_back({ri(rng), cj(rng), static_cast<double>(val(rng))});
  const auto a = build_csc(t, 10, 15);
  const auto ptr = a.col_ptr();
  EXPECT_EQ(ptr[0], 0);
  EXPECT_EQ(ptr[15], a.nnz());
  for (Index j = 0; j < 15; ++j) {
    EXPECT_LE(ptr[j], ptr[j + 1]);
    for (Index p = ptr[j]; p + 1 < ptr[j + 1]; ++p) EXPECT_LT(a.row_idx()[p], a.row_idx()[p + 1]);
  }
  for (double v : a.values()) EXPECT_NE(v, 0.0);
  // Dense reference by direct accumulation.
  DenseMatrix ref = DenseMatrix::Zero(10, 15);
  for (const auto& x : t) ref(x.row, x.col) += x.value;
  EXPECT_TRUE(a.to_dense() == ref);
}

TEST(FromCsc, RejectsBrokenInvariants) {
  EXPECT_THROW(SparseColMatrix::from_csc(2, 1, {0, 2}, {1, 0}, {1, 1}), DimensionError);  // unsorted
  EXPECT_THROW(SparseColMatrix::from_csc(2, 1, {0, 1}, {0}, {0.0}), DimensionError);      // stored zero
  EXPECT_THROW(SparseColMatrix::from_csc(2, 1, {0, 1}, {2}, {1.0}), DimensionError);      // row range
  EXPECT_THROW(SparseColMatrix::from_csc(2, 2, {0, 1, 0}, {0}, {1.0}), DimensionError);   // decreasing
  EXPECT_NO_THROW(SparseColMatrix::from_csc(2, 2, {0, 1, 2}, {1, 0}, {1.0, 2.0}));
}

TEST(Products, IdentityTimesX) {
  const auto a = sparse_from_dense(DenseMatrix::Identity(2, 2));
  DenseMatrix x(2, 1);
  x << 3, 4;
  EXPECT_TRUE(right_apply(a, x) == x);
}

TEST(Products, ZeroMatrixGivesZero) {
  const SparseColMatrix a(3, 4);
  Rng rng(1);
  EXPECT_TRUE(right_apply(a, gaussian_matrix(4, 2, rng)).isZero());
}

TEST(Products, HandExamples) {
  DenseMatrix m(2, 2);
  m << 1, 2, 0, 3;
  DenseMatrix x(2, 1);
  x << 1, 1;
  DenseMatrix expect(2, 1);
  expect << 3, 3;
  EXPECT_TRUE(right_apply(sparse_from_dense(m), x) == expect);

  DenseMatrix row(2, 3);
  row << 5, 0, 7, 1, 1, 1;
  Vector e1 = Vector::Unit(2, 0);
  EXPECT_TRUE(left_apply(e1, sparse_from_dense(row)) == Vector((Vector(3) << 5, 0, 7).finished()));
  EXPECT_TRUE(left_apply(Vector::Zero(2), sparse_from_dense(row)).isZero());

  DenseMatrix b(2, 2);
  b << 1, 2, 3, 4;
  EXPECT_TRUE(left_apply(Vector::Ones(2), sparse_from_dense(b)) == Vector((Vector(2) << 4, 6).finished()));
}

TEST(Products, DimensionMismatchThrows) {
  const auto a = random_sparse(4, 5, 0.5, 1);
  EXPECT_THROW(right_apply(a, DenseMatrix::Zero(4, 2)), DimensionError);
  EXPECT_THROW(transpose_apply(a, DenseMatrix::Zero(5, 2)), DimensionError);
  EXPECT_THROW(left_apply(Vector::Zero(5), a), DimensionError);
  EXPECT_THROW(gram_apply(a, DenseMatrix::Zero(5, 2)), DimensionError);
}

class RandomProducts : public ::testing::TestWithParam<int> {};

TEST_P(RandomProducts, AgreeWithNaiveTripleLoop) {
  const int seed = GetParam();
  Rng rng(seed);
  const Index d = 5 + seed % 40, n = 7 + (seed * 7) % 43;
  const auto a = random_sparse(d, n, 0.2, seed);
  const DenseMatrix ad = a.to_dense();
  for (Index c : {Index{1}, Index{3}, Index{8}}) {
    const DenseMatrix x = gaussian_matrix(n, c, rng);
    const DenseMatrix q = gaussian_matrix(d, c, rng);
    EXPECT_LT(rel_err(right_apply(a, x), naive_product(ad, x)), 1e-12);
    EXPECT_LT(rel_err(transpose_apply(a, q), naive_product(ad.transpose(), q)), 1e-12);
    EXPECT_LT(rel_err(gram_apply(a, q), naive_product(ad, naive_product(ad.transpose(), q))), 1e-12);
  }
  EXPECT_LT(rel_err(row_gram(a), naive_product(ad, ad.transpose())), 1e-12);
  const Vector y = gaussian_vector(d, rng);
  // Transpose consistency: y^T A equals A^T y computed from the transposed triplets.
  const DenseMatrix via_t = right_apply(a.transpose(), DenseMatrix(y));
  EXPECT_LT(rel_err(left_apply(y, a), via_t), 1e-12);
  const DenseMatrix rows_2_5 = transpose_apply_cols(a, DenseMatrix(y), 2, std::min<Index>(5, n));
  EXPECT_LT(rel_err(rows_2_5, naive_product(ad.transpose(), y).middleRows(2, rows_2_5.rows())), 1e-12);
}

TEST_P(RandomProducts, ScalarAndAvx2PathsAgree) {
  if (!kernels::isa_available(kernels::Isa::avx2)) GTEST_SKIP();
  const int seed = GetParam();
  Rng rng(seed + 100);
  const auto a = random_sparse(30, 40, 0.3, seed);
  const DenseMatrix x = gaussian_matrix(40, 5, rng);
  const DenseMatrix q = gaussian_matrix(30, 5, rng);
  const auto before = kernels::active_isa();
  kernels::set_active_isa(kernels::Isa::scalar);
  const DenseMatrix r1 = right_apply(a, x), t1 = transpose_apply(a, q), g1 = row_gram(a);
  kernels::set_active_isa(kernels::Isa::avx2);
  const DenseMatrix r2 = right_apply(a, x), t2 = transpose_apply(a, q), g2 = row_gram(a);
  kernels::set_active_isa(before);
  EXPECT_LT(rel_err(r2, r1), 1e-14);
  EXPECT_LT(rel_err(t2, t1), 1e-14);
  EXPECT_LT(rel_err(g2, g1), 1e-14);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomProducts, ::testing::Range(1, 21));

TEST(ColumnSubsetMean, Examples) {
  DenseMatrix m(2, 2);
  m << 1, 3, 2, 4;
  const auto a = sparse_from_dense(m);
  const std::vector<Index> both{0, 1};
  EXPECT_TRUE(column_subset_mean(a, both) == Vector((Vector(2) << 2, 3).finished()));
  const std::vector<Index> one{1};
  EXPECT_TRUE(column_subset_mean(a, one) == m.col(1));
  const SparseColMatrix z(3, 2);
  EXPECT_TRUE(column_subset_mean(z, both).isZero());
}

TEST(ColumnSubsetMean, Errors) {
  const auto a = random_sparse(3, 4, 0.5, 2);
  EXPECT_THROW(column_subset_mean(a, std::vector<Index>{}), DimensionError);
  EXPECT_THROW(column_subset_mean(a, std::vector<Index>{4}), DimensionError);
}

TEST(ColumnSubsetMean, FullSetIsAverageColumn) {
  const auto a = random_sparse(12, 30, 0.3, 4);
  std::vector<Index> all(30);
  std::iota(all.begin(), all.end(), Index{0});
  const Vector ref = a.to_dense().rowwise().sum() / 30.0;
  EXPECT_LT((column_subset_mean(a, all) - ref).norm(), 1e-12 * (ref.norm() + 1));
}

TEST(AccessLog, SubsetMeanTouchesOnlyTheSubset) {
  const auto a = random_sparse(10, 50, 0.3, 5);
  const std::vector<Index> subset{3, 17, 42};
  ScopedColumnAccessLog log;
  column_subset_mean(a, subset);
  EXPECT_EQ(std::set<Index>(log.columns().begin(), log.columns().end()),
            std::set<Index>(subset.begin(), subset.end()));
  Index expected = 0;
  for (Index j : subset) expected += static_cast<Index>(a.column(j).values.size());
  EXPECT_EQ(log.entries_read(), expected);
}

TEST(AccessLog, NestedLogsRestoreTheOuterOne) {
  const auto a = random_sparse(5, 6, 0.5, 6);
  ScopedColumnAccessLog outer;
  {
    ScopedColumnAccessLog inner;
    column_subset_mean(a, std::vector<Index>{1});
    EXPECT_EQ(inner.columns().size(), 1u);
  }
  EXPECT_TRUE(outer.columns().empty());
  column_subset_mean(a, std::vector<Index>{2});
  EXPECT_EQ(outer.columns().size(), 1u);
}

TEST(SpectralNorm, Examples) {
  const double tol = 1e-10;
  DenseMatrix diag = DenseMatrix::Zero(2, 2);
  diag.diagonal() << 3, 1;
  const auto e1 = spectral_norm_est(sparse_from_dense(diag), tol, 1000, 1);
  EXPECT_NEAR(e1.value, 3.0, 3 * tol);
  EXPECT_TRUE(e1.converged);
  EXPECT_EQ(spectral_norm_est(SparseColMatrix(3, 3), tol, 100, 1).value, 0.0);
  DenseMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_NEAR(spectral_norm_est(swap, tol, 1000, 1).value, 1.0, tol);
}

TEST(SpectralNorm, KnownSpectrum) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Vector s(4);
    s << 7, 3, 2, 0.5;
    const DenseMatrix m = simplexi::testing::with_singular_values(20, 30, s, seed);
    const double tol = 1e-9;
    const auto e = spectral_norm_est(m, tol, 10000, seed);
    EXPECT_TRUE(e.converged);
    EXPECT_NEAR(e.value, 7.0, tol * 7.0);
  }
}

TEST(SpectralNorm, DeterministicGivenSeed) {
  const auto a = random_sparse(30, 40, 0.2, 9);
  const auto x = spectral_norm_est(a, 1e-6, 50, 4);
  const auto y = spectral_norm_est(a, 1e-6, 50, 4);
  EXPECT_EQ(x.value, y.value);
  EXPECT_EQ(x.iterations, y.iterations);
}

TEST(SpectralNorm, ReportsNonConvergence) {
  const auto a = random_sparse(60, 60, 0.3, 10);
  const auto e = spectral_norm_est(a, 1e-15, 2, 1);
  EXPECT_FALSE(e.converged);
  EXPECT_GT(e.value, 0.0);
}

TEST(SparseColMatrix, TransposeAndTripletsRoundTrip) {
  const auto a = random_sparse(8, 11, 0.3, 12);
  EXPECT_TRUE(a.transpose().to_dense() == a.to_dense().transpose());
  const auto t = a.triplets();
  EXPECT_TRUE(build_csc(t, 8, 11).to_dense() == a.to_dense());
  EXPECT_NEAR(a.frobenius_norm_sq(), a.to_dense().squaredNorm(), 1e-12);
}
