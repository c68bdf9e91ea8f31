#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "simplexi/sketch.hpp"
#include "simplexi/subspace.hpp"
#include "test_util.hpp"

using namespace simplexi;

namespace {

Basis span_of(std::initializer_list<std::initializer_list<double>> vecs) {
  std::vector<Vector> v;
  for (auto list : vecs) {
    Vector x(static_cast<Index>(list.size()));
    Index i = 0;
    for (double e : list) x(i++) = e;
    v.push_back(x);
  }
  return orthonormalize(v, v.front().size());
}

Basis random_basis(Index d, Index r, Rng& rng) { return orthonormalize(gaussian_matrix(d, r, rng)); }

// Dense ||F F^T - G G^T||_2, materialized.
double dense_proj_distance(const Basis& f, const Basis& g) {
  const DenseMatrix diff = f.cols * f.cols.transpose() - g.cols * g.cols.transpose();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(diff);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Orthonormalize, Examples) {
  const Basis xy = span_of({{1, 0, 0}, {0, 1, 0}});
  EXPECT_EQ(xy.rank(), 2);
  EXPECT_NEAR(xy.cols.row(2).norm(), 0.0, 1e-15);

  const Basis line = span_of({{1, 2, 3}, {2, 4, 6}});
  EXPECT_EQ(line.rank(), 1);
  EXPECT_EQ(line.kept, (std::vector<Index>{0}));

  const Basis b = span_of({{1, 1, 0}, {1, 0, 0}});
  EXPECT_NEAR((b.cols.transpose() * b.cols).determinant(), 1.0, 1e-12);
  Vector v1(3), v2(3);
  v1 << 1, 1, 0;
  v2 << 1, 0, 0;
  EXPECT_LE(project_out(v1, b).norm(), 1e-10);
  EXPECT_LE(project_out(v2, b).norm(), 1e-10);
}

TEST(Orthonormalize, AllZeroInputIsDegenerate) {
  const Basis b = orthonormalize(DenseMatrix::Zero(4, 3));
  EXPECT_TRUE(b.empty());
  EXPECT_TRUE(b.degenerate);
}

TEST(Orthonormalize, StaysOrthonormalOnIllConditionedInput) {
  Rng rng(5);
  Vector s(40);
  for (Index i = 0; i < 40; ++i) s(i) = std::pow(10.0, -8.0 * i / 39.0);
  const DenseMatrix m = simplexi::testing::with_singular_values(200, 40, s, 5);
  const Basis b = orthonormalize(m, 1e-12);
  EXPECT_EQ(b.rank(), 40);
  EXPECT_LT((b.cols.transpose() * b.cols - DenseMatrix::Identity(40, 40)).norm(), 1e-12);
  // The span is preserved: every input column is reproduced.
  const DenseMatrix resid = m - b.cols * (b.cols.transpose() * m);
  EXPECT_LT(resid.norm(), 1e-10 * m.norm());
}

TEST(Orthonormalize, WideInputStopsAtFullRank) {
  Rng rng(6);
  const Basis b = orthonormalize(gaussian_matrix(10, 300, rng));
  EXPECT_EQ(b.rank(), 10);
  EXPECT_LT((b.cols.transpose() * b.cols - DenseMatrix::Identity(10, 10)).norm(), 1e-13);
}

TEST(ExtendBasis, FillsWithOrthogonalDirections) {
  Rng rng(7);
  Basis b = span_of({{1, 0, 0, 0}});
  EXPECT_EQ(extend_basis(b, 3, rng), 2);
  EXPECT_EQ(b.rank(), 3);
  EXPECT_LT((b.cols.transpose() * b.cols - DenseMatrix::Identity(3, 3)).norm(), 1e-13);
  EXPECT_NEAR(std::abs(b.cols(0, 0)), 1.0, 1e-15);
}

TEST(SinTheta, Examples) {
  const Basis e1 = span_of({{1, 0}});
  const Basis e2 = span_of({{0, 1}});
  const double th = std::numbers::pi / 6;
  const Basis rot = span_of({{std::cos(th), std::sin(th)}});
  EXPECT_NEAR(sin_theta(e1, e1), 0.0, 1e-15);
  EXPECT_NEAR(sin_theta(e1, e2), 1.0, 1e-15);
  EXPECT_NEAR(sin_theta(e1, rot), 0.5, 1e-15);
}

TEST(SinTheta, LargerFirstArgumentGivesOne) {
  const Basis plane = span_of({{1, 0, 0}, {0, 1, 0}});
  const Basis line = span_of({{1, 0, 0}});
  EXPECT_DOUBLE_EQ(sin_theta(plane, line), 1.0);
  EXPECT_NEAR(sin_theta(line, plane), 0.0, 1e-15);
}

TEST(SinTheta, TinyAnglesAreResolved) {
  const double th = 1e-9;
  const Basis e1 = span_of({{1, 0}});
  const Basis rot = span_of({{std::cos(th), std::sin(th)}});
  EXPECT_NEAR(sin_theta(e1, rot), std::sin(th), 1e-15);
}

TEST(SinTheta, SymmetryAndTriangleInequality) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Basis f = random_basis(12, 4, rng), g = random_basis(12, 4, rng), h = random_basis(12, 4, rng);
    EXPECT_NEAR(sin_theta(f, g), sin_theta(g, f), 1e-8);
    EXPECT_LE(sin_theta(f, h), sin_theta(f, g) + sin_theta(g, h) + 1e-8);
  }
}

TEST(SinTheta, WedinBound) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = 3;
    Vector s(8);
    s << 10, 8, 6, 2, 1.5, 1, 0.5, 0.2;
    const DenseMatrix r = simplexi::testing::with_singular_values(15, 20, s, 100 + trial);
    DenseMatrix e = gaussian_matrix(15, 20, rng);
    e *= 0.3 / Eigen::JacobiSVD<DenseMatrix>(e).singularValues()(0);
    const DenseMatrix sm = r + e;
    const Eigen::JacobiSVD<DenseMatrix> svd_r(r, Eigen::ComputeThinU), svd_s(sm, Eigen::ComputeThinU);
    const double gamma = svd_r.singularValues()(m - 1) - svd_s.singularValues()(m);
    ASSERT_GT(gamma, 0.0);
    const Basis ur(DenseMatrix(svd_r.matrixU().leftCols(m)));
    const Basis us(DenseMatrix(svd_s.matrixU().leftCols(m)));
    EXPECT_LE(sin_theta(ur, us), 0.3 / gamma + 1e-8);
  }
}

TEST(ProjDistance, Examples) {
  const Basis e1 = span_of({{1, 0}});
  const Basis e2 = span_of({{0, 1}});
  EXPECT_NEAR(proj_distance(e1, e1), 0.0, 1e-15);
  EXPECT_NEAR(proj_distance(e1, e2), 1.0, 1e-15);
}

TEST(ProjDistance, MatchesDenseAndSinThetaOnEqualDimensions) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 5 + trial % 30, r = 1 + trial % 4;
    const Basis f = random_basis(d, r, rng), g = random_basis(d, r, rng);
    EXPECT_NEAR(proj_distance(f, g), dense_proj_distance(f, g), 1e-12);
    EXPECT_NEAR(proj_distance(f, g), sin_theta(f, g), 1e-8);
  }
  const Basis f = random_basis(20, 2, rng), g = random_basis(20, 5, rng);
  EXPECT_NEAR(proj_distance(f, g), dense_proj_distance(f, g), 1e-12);
}

TEST(ProjectOut, Examples) {
  Vector v(2);
  v << 1, 1;
  EXPECT_TRUE(project_out(v, Basis(DenseMatrix(2, 0))) == v);
  const Basis e1 = span_of({{1, 0}});
  EXPECT_NEAR((project_out(v, e1) - Vector::Unit(2, 1)).norm(), 0.0, 1e-15);
  Rng rng(11);
  const Basis b = random_basis(10, 3, rng);
  const Vector inside = b.cols * gaussian_vector(3, rng);
  EXPECT_LE(project_out(inside, b).norm(), 1e-10 * inside.norm());
  const Vector w = gaussian_vector(10, rng);
  EXPECT_LE((b.cols.transpose() * project_out(w, b)).cwiseAbs().maxCoeff(), 1e-10 * w.norm());
}
