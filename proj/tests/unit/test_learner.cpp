#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "simplexi/learner.hpp"
#include "simplexi/metrics.hpp"
#include "simplexi/models.hpp"
#include "test_util.hpp"

using namespace simplexi;

namespace {

std::vector<Index> sel(std::vector<double> u, Index s, SelectionMode m) {
  return select_indices(std::span<const double>(u), s, m);
}

// k well-separated vertices, each repeated `copies` times, plus interior points.
SparseColMatrix duplicated_vertices(Index d, Index k, Index copies, Index interior, std::uint64_t seed,
                                    DenseMatrix& m) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  m = DenseMatrix::Zero(d, k);
  for (Index l = 0; l < k; ++l) {
    m.col(l) = 0.3 * gaussian_vector(d, rng);
    m(l, l) += 5.0;
  }
  DenseMatrix p(d, k * copies + interior);
  Index col = 0;
  for (Index l = 0; l < k; ++l)
    for (Index c = 0; c < copies; ++c) p.col(col++) = m.col(l);
  for (Index i = 0; i < interior; ++i) {
    Vector w = sample_dirichlet(k, 1.0, rng);
    // Keep interior points strictly inside so vertices are the unique extremes.
    w = 0.5 * w + 0.5 * Vector::Constant(k, 1.0 / static_cast<double>(k));
    p.col(col++) = m * w;
  }
  return sparse_from_dense(p);
}

}  // namespace

TEST(SelectIndices, Examples) {
  EXPECT_EQ(sel({5, 1, 3, 2, 4}, 2, SelectionMode::abs), (std::vector<Index>{0, 4}));
  EXPECT_EQ(sel({-5, 1, 3}, 1, SelectionMode::abs), (std::vector<Index>{0}));
  EXPECT_EQ(sel({-5, -4, 3, 2}, 2, SelectionMode::two_sided), (std::vector<Index>{0, 1}));
  EXPECT_EQ(sel({5, -4, 3, 2}, 2, SelectionMode::two_sided), (std::vector<Index>{0, 2}));
}

TEST(SelectIndices, TiesGoToLowerIndex) {
  EXPECT_EQ(sel({1, 2, 2, 2, 0}, 2, SelectionMode::abs), (std::vector<Index>{1, 2}));
  EXPECT_EQ(sel({-2, 2, 0}, 1, SelectionMode::abs), (std::vector<Index>{0}));
}

TEST(SelectIndices, SizeOutOfRange) {
  EXPECT_THROW(sel({1, 2}, 3, SelectionMode::abs), ParameterError);
  EXPECT_THROW(sel({1, 2}, 0, SelectionMode::two_sided), ParameterError);
}

TEST(SelectIndices, ScaleInvariant) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector u = gaussian_vector(200, rng);
    const Vector cu = 3.7 * u;
    for (auto mode : {SelectionMode::abs, SelectionMode::two_sided}) {
      EXPECT_EQ(select_indices(std::span<const double>(u.data(), 200), 17, mode),
                select_indices(std::span<const double>(cu.data(), 200), 17, mode));
    }
  }
}

TEST(SelectIndices, AgreesWithFullSort) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector u = gaussian_vector(100, rng);
    std::vector<Index> order(100);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(u(a)) > std::abs(u(b)); });
    std::vector<Index> expect(order.begin(), order.begin() + 10);
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(select_indices(std::span<const double>(u.data(), 100), 10, SelectionMode::abs), expect);
  }
}

TEST(LearnerConfig, Validation) {
  LearnerConfig cfg;
  cfg.k = 1;
  EXPECT_THROW(validate(cfg, 10, 10), ParameterError);
  cfg.k = 11;
  EXPECT_THROW(validate(cfg, 10, 20), ParameterError);
  cfg.k = 3;
  cfg.delta = 0.0;
  EXPECT_THROW(validate(cfg, 10, 20), ParameterError);
  cfg.delta = 1.5;
  EXPECT_THROW(validate(cfg, 10, 20), ParameterError);
  cfg.delta = 0.1;
  cfg.sketch_cols = 2;
  EXPECT_THROW(validate(cfg, 10, 20), ParameterError);
  cfg.sketch_cols = 0;
  EXPECT_NO_THROW(validate(cfg, 10, 20));
  EXPECT_EQ(subset_size(0.1, 95), 9);
  EXPECT_EQ(subset_size(0.001, 10), 1);
}

TEST(Learner, NoiselessDuplicatedVerticesAreRecoveredExactly) {
  for (Index k = 2; k <= 8; ++k) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      DenseMatrix m;
      const Index copies = 10;
      const auto a = duplicated_vertices(20, k, copies, 60, 100 * k + seed, m);
      LearnerConfig cfg;
      cfg.k = k;
      cfg.delta = static_cast<double>(copies) / static_cast<double>(a.cols());
      cfg.seed = seed;
      const auto est = learn_simplex(a, cfg);
      EXPECT_EQ(est.subset_size, copies);
      const auto match = match_vertices(est, m, 0.0, compute_alpha(m), cfg.delta);
      EXPECT_LE(match.max_error, 1e-8) << "k=" << k << " seed=" << seed;
    }
  }
}

TEST(Learner, TwoVerticesInThePlaneUnderNoise) {
  int within = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index n = 1000;
    Rng rng(seed);
    DenseMatrix p(2, n);
    for (Index j = 0; j < n; ++j) {
      if (j < 400) p.col(j) << 1, 0;
      else if (j < 800) p.col(j) << 0, 1;
      else p.col(j) << 0.5, 0.5;
    }
    DenseMatrix noise = gaussian_matrix(2, n, rng);
    const double s = Eigen::JacobiSVD<DenseMatrix>(noise).singularValues()(0);
    noise *= 0.01 * std::sqrt(static_cast<double>(n)) / s;
    const auto a = sparse_from_dense(p + noise);
    LearnerConfig cfg;
    cfg.k = 2;
    cfg.delta = 0.3;
    cfg.seed = seed;
    DenseMatrix m(2, 2);
    m << 1, 0, 0, 1;
    const auto match = match_vertices(learn_simplex(a, cfg), m, 0.01, 1.0, 0.3);
    within += match.max_error <= 0.15;
  }
  EXPECT_EQ(within, 50);
}

TEST(Learner, DeterministicBitForBit) {
  LdaParams p;
  p.d = 60;
  p.n = 600;
  p.k = 3;
  p.words = 300;
  p.seed = 3;
  const auto inst = gen_lda(p);
  LearnerConfig cfg;
  cfg.k = 3;
  cfg.seed = 9;
  const auto x = learn_simplex(inst.A, cfg), y = learn_simplex(inst.A, cfg);
  EXPECT_TRUE(x.vertices == y.vertices);
  EXPECT_EQ(x.index_sets, y.index_sets);
  EXPECT_TRUE(x.directions == y.directions);
}

TEST(Learner, VerticesAreSubsetMeansOfTheirIndexSets) {
  const auto a = simplexi::testing::random_sparse(40, 300, 0.1, 5);
  LearnerConfig cfg;
  cfg.k = 4;
  cfg.delta = 0.05;
  const auto est = learn_simplex(a, cfg);
  ASSERT_EQ(est.index_sets.size(), 4u);
  for (Index t = 0; t < 4; ++t) {
    EXPECT_EQ(static_cast<Index>(est.index_sets[t].size()), 15);
    EXPECT_TRUE(std::is_sorted(est.index_sets[t].begin(), est.index_sets[t].end()));
    // Independent average straight from the dense matrix.
    Vector ref = Vector::Zero(40);
    const DenseMatrix dense = a.to_dense();
    for (Index j : est.index_sets[t]) ref += dense.col(j);
    ref /= 15.0;
    EXPECT_LT((est.vertices.col(t) - ref).norm(), 1e-14 * (ref.norm() + 1));
  }
}

TEST(Learner, RoundsReadOnlyTheirSelectedColumns) {
  LdaParams p;
  p.d = 50;
  p.n = 800;
  p.k = 4;
  p.words = 100;
  p.seed = 1;
  const auto inst = gen_lda(p);
  LearnerConfig cfg;
  cfg.k = 4;
  cfg.delta = 0.05;
  std::optional<ScopedColumnAccessLog> log;
  std::vector<std::vector<Index>> touched;
  LearnerHooks hooks;
  hooks.round_begin = [&](Index) { log.emplace(); };
  hooks.round_end = [&](Index) {
    touched.push_back(log->columns());
    log.reset();
  };
  const auto est = learn_simplex(inst.A, cfg, hooks);
  ASSERT_EQ(touched.size(), 4u);
  for (Index t = 0; t < 4; ++t) {
    const std::set<Index> got(touched[t].begin(), touched[t].end());
    const std::set<Index> want(est.index_sets[t].begin(), est.index_sets[t].end());
    EXPECT_EQ(got, want) << "round " << t;
    EXPECT_EQ(touched[t].size(), est.index_sets[t].size());
  }
}

TEST(Learner, DegenerateDirectionsFailWithDiagnostic) {
  // Rank-one input: after the first vertex, span(Y) holds no new direction.
  Rng rng(4);
  const Vector y = gaussian_vector(10, rng);
  const Vector z = gaussian_vector(50, rng).cwiseAbs();
  const auto a = sparse_from_dense(y * z.transpose());
  LearnerConfig cfg;
  cfg.k = 2;
  cfg.delta = 0.1;
  try {
    learn_simplex(a, cfg);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("20 draws"), std::string::npos) << e.what();
  }
}

TEST(Learner, PowerIterationBaselineGivesComparableErrors) {
  ClusterParams p;
  p.d = 30;
  p.n = 1500;
  p.k = 3;
  p.sigma_target = 0.05;
  p.seed = 2;
  const auto inst = gen_clusters_adversarial(p);
  LearnerConfig cfg;
  cfg.k = 3;
  cfg.delta = p.delta;
  cfg.seed = 1;
  const double alpha = compute_alpha(inst.M);
  const auto es = match_vertices(learn_simplex(inst.A, cfg), inst.M, inst.sigma, alpha, p.delta);
  cfg.baseline = LowRankRoute::power_iteration;
  const auto ep = match_vertices(learn_simplex(inst.A, cfg), inst.M, inst.sigma, alpha, p.delta);
  EXPECT_LT(es.max_error, 1.0);
  EXPECT_LT(ep.max_error, 1.0);
}

TEST(Learner, EstimatesRoundTripThroughText) {
  const auto a = simplexi::testing::random_sparse(12, 100, 0.2, 8);
  LearnerConfig cfg;
  cfg.k = 3;
  const auto est = learn_simplex(a, cfg);
  std::stringstream s;
  write_vertex_estimates(s, est);
  const auto back = read_vertex_estimates(s);
  EXPECT_EQ(back.index_sets, est.index_sets);
  EXPECT_TRUE(back.vertices == est.vertices);
  EXPECT_EQ(back.subset_size, est.subset_size);
  std::istringstream bad("2 3 1\n0\n");
  EXPECT_THROW(read_vertex_estimates(bad), ParseError);
}
