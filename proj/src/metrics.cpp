#include "simplexi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "simplexi/random.hpp"
#include "simplexi/sketch.hpp"
#include "simplexi/subspace.hpp"

namespace simplexi {

std::vector<Index> solve_assignment(const DenseMatrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw DimensionError("solve_assignment: cost matrix must be square");
  if (n == 0) return {};
  // Shortest augmenting paths with row/column potentials, 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<Index> assignment(n);
  for (Index j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

double recovery_bound(Index k, double sigma, double alpha, double delta) {
  if (!(alpha > 0.0) || !(delta > 0.0)) return std::numeric_limits<double>::infinity();
  return 300.0 * std::pow(static_cast<double>(k), 4) * sigma / (alpha * std::sqrt(delta));
}

MatchResult match_vertices(const DenseMatrix& estimates, const DenseMatrix& truth, double sigma,
                           double alpha, double delta) {
  if (estimates.rows() != truth.rows() || estimates.cols() != truth.cols())
    throw DimensionError("match_vertices: estimates are " + std::to_string(estimates.rows()) + "x" +
                         std::to_string(estimates.cols()) + ", truth is " +
                         std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
  const Index k = truth.cols();
  DenseMatrix cost(k, k);
  for (Index t = 0; t < k; ++t)
    for (Index l = 0; l < k; ++l) cost(t, l) = (estimates.col(t) - truth.col(l)).norm();
  MatchResult r;
  r.permutation = solve_assignment(cost);
  r.per_vertex_error.resize(k);
  for (Index t = 0; t < k; ++t) {
    r.per_vertex_error(t) = cost(t, r.permutation[t]);
    r.total_cost += r.per_vertex_error(t);
  }
  r.max_error = k ? r.per_vertex_error.maxCoeff() : 0.0;
  r.bound = recovery_bound(k, sigma, alpha, delta);
  r.within_bound = r.max_error <= r.bound;
  return r;
}

MatchResult match_vertices(const VertexEstimates& est, const DenseMatrix& truth, double sigma,
                           double alpha, double delta) {
  return match_vertices(est.vertices, truth, sigma, alpha, delta);
}

Vector project_to_simplex(const Vector& v) {
  const Index k = v.size();
  if (k == 0) return v;
  std::vector<double> sorted(v.data(), v.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index i = 0; i < k; ++i) {
    cumsum += sorted[i];
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

namespace {

struct HullSolver {
  const DenseMatrix& vertices;
  DenseMatrix gram;
  double step = 0.0;

  explicit HullSolver(const DenseMatrix& v) : vertices(v), gram(v.transpose() * v) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lipschitz = gram.size() ? eig.eigenvalues().maxCoeff() : 0.0;
    step = lipschitz > 0.0 ? 1.0 / lipschitz : 0.0;
  }

  HullFit fit(const Vector& a, const Vector& vta, int iters) const {
    const Index k = vertices.cols();
    HullFit out;
    out.weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
    if (step > 0.0) {
      for (int it = 0; it < iters; ++it) {
        const Vector grad = gram * out.weights - vta;
        out.weights = project_to_simplex(out.weights - step * grad);
      }
    }
    out.residual_sq = (a - vertices * out.weights).squaredNorm();
    return out;
  }
};

}  // namespace

HullFit hull_fit(const DenseMatrix& vertices, const Vector& a, int iters) {
  if (vertices.rows() != a.size()) throw DimensionError("hull_fit: dimension mismatch");
  if (vertices.cols() == 0) throw DimensionError("hull_fit: no vertices");
  const HullSolver solver(vertices);
  return solver.fit(a, vertices.transpose() * a, iters);
}

double ls_loss(const SparseColMatrix& a, const DenseMatrix& vertices, Index sample, int iters,
               std::uint64_t seed, LossMode mode) {
  const Index n = a.cols();
  if (vertices.rows() != a.rows()) throw DimensionError("ls_loss: vertex dimension mismatch");
  if (vertices.cols() == 0) throw DimensionError("ls_loss: no vertices");
  if (sample < 1 || sample > n) throw ParameterError("ls_loss: sample must lie in [1, n]");
  if (iters < 1) throw ParameterError("ls_loss: iters must be at least 1");

  std::vector<Index> cols(static_cast<std::size_t>(n));
  std::iota(cols.begin(), cols.end(), Index{0});
  Rng rng = make_rng(seed, 0x155);
  for (Index i = 0; i < sample; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(cols[i], cols[pick(rng)]);
  }
  cols.resize(static_cast<std::size_t>(sample));
  std::sort(cols.begin(), cols.end());

  const HullSolver solver(vertices);
  Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod;
  if (mode == LossMode::span) cod.compute(vertices);

  double total = 0.0;
  for (Index j : cols) {
    Vector col = Vector::Zero(a.rows());
    const auto c = a.column(j);
    for (std::size_t p = 0; p < c.values.size(); ++p) col(c.rows[p]) = c.values[p];
    if (mode == LossMode::hull) {
      total += solver.fit(col, vertices.transpose() * col, iters).residual_sq;
    } else {
      const Vector w = cod.solve(col);
      total += (col - vertices * w).squaredNorm();
    }
  }
  return total * static_cast<double>(n) / static_cast<double>(sample);
}

ReductionResult reduction_check(const SparseColMatrix& a, const DenseMatrix& vertices, Index k) {
  if (vertices.rows() != a.rows()) throw DimensionError("reduction_check: vertex dimension mismatch");
  const Basis basis = orthonormalize(vertices);
  DenseMatrix resid = a.to_dense();
  if (!basis.empty()) resid -= basis.cols * (basis.cols.transpose() * resid);
  ReductionResult r;
  const Vector rs = exact_singular_values(resid);
  r.spectral_residual_sq = rs.size() ? rs(0) * rs(0) : 0.0;
  const TailMass tail = tail_mass(exact_singular_values(a), k);
  r.lra_bound = tail.spectral_sq +
                std::pow(static_cast<double>(a.cols()), -1.0 / 3.0) * tail.frobenius_sq;
  r.passes = r.spectral_residual_sq <= r.lra_bound;
  return r;
}

double subset_smoothing_check(const SparseColMatrix& a, const DenseMatrix& p, double sigma,
                              Index trials, std::uint64_t seed) {
  const Index n = a.cols();
  if (p.rows() != a.rows() || p.cols() != n) throw DimensionError("subset_smoothing_check: shapes differ");
  if (n == 0) return 0.0;
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = make_rng(seed, 0x55);
  std::uniform_int_distribution<Index> pick_size(1, n);
  double worst = 0.0;
  for (Index t = 0; t < trials; ++t) {
    const Index size = pick_size(rng);
    for (Index i = 0; i < size; ++i) {
      std::uniform_int_distribution<Index> pick(i, n - 1);
      std::swap(perm[i], perm[pick(rng)]);
    }
    const std::span<const Index> subset(perm.data(), static_cast<std::size_t>(size));
    Vector diff = column_subset_mean(a, subset);
    Vector p_mean = Vector::Zero(p.rows());
    for (Index j : subset) p_mean += p.col(j);
    diff -= p_mean / static_cast<double>(size);
    const double gap = diff.norm() * std::sqrt(static_cast<double>(size) / static_cast<double>(n));
    const double ratio = sigma > 0.0 ? gap / sigma : (gap > 0.0 ? INFINITY : 0.0);
    worst = std::max(worst, ratio);
  }
  return worst;
}

}  // namespace simplexi
