#include "simplexi/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "simplexi/kernels.hpp"
#include "simplexi/snapshot.hpp"

namespace simplexi {

namespace {

// Above this many entries the oracle switches from a dense SVD to the Gram side.
constexpr Index kDenseSvdEntries = 4'000'000;

void check_oracle_size(Index d, Index n, Index limit) {
  if (std::min(d, n) > limit)
    throw NumericalError("dense oracle refused: min(d, n) = " + std::to_string(std::min(d, n)) +
                         " exceeds " + std::to_string(limit));
}

// Top-k eigenpairs of a symmetric matrix, descending.
void top_eigenpairs(const DenseMatrix& sym, Index k, Vector& values, DenseMatrix& vectors) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  const Index m = sym.rows();
  k = std::min(k, m);
  values.resize(k);
  vectors.resize(m, k);
  for (Index i = 0; i < k; ++i) {
    values(i) = eig.eigenvalues()(m - 1 - i);
    vectors.col(i) = eig.eigenvectors().col(m - 1 - i);
  }
}

SvdTriple topk_from_gram(const SparseColMatrix& a, Index k) {
  SvdTriple out;
  Vector lambda;
  if (a.rows() <= a.cols()) {
    top_eigenpairs(row_gram(a), k, lambda, out.U);
    out.S = lambda.cwiseMax(0.0).cwiseSqrt();
    out.V = transpose_apply(a, out.U);
    for (Index i = 0; i < out.S.size(); ++i)
      out.V.col(i) = out.S(i) > 0.0 ? Vector(out.V.col(i) / out.S(i)) : Vector::Zero(a.cols());
  } else {
    const SparseColMatrix at = a.transpose();
    top_eigenpairs(row_gram(at), k, lambda, out.V);
    out.S = lambda.cwiseMax(0.0).cwiseSqrt();
    out.U = transpose_apply(at, out.V);
    for (Index i = 0; i < out.S.size(); ++i)
      out.U.col(i) = out.S(i) > 0.0 ? Vector(out.U.col(i) / out.S(i)) : Vector::Zero(a.rows());
  }
  return out;
}

SvdTriple topk_dense(const DenseMatrix& a, Index k) {
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdTriple out;
  out.U = svd.matrixU().leftCols(k);
  out.S = svd.singularValues().head(k);
  out.V = svd.matrixV().leftCols(k);
  return out;
}

}  // namespace

DenseMatrix CountSketch::to_dense() const {
  DenseMatrix s = DenseMatrix::Zero(input_dim, sketch_dim);
  for (Index j = 0; j < input_dim; ++j) s(j, bucket[j]) = sign[j];
  return s;
}

CountSketch make_countsketch(Index n, Index c, std::uint64_t seed) {
  if (c < 1) throw ParameterError("make_countsketch: sketch dimension must be at least 1");
  if (n < 0) throw ParameterError("make_countsketch: negative input dimension");
  CountSketch s;
  s.input_dim = n;
  s.sketch_dim = c;
  s.seed = seed;
  s.bucket.resize(static_cast<std::size_t>(n));
  s.sign.resize(static_cast<std::size_t>(n));
  Rng rng = make_rng(seed, 0xC5);
  std::uniform_int_distribution<Index> pick_bucket(0, c - 1);
  std::bernoulli_distribution pick_sign(0.5);
  for (Index j = 0; j < n; ++j) {
    s.bucket[j] = pick_bucket(rng);
    s.sign[j] = pick_sign(rng) ? 1 : -1;
  }
  return s;
}

DenseMatrix apply_countsketch(const SparseColMatrix& a, const CountSketch& s) {
  if (s.input_dim != a.cols())
    throw DimensionError("apply_countsketch: sketch expects " + std::to_string(s.input_dim) +
                         " columns, matrix has " + std::to_string(a.cols()));
  DenseMatrix c = DenseMatrix::Zero(a.rows(), s.sketch_dim);
  auto* log = detail::active_access_log();
  const auto& k = kernels::active();
  for (Index j = 0; j < a.cols(); ++j) {
    const auto col = a.column(j);
    if (log) log->record(j, static_cast<Index>(col.values.size()));
    k.scatter_axpy(static_cast<double>(s.sign[j]), col.rows.data(), col.values.data(),
                   c.col(s.bucket[j]).data(), static_cast<std::int64_t>(col.values.size()));
  }
  return c;
}

RankKFactors mixed_lra(const SparseColMatrix& a, Index k, Index c, std::uint64_t seed) {
  const Index d = a.rows();
  const Index n = a.cols();
  if (k < 1 || k > std::min(d, n))
    throw ParameterError("mixed_lra: k = " + std::to_string(k) + " outside [1, min(d, n)]");
  if (c < k) throw ParameterError("mixed_lra: sketch dimension must be at least k");

  const CountSketch sketch = make_countsketch(n, c, seed);
  const Basis q = orthonormalize(apply_countsketch(a, sketch));
  const Index r = q.rank();

  RankKFactors f;
  f.k = k;
  f.sketch_dim = c;
  f.sketch_rank = r;
  f.rank_deficient = r < k;
  if (r == 0) {
    f.Y = DenseMatrix(d, 0);
    f.Z = DenseMatrix(n, 0);
    return f;
  }

  // H = W W^T with W = Q^T A, by whichever exact route is cheaper:
  // streaming W in column blocks, or Q^T (A A^T) Q.
  Index sum_sq = 0;
  for (Index j = 0; j < n; ++j) {
    const Index len = a.col_ptr()[j + 1] - a.col_ptr()[j];
    sum_sq += len * len;
  }
  const double cost_stream = static_cast<double>(a.nnz()) * r + static_cast<double>(n) * r * r;
  const double cost_gram = static_cast<double>(sum_sq) + 2.0 * static_cast<double>(d) * d * r +
                           2.0 * static_cast<double>(d) * r * r;
  Vector lambda;
  DenseMatrix uw;
  if (r == d && cost_gram < cost_stream) {
    // span(Q) is all of R^d, so Q U_w spans the top eigenvectors of A A^T itself.
    top_eigenpairs(row_gram(a), k, lambda, f.Y);
    f.Z = transpose_apply(a, f.Y);
    return f;
  }
  DenseMatrix h;
  if (cost_gram < cost_stream) {
    const DenseMatrix g = row_gram(a);
    const DenseMatrix gq = g * q.cols;
    h.noalias() = q.cols.transpose() * gq;
  } else {
    h = DenseMatrix::Zero(r, r);
    constexpr Index kColBlock = 2048;
    for (Index start = 0; start < n; start += kColBlock) {
      const Index end = std::min(n, start + kColBlock);
      const DenseMatrix wt = transpose_apply_cols(a, q.cols, start, end);
      h.selfadjointView<Eigen::Lower>().rankUpdate(wt.transpose());
    }
    h.triangularView<Eigen::StrictlyUpper>() = h.transpose().triangularView<Eigen::StrictlyUpper>();
  }

  top_eigenpairs(h, std::min(k, r), lambda, uw);
  f.Y = q.cols * uw;
  f.Z = transpose_apply(a, f.Y);
  return f;
}

void write_rank_k_factors(std::ostream& out, const RankKFactors& f) {
  write_dense_block(out, "Y", f.Y);
  write_dense_block(out, "Z", f.Z);
}

RankKFactors read_rank_k_factors(std::istream& in) {
  RankKFactors f;
  f.Y = read_dense_block(in, "Y");
  f.Z = read_dense_block(in, "Z");
  if (f.Y.cols() != f.Z.cols()) throw ParseError("rank-k factors: Y and Z ranks differ");
  f.k = f.Y.cols();
  f.sketch_rank = f.k;
  return f;
}

SvdTriple exact_topk_svd(const SparseColMatrix& a, Index k, Index limit) {
  check_oracle_size(a.rows(), a.cols(), limit);
  if (k < 0 || k > std::min(a.rows(), a.cols()))
    throw ParameterError("exact_topk_svd: k outside [0, min(d, n)]");
  if (a.rows() * a.cols() <= kDenseSvdEntries) return topk_dense(a.to_dense(), k);
  return topk_from_gram(a, k);
}

SvdTriple exact_topk_svd(const DenseMatrix& a, Index k, Index limit) {
  check_oracle_size(a.rows(), a.cols(), limit);
  if (k < 0 || k > std::min(a.rows(), a.cols()))
    throw ParameterError("exact_topk_svd: k outside [0, min(d, n)]");
  if (a.rows() * a.cols() <= kDenseSvdEntries) return topk_dense(a, k);
  return topk_from_gram(sparse_from_dense(a), k);
}

Vector exact_singular_values(const DenseMatrix& a, Index limit) {
  check_oracle_size(a.rows(), a.cols(), limit);
  if (a.rows() * a.cols() <= kDenseSvdEntries) {
    Eigen::BDCSVD<DenseMatrix> svd(a);
    return svd.singularValues();
  }
  const DenseMatrix g = a.rows() <= a.cols() ? DenseMatrix(a * a.transpose())
                                             : DenseMatrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(g, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
}

Vector exact_singular_values(const SparseColMatrix& a, Index limit) {
  check_oracle_size(a.rows(), a.cols(), limit);
  if (a.rows() * a.cols() <= kDenseSvdEntries) return exact_singular_values(a.to_dense(), limit);
  const DenseMatrix g = a.rows() <= a.cols() ? row_gram(a) : row_gram(a.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(g, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
}

TailMass tail_mass(const Vector& s, Index k) {
  TailMass t;
  if (k < s.size()) {
    t.spectral_sq = s(k) * s(k);
    t.frobenius_sq = s.tail(s.size() - k).squaredNorm();
  }
  return t;
}

LraQuality evaluate_lra(const SparseColMatrix& a, const RankKFactors& f) {
  if (a.rows() * a.cols() > 5 * kDenseSvdEntries)
    throw NumericalError("evaluate_lra: matrix too large for the dense residual");
  LraQuality q;
  const DenseMatrix resid = a.to_dense() - f.Y * f.Z.transpose();
  q.residual_sq = std::pow(exact_singular_values(resid)(0), 2);
  q.tail = tail_mass(exact_singular_values(a), f.k);
  const double scale = q.tail.spectral_sq + q.tail.frobenius_sq / static_cast<double>(f.k);
  q.bound_sq = (1.0 + kDeskEpsilon) * q.tail.spectral_sq +
               kDeskEpsilon / static_cast<double>(f.k) * q.tail.frobenius_sq;
  q.achieved_epsilon = scale > 0.0 ? std::max(0.0, (q.residual_sq - q.tail.spectral_sq) / scale)
                                   : (q.residual_sq > 0.0 ? INFINITY : 0.0);
  q.within_bound = q.residual_sq <= q.bound_sq;
  return q;
}

int default_power_iterations(Index d, int multiplier) {
  const double t = std::ceil(std::log(static_cast<double>(std::max<Index>(d, 2)))) * multiplier;
  return std::max(1, static_cast<int>(t));
}

PowerIterationResult subspace_power(const SparseColMatrix& a, Index k, int iterations,
                                    std::uint64_t seed, const PowerObserver& observer) {
  const Index d = a.rows();
  if (k < 1 || k > d) throw ParameterError("subspace_power: k outside [1, d]");
  if (iterations < 1) throw ParameterError("subspace_power: need at least one iteration");
  Rng rng = make_rng(seed, 0x90);
  PowerIterationResult res;

  Basis q = orthonormalize(gaussian_matrix(d, k, rng));
  if (q.rank() < k) res.redrawn_directions += extend_basis(q, k, rng);
  if (observer) observer(0, q.cols);

  for (int t = 1; t <= iterations; ++t) {
    const DenseMatrix z = gram_apply(a, q.cols);
    q = orthonormalize(z);
    if (q.rank() < k) {
      res.rank_flag = true;
      res.redrawn_directions += extend_basis(q, k, rng);
    }
    res.iterations = t;
    if (observer) observer(t, q.cols);
  }
  res.Q = q.cols;

  // Ritz values of A A^T on span(Q).
  const DenseMatrix atq = transpose_apply(a, res.Q);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(atq.transpose() * atq, Eigen::EigenvaluesOnly);
  res.ritz_values = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();

  // Probe the orthogonal complement for the next singular value.
  if (k < d) {
    Vector x = project_out(gaussian_vector(d, rng), q);
    double mu = 0.0;
    for (int it = 0; it < 30 && x.norm() > 0.0; ++it) {
      x.normalize();
      Vector y = project_out(right_apply(a, left_apply(x, a)), q);
      mu = std::max(mu, x.dot(y));
      x = y;
    }
    res.complement_estimate = std::sqrt(std::max(mu, 0.0));
  }
  const double sk = res.ritz_values.size() ? res.ritz_values(res.ritz_values.size() - 1) : 0.0;
  res.gap_flag = res.rank_flag || sk == 0.0 || res.complement_estimate >= (1.0 - 1e-6) * sk;
  return res;
}

}  // namespace simplexi
