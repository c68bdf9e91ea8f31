#include "simplexi/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "simplexi/kernels.hpp"
#include "simplexi/random.hpp"

namespace simplexi {

namespace {

thread_local ScopedColumnAccessLog* g_access_log = nullptr;

inline void log_all_columns(const SparseColMatrix& a) {
  if (auto* log = g_access_log) {
    const auto ptr = a.col_ptr();
    for (Index j = 0; j < a.cols(); ++j) log->record(j, ptr[j + 1] - ptr[j]);
  }
}

std::string describe(const Triplet& t) {
  return "(" + std::to_string(t.row) + ", " + std::to_string(t.col) + ", " +
         std::to_string(t.value) + ")";
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-major copy so that one matrix row is a contiguous kernel operand.
std::vector<double> to_row_major(const DenseMatrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows() * m.cols()));
  Eigen::Map<RowMajor>(out.data(), m.rows(), m.cols()) = m;
  return out;
}

DenseMatrix from_row_major(const std::vector<double>& buf, Index rows, Index cols) {
  return Eigen::Map<const RowMajor>(buf.data(), rows, cols);
}

}  // namespace

namespace detail {
ScopedColumnAccessLog* active_access_log() { return g_access_log; }
}  // namespace detail

ScopedColumnAccessLog::ScopedColumnAccessLog() : previous_(g_access_log) { g_access_log = this; }
ScopedColumnAccessLog::~ScopedColumnAccessLog() { g_access_log = previous_; }

void ScopedColumnAccessLog::clear() {
  columns_.clear();
  entries_ = 0;
}

SparseColMatrix::SparseColMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), col_ptr_(static_cast<std::size_t>(cols + 1), 0) {
  if (rows < 0 || cols < 0) throw DimensionError("matrix dimensions must be nonnegative");
}

SparseColMatrix SparseColMatrix::from_csc(Index rows, Index cols, std::vector<Index> col_ptr,
                                          std::vector<Index> row_idx,
                                          std::vector<double> values) {
  if (rows < 0 || cols < 0) throw DimensionError("matrix dimensions must be nonnegative");
  if (static_cast<Index>(col_ptr.size()) != cols + 1)
    throw DimensionError("col_ptr must have cols + 1 entries");
  if (col_ptr.front() != 0) throw DimensionError("col_ptr[0] must be 0");
  if (row_idx.size() != values.size()) throw DimensionError("row_idx and values differ in length");
  if (col_ptr.back() != static_cast<Index>(values.size()))
    throw DimensionError("col_ptr[n] must equal nnz");
  for (Index j = 0; j < cols; ++j) {
    if (col_ptr[j + 1] < col_ptr[j]) throw DimensionError("col_ptr must be nondecreasing");
    for (Index p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      if (row_idx[p] < 0 || row_idx[p] >= rows)
        throw DimensionError("row index out of range in column " + std::to_string(j));
      if (p > col_ptr[j] && row_idx[p] <= row_idx[p - 1])
        throw DimensionError("row indices not strictly increasing in column " + std::to_string(j));
      if (values[p] == 0.0) throw DimensionError("explicit zero stored in column " + std::to_string(j));
    }
  }
  SparseColMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.col_ptr_ = std::move(col_ptr);
  m.row_idx_ = std::move(row_idx);
  m.values_ = std::move(values);
  return m;
}

SparseColMatrix::Column SparseColMatrix::column(Index j) const {
  const auto begin = static_cast<std::size_t>(col_ptr_[j]);
  const auto len = static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j]);
  return {std::span<const Index>(row_idx_).subspan(begin, len),
          std::span<const double>(values_).subspan(begin, len)};
}

SparseColMatrix SparseColMatrix::transpose() const {
  log_all_columns(*this);
  std::vector<Index> ptr(static_cast<std::size_t>(rows_ + 1), 0);
  for (Index r : row_idx_) ++ptr[r + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  std::vector<Index> idx(values_.size());
  std::vector<double> vals(values_.size());
  // Columns visited in order, so each transposed column gets increasing rows.
  for (Index j = 0; j < cols_; ++j) {
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
      const Index dst = next[row_idx_[p]]++;
      idx[dst] = j;
      vals[dst] = values_[p];
    }
  }
  return from_csc(cols_, rows_, std::move(ptr), std::move(idx), std::move(vals));
}

DenseMatrix SparseColMatrix::to_dense() const {
  log_all_columns(*this);
  DenseMatrix out = DenseMatrix::Zero(rows_, cols_);
  for (Index j = 0; j < cols_; ++j)
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) out(row_idx_[p], j) = values_[p];
  return out;
}

double SparseColMatrix::frobenius_norm_sq() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return acc;
}

std::vector<Triplet> SparseColMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (Index j = 0; j < cols_; ++j)
    for (Index p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) out.push_back({row_idx_[p], j, values_[p]});
  return out;
}

SparseColMatrix build_csc(std::span<const Triplet> triplets, Index rows, Index cols) {
  if (rows < 0 || cols < 0) throw DimensionError("matrix dimensions must be nonnegative");
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw DimensionError("triplet " + describe(t) + " outside " + std::to_string(rows) + "x" +
                           std::to_string(cols));
  }
  std::vector<Index> order(triplets.size());
  std::iota(order.begin(), order.end(), Index{0});
  // Stable so duplicate sums follow input order, which keeps results bitwise reproducible.
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    const Triplet& a = triplets[x];
    const Triplet& b = triplets[y];
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });

  std::vector<Index> ptr(static_cast<std::size_t>(cols + 1), 0);
  std::vector<Index> idx;
  std::vector<double> vals;
  idx.reserve(triplets.size());
  vals.reserve(triplets.size());
  std::size_t p = 0;
  while (p < order.size()) {
    const Triplet& head = triplets[order[p]];
    double sum = 0.0;
    std::size_t q = p;
    while (q < order.size() && triplets[order[q]].col == head.col &&
           triplets[order[q]].row == head.row) {
      sum += triplets[order[q]].value;
      ++q;
    }
    if (sum != 0.0) {
      idx.push_back(head.row);
      vals.push_back(sum);
      ++ptr[head.col + 1];
    }
    p = q;
  }
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  return SparseColMatrix::from_csc(rows, cols, std::move(ptr), std::move(idx), std::move(vals));
}

SparseColMatrix sparse_from_dense(const DenseMatrix& dense) {
  std::vector<Index> ptr(static_cast<std::size_t>(dense.cols() + 1), 0);
  std::vector<Index> idx;
  std::vector<double> vals;
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      if (dense(i, j) != 0.0) {
        idx.push_back(i);
        vals.push_back(dense(i, j));
      }
    }
    ptr[j + 1] = static_cast<Index>(vals.size());
  }
  return SparseColMatrix::from_csc(dense.rows(), dense.cols(), std::move(ptr), std::move(idx),
                                   std::move(vals));
}

DenseMatrix right_apply(const SparseColMatrix& a, const DenseMatrix& x) {
  if (x.rows() != a.cols())
    throw DimensionError("right_apply: A is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " but X has " + std::to_string(x.rows()) +
                         " rows");
  log_all_columns(a);
  const Index c = x.cols();
  const auto ptr = a.col_ptr();
  const auto rows = a.row_idx();
  const auto vals = a.values();
  const auto& k = kernels::active();
  if (c == 1) {
    Vector out = Vector::Zero(a.rows());
    for (Index j = 0; j < a.cols(); ++j) {
      const Index len = ptr[j + 1] - ptr[j];
      if (len == 0 || x(j, 0) == 0.0) continue;
      k.scatter_axpy(x(j, 0), rows.data() + ptr[j], vals.data() + ptr[j], out.data(), len);
    }
    return out;
  }
  const std::vector<double> xr = to_row_major(x);
  std::vector<double> yr(static_cast<std::size_t>(a.rows() * c), 0.0);
  for (Index j = 0; j < a.cols(); ++j) {
    const double* xrow = xr.data() + j * c;
    for (Index p = ptr[j]; p < ptr[j + 1]; ++p) k.axpy(vals[p], xrow, yr.data() + rows[p] * c, c);
  }
  return from_row_major(yr, a.rows(), c);
}

DenseMatrix transpose_apply(const SparseColMatrix& a, const DenseMatrix& q) {
  return transpose_apply_cols(a, q, 0, a.cols());
}

DenseMatrix transpose_apply_cols(const SparseColMatrix& a, const DenseMatrix& q, Index col_begin,
                                 Index col_end) {
  if (q.rows() != a.rows())
    throw DimensionError("transpose_apply: A has " + std::to_string(a.rows()) +
                         " rows but Q has " + std::to_string(q.rows()));
  if (col_begin < 0 || col_end > a.cols() || col_begin > col_end)
    throw DimensionError("transpose_apply: bad column range");
  const Index c = q.cols();
  const auto ptr = a.col_ptr();
  const auto rows = a.row_idx();
  const auto vals = a.values();
  const auto& k = kernels::active();
  if (auto* log = g_access_log)
    for (Index j = col_begin; j < col_end; ++j) log->record(j, ptr[j + 1] - ptr[j]);
  const Index m = col_end - col_begin;
  if (c == 1) {
    Vector out(m);
    for (Index j = col_begin; j < col_end; ++j)
      out(j - col_begin) =
          k.gather_dot(rows.data() + ptr[j], vals.data() + ptr[j], q.data(), ptr[j + 1] - ptr[j]);
    return out;
  }
  const std::vector<double> qr = to_row_major(q);
  std::vector<double> out(static_cast<std::size_t>(m * c), 0.0);
  for (Index j = col_begin; j < col_end; ++j) {
    double* orow = out.data() + (j - col_begin) * c;
    for (Index p = ptr[j]; p < ptr[j + 1]; ++p) k.axpy(vals[p], qr.data() + rows[p] * c, orow, c);
  }
  return from_row_major(out, m, c);
}

DenseMatrix gram_apply(const SparseColMatrix& a, const DenseMatrix& q) {
  if (q.rows() != a.rows())
    throw DimensionError("gram_apply: A has " + std::to_string(a.rows()) + " rows but Q has " +
                         std::to_string(q.rows()));
  log_all_columns(a);
  const Index c = q.cols();
  const auto ptr = a.col_ptr();
  const auto rows = a.row_idx();
  const auto vals = a.values();
  const auto& k = kernels::active();
  const std::vector<double> qr = to_row_major(q);
  std::vector<double> out(static_cast<std::size_t>(a.rows() * c), 0.0);
  std::vector<double> w(static_cast<std::size_t>(c));
  for (Index j = 0; j < a.cols(); ++j) {
    if (ptr[j] == ptr[j + 1]) continue;
    // w = Q^T A_j, then A_j w^T is added row by row.
    std::fill(w.begin(), w.end(), 0.0);
    for (Index p = ptr[j]; p < ptr[j + 1]; ++p) k.axpy(vals[p], qr.data() + rows[p] * c, w.data(), c);
    for (Index p = ptr[j]; p < ptr[j + 1]; ++p) k.axpy(vals[p], w.data(), out.data() + rows[p] * c, c);
  }
  return from_row_major(out, a.rows(), c);
}

DenseMatrix row_gram(const SparseColMatrix& a) {
  log_all_columns(a);
  const Index d = a.rows();
  DenseMatrix g = DenseMatrix::Zero(d, d);
  const auto& k = kernels::active();
  for (Index j = 0; j < a.cols(); ++j) {
    const auto col = a.column(j);
    const auto len = static_cast<Index>(col.values.size());
    // Lower triangle: column r_p of G receives v_p * v_q at rows r_q, q >= p.
    for (Index p = 0; p < len; ++p)
      k.scatter_axpy(col.values[p], col.rows.data() + p, col.values.data() + p,
                     g.col(col.rows[p]).data(), len - p);
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose().triangularView<Eigen::StrictlyUpper>();
  return g;
}

Vector left_apply(const Vector& y, const SparseColMatrix& a) {
  if (y.size() != a.rows())
    throw DimensionError("left_apply: vector length " + std::to_string(y.size()) +
                         " does not match " + std::to_string(a.rows()) + " rows");
  return transpose_apply(a, y);
}

Vector column_subset_mean(const SparseColMatrix& a, std::span<const Index> subset) {
  if (subset.empty()) throw DimensionError("column_subset_mean: empty subset");
  auto* log = g_access_log;
  Vector out = Vector::Zero(a.rows());
  const auto& k = kernels::active();
  for (Index j : subset) {
    if (j < 0 || j >= a.cols())
      throw DimensionError("column_subset_mean: column " + std::to_string(j) + " out of range");
    const auto col = a.column(j);
    if (log) log->record(j, static_cast<Index>(col.values.size()));
    k.scatter_axpy(1.0, col.rows.data(), col.values.data(), out.data(),
                   static_cast<std::int64_t>(col.values.size()));
  }
  out /= static_cast<double>(subset.size());
  return out;
}

LinearOperator as_operator(const SparseColMatrix& a) {
  return {a.rows(), a.cols(), [&a](const Vector& x) -> Vector { return right_apply(a, x); },
          [&a](const Vector& y) -> Vector { return left_apply(y, a); }};
}

LinearOperator as_operator(const DenseMatrix& a) {
  return {a.rows(), a.cols(), [&a](const Vector& x) -> Vector { return a * x; },
          [&a](const Vector& y) -> Vector { return a.transpose() * y; }};
}

NormEstimate spectral_norm_est(const LinearOperator& op, double tol, int max_iter,
                               std::uint64_t seed) {
  if (!(tol > 0.0)) throw ParameterError("spectral_norm_est: tol must be positive");
  NormEstimate est;
  if (op.rows == 0 || op.cols == 0) {
    est.converged = true;
    return est;
  }
  Rng rng = make_rng(seed, 0x5E);
  Vector v = gaussian_vector(op.cols, rng);
  v.normalize();
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector w = op.apply_transpose(op.apply(v));
    lambda = v.dot(w);
    est.iterations = it;
    if (lambda <= 0.0) {
      // v lies in the null space; zero matrix or unlucky start.
      const double wn = w.norm();
      if (wn == 0.0) {
        est.value = 0.0;
        est.converged = true;
        return est;
      }
      v = w / wn;
      continue;
    }
    const double residual = (w - lambda * v).norm();
    const double wn = w.norm();
    v = w / wn;
    if (residual <= tol * lambda) {
      // Rayleigh quotient of the updated vector is at least as good.
      const Vector w2 = op.apply_transpose(op.apply(v));
      lambda = std::max(lambda, v.dot(w2));
      est.converged = true;
      break;
    }
  }
  est.value = std::sqrt(std::max(lambda, 0.0));
  return est;
}

NormEstimate spectral_norm_est(const SparseColMatrix& a, double tol, int max_iter,
                               std::uint64_t seed) {
  return spectral_norm_est(as_operator(a), tol, max_iter, seed);
}

NormEstimate spectral_norm_est(const DenseMatrix& a, double tol, int max_iter,
                               std::uint64_t seed) {
  return spectral_norm_est(as_operator(a), tol, max_iter, seed);
}

}  // namespace simplexi
