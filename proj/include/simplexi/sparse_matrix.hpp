#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "simplexi/types.hpp"

namespace simplexi {

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Compressed sparse-column matrix. Immutable once built.
///
/// Invariants: col_ptr has cols()+1 nondecreasing offsets starting at 0,
/// row indices inside a column are strictly increasing and below rows(),
/// and no stored value is zero.
class SparseColMatrix {
 public:
  struct Column {
    std::span<const Index> rows;
    std::span<const double> values;
  };

  SparseColMatrix() = default;
  SparseColMatrix(Index rows, Index cols);

  /// Adopts raw CSC arrays after validating every invariant.
  static SparseColMatrix from_csc(Index rows, Index cols, std::vector<Index> col_ptr,
                                  std::vector<Index> row_idx, std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> col_ptr() const { return col_ptr_; }
  std::span<const Index> row_idx() const { return row_idx_; }
  std::span<const double> values() const { return values_; }

  Column column(Index j) const;

  SparseColMatrix transpose() const;
  DenseMatrix to_dense() const;
  double frobenius_norm_sq() const;
  std::vector<Triplet> triplets() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

/// Sums duplicates and drops entries that cancel to zero. Throws
/// DimensionError naming the first out-of-range triplet.
SparseColMatrix build_csc(std::span<const Triplet> triplets, Index rows, Index cols);

SparseColMatrix sparse_from_dense(const DenseMatrix& dense);

/// A * X in O(nnz(A) * X.cols()).
DenseMatrix right_apply(const SparseColMatrix& a, const DenseMatrix& x);

/// A^T * Q in O(nnz(A) * Q.cols()).
DenseMatrix transpose_apply(const SparseColMatrix& a, const DenseMatrix& q);

/// Rows [col_begin, col_end) of A^T * Q, reading only those columns of A.
DenseMatrix transpose_apply_cols(const SparseColMatrix& a, const DenseMatrix& q, Index col_begin,
                                 Index col_end);

/// A (A^T Q) in O(nnz(A) * Q.cols()) without forming the n x c middle factor.
DenseMatrix gram_apply(const SparseColMatrix& a, const DenseMatrix& q);

/// Dense A * A^T (rows x rows), accumulated column by column in
/// sum_j nnz(A_j)^2 operations.
DenseMatrix row_gram(const SparseColMatrix& a);

/// y^T A as a length-n vector, O(nnz(A)).
Vector left_apply(const Vector& y, const SparseColMatrix& a);

/// Average of the columns listed in `subset`; touches only those columns.
Vector column_subset_mean(const SparseColMatrix& a, std::span<const Index> subset);

/// A matrix known only through its products with vectors.
struct LinearOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<Vector(const Vector&)> apply;            // x (cols) -> A x (rows)
  std::function<Vector(const Vector&)> apply_transpose;  // y (rows) -> A^T y (cols)
};

LinearOperator as_operator(const SparseColMatrix& a);
LinearOperator as_operator(const DenseMatrix& a);

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Power iteration on A^T A from a seeded random unit vector. Stops once the
/// eigen-residual ||A^T A v - lambda v|| drops below tol * lambda, which
/// bounds the relative error of the returned norm by roughly tol.
NormEstimate spectral_norm_est(const LinearOperator& op, double tol, int max_iter,
                               std::uint64_t seed);
NormEstimate spectral_norm_est(const SparseColMatrix& a, double tol, int max_iter,
                               std::uint64_t seed);
NormEstimate spectral_norm_est(const DenseMatrix& a, double tol, int max_iter,
                               std::uint64_t seed);

/// Records which columns of any SparseColMatrix the current thread reads
/// while alive. Used to audit that a phase stays inside a column budget.
class ScopedColumnAccessLog {
 public:
  ScopedColumnAccessLog();
  ~ScopedColumnAccessLog();
  ScopedColumnAccessLog(const ScopedColumnAccessLog&) = delete;
  ScopedColumnAccessLog& operator=(const ScopedColumnAccessLog&) = delete;

  void clear();
  const std::vector<Index>& columns() const { return columns_; }
  Index entries_read() const { return entries_; }

  void record(Index col, Index entries) {
    columns_.push_back(col);
    entries_ += entries;
  }

 private:
  ScopedColumnAccessLog* previous_;
  std::vector<Index> columns_;
  Index entries_ = 0;
};

namespace detail {
ScopedColumnAccessLog* active_access_log();
}

}  // namespace simplexi
