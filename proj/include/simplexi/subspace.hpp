#pragma once

#include <span>
#include <vector>

#include "simplexi/random.hpp"
#include "simplexi/types.hpp"

namespace simplexi {

/// Orthonormal basis of a subspace of R^dim, stored as the columns of `cols`.
struct Basis {
  DenseMatrix cols;
  std::vector<Index> kept;  // input positions that contributed a direction
  bool degenerate = false;  // every input vector was numerically zero

  Basis() = default;
  explicit Basis(DenseMatrix orthonormal) : cols(std::move(orthonormal)) {}

  Index dim() const { return cols.rows(); }
  Index rank() const { return cols.cols(); }
  bool empty() const { return cols.cols() == 0; }
};

inline constexpr double kDefaultRankTol = 1e-10;

/// Orthonormal basis for the span of the columns of `vectors`, processed in
/// order. A vector is dropped when its residual after projecting out the
/// directions found so far is at most tol times its own norm.
///
/// Uses block Gram-Schmidt with a second full reorthogonalization pass
/// (plus a third pass for vectors that lose most of their norm), which keeps
/// ||Q^T Q - I|| at working precision.
Basis orthonormalize(const DenseMatrix& vectors, double tol = kDefaultRankTol);
Basis orthonormalize(std::span<const Vector> vectors, Index dim, double tol = kDefaultRankTol);

/// Fills `basis` up to `target` columns with random directions orthogonal to
/// what it already spans. Returns the number of directions added.
Index extend_basis(Basis& basis, Index target, Rng& rng);

/// Largest principal-angle sine between span(F) and span(G). When
/// rank(F) > rank(G) some direction of F is orthogonal to G and the result is 1.
double sin_theta(const Basis& f, const Basis& g);

/// ||F F^T - G G^T||_2, evaluated on the joint span of F and G.
double proj_distance(const Basis& f, const Basis& g);

/// v - U (U^T v), applied twice.
Vector project_out(const Vector& v, const Basis& u);

}  // namespace simplexi
