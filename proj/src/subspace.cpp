#include "simplexi/subspace.hpp"

#include <algorithm>
#include <cmath>

namespace simplexi {

namespace {

constexpr Index kBlock = 32;

// Removes from w its components along the first `r` columns of q.
inline void project_against(const DenseMatrix& q, Index r, Eigen::Ref<Vector> w) {
  if (r == 0) return;
  const auto qr = q.leftCols(r);
  const Vector coeff = qr.transpose() * w;
  w.noalias() -= qr * coeff;
}

}  // namespace

Basis orthonormalize(const DenseMatrix& vectors, double tol) {
  const Index d = vectors.rows();
  const Index m = vectors.cols();
  Basis basis;
  DenseMatrix q(d, std::min(d, m));
  Index r = 0;

  for (Index start = 0; start < m && r < d; start += kBlock) {
    const Index b = std::min(kBlock, m - start);
    DenseMatrix w = vectors.middleCols(start, b);
    const Vector input_norms = w.colwise().norm().transpose();
    // Two block passes against the basis accumulated before this block.
    for (int pass = 0; pass < 2 && r > 0; ++pass) {
      const DenseMatrix coeff = q.leftCols(r).transpose() * w;
      w.noalias() -= q.leftCols(r) * coeff;
    }
    const Index block_start = r;
    for (Index i = 0; i < b && r < d; ++i) {
      const double in_norm = input_norms(i);
      if (!(in_norm > 0.0)) continue;
      Vector v = w.col(i);
      double before = v.norm();
      // Two passes against directions found earlier in this block.
      for (int pass = 0; pass < 2; ++pass) {
        const Index local = r - block_start;
        if (local == 0) break;
        const auto ql = q.middleCols(block_start, local);
        const Vector coeff = ql.transpose() * v;
        v.noalias() -= ql * coeff;
      }
      double after = v.norm();
      // Heavy cancellation: repeat full passes until the norm stabilizes.
      for (int extra = 0; extra < 3 && after < 0.5 * before && after > tol * in_norm; ++extra) {
        before = after;
        project_against(q, r, v);
        after = v.norm();
      }
      if (after <= tol * in_norm) continue;
      q.col(r) = v / after;
      basis.kept.push_back(start + i);
      ++r;
    }
  }
  basis.cols = q.leftCols(r);
  basis.degenerate = (r == 0);
  return basis;
}

Basis orthonormalize(std::span<const Vector> vectors, Index dim, double tol) {
  DenseMatrix m(dim, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != dim) throw DimensionError("orthonormalize: vector length mismatch");
    m.col(static_cast<Index>(j)) = vectors[j];
  }
  return orthonormalize(m, tol);
}

Index extend_basis(Basis& basis, Index target, Rng& rng) {
  const Index d = basis.dim();
  target = std::min(target, d);
  Index added = 0;
  int attempts = 0;
  while (basis.rank() < target) {
    if (++attempts > 100 * (target + 1)) throw NumericalError("extend_basis: cannot complete basis");
    Vector v = gaussian_vector(d, rng);
    const double in_norm = v.norm();
    v = project_out(v, basis);
    const double out_norm = v.norm();
    if (out_norm <= 1e-8 * in_norm) continue;
    v /= out_norm;
    v = project_out(v, basis);
    v.normalize();
    DenseMatrix grown(d, basis.rank() + 1);
    grown.leftCols(basis.rank()) = basis.cols;
    grown.col(basis.rank()) = v;
    basis.cols = std::move(grown);
    ++added;
  }
  basis.degenerate = basis.empty();
  return added;
}

double sin_theta(const Basis& f, const Basis& g) {
  if (f.empty() || g.empty()) throw DimensionError("sin_theta: empty basis");
  if (f.dim() != g.dim()) throw DimensionError("sin_theta: ambient dimensions differ");
  if (f.rank() > g.rank()) return 1.0;
  // Singular values of (I - G G^T) F are the principal-angle sines; taking
  // them directly avoids the cancellation in sqrt(1 - cos^2).
  const DenseMatrix resid = f.cols - g.cols * (g.cols.transpose() * f.cols);
  Eigen::JacobiSVD<DenseMatrix> svd(resid);
  const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::clamp(s, 0.0, 1.0);
}

double proj_distance(const Basis& f, const Basis& g) {
  if (f.dim() != g.dim()) throw DimensionError("proj_distance: ambient dimensions differ");
  if (f.empty() && g.empty()) return 0.0;
  DenseMatrix joint(f.dim(), f.rank() + g.rank());
  joint << f.cols, g.cols;
  const Basis b = orthonormalize(joint, 1e-12);
  if (b.empty()) return 0.0;
  const DenseMatrix bf = b.cols.transpose() * f.cols;
  const DenseMatrix bg = b.cols.transpose() * g.cols;
  const DenseMatrix diff = bf * bf.transpose() - bg * bg.transpose();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(diff, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Vector project_out(const Vector& v, const Basis& u) {
  if (u.empty()) return v;
  if (u.dim() != v.size()) throw DimensionError("project_out: dimension mismatch");
  Vector w = v;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector coeff = u.cols.transpose() * w;
    w.noalias() -= u.cols * coeff;
  }
  return w;
}

}  // namespace simplexi
