#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "simplexi/sparse_matrix.hpp"
#include "simplexi/subspace.hpp"

namespace simplexi {

/// Sparse embedding with one signed nonzero per input coordinate: input
/// column j of A lands in sketch column bucket[j] with sign sign[j].
struct CountSketch {
  Index input_dim = 0;
  Index sketch_dim = 0;
  std::vector<Index> bucket;
  std::vector<std::int8_t> sign;
  std::uint64_t seed = 0;

  /// The n x c matrix S^T with A * S^T == apply_countsketch(A, *this).
  DenseMatrix to_dense() const;
};

CountSketch make_countsketch(Index n, Index c, std::uint64_t seed);

/// A S^T (d x c) in one pass over the nonzeros of A.
DenseMatrix apply_countsketch(const SparseColMatrix& a, const CountSketch& s);

inline Index default_sketch_cols(Index k) { return k * k; }

// The desk-scale epsilon at which mixed_lra outputs are judged:
// ||A - Y Z^T||_2^2 <= (1 + eps) ||A - A_k||_2^2 + (eps / k) ||A - A_k||_F^2.
inline constexpr double kDeskEpsilon = 1.0;

/// Rank-k factorization B = Y Z^T with orthonormal Y.
struct RankKFactors {
  DenseMatrix Y;  // d x k
  DenseMatrix Z;  // n x k
  Index k = 0;
  Index sketch_dim = 0;
  Index sketch_rank = 0;        // rank of the sketched column space
  bool rank_deficient = false;  // fewer than k directions were available
  double nominal_epsilon = kDeskEpsilon;
};

/// CountSketch mixed spectral-Frobenius low-rank approximation:
/// C = A S^T, Q = orth(C), W = Q^T A, (U_w, S_w) = top-k of W,
/// Y = Q U_w, Z = A^T Y (= V_w S_w).
RankKFactors mixed_lra(const SparseColMatrix& a, Index k, Index c, std::uint64_t seed);

void write_rank_k_factors(std::ostream& out, const RankKFactors& f);
RankKFactors read_rank_k_factors(std::istream& in);

struct SvdTriple {
  DenseMatrix U;  // d x k
  Vector S;       // k, nonincreasing
  DenseMatrix V;  // n x k
};

inline constexpr Index kDenseOracleLimit = 4000;

/// Reference truncated SVD. Dense bidiagonal SVD for small inputs, symmetric
/// eigensolver on the smaller Gram side otherwise. Refuses when
/// min(d, n) exceeds `limit`: this is the test oracle, not the fast path.
SvdTriple exact_topk_svd(const SparseColMatrix& a, Index k, Index limit = kDenseOracleLimit);
SvdTriple exact_topk_svd(const DenseMatrix& a, Index k, Index limit = kDenseOracleLimit);

/// Every singular value, nonincreasing (min(d, n) of them).
Vector exact_singular_values(const SparseColMatrix& a, Index limit = kDenseOracleLimit);
Vector exact_singular_values(const DenseMatrix& a, Index limit = kDenseOracleLimit);

/// ||A - A_k||_2^2 and ||A - A_k||_F^2 from the oracle spectrum.
struct TailMass {
  double spectral_sq = 0.0;
  double frobenius_sq = 0.0;
};
TailMass tail_mass(const Vector& singular_values, Index k);

/// Oracle comparison of a factorization against the exact spectrum.
struct LraQuality {
  double residual_sq = 0.0;  // ||A - Y Z^T||_2^2
  TailMass tail;
  double bound_sq = 0.0;           // at kDeskEpsilon
  double achieved_epsilon = 0.0;   // smallest eps meeting the mixed bound
  bool within_bound = false;
};
LraQuality evaluate_lra(const SparseColMatrix& a, const RankKFactors& f);

struct PowerIterationResult {
  DenseMatrix Q;               // d x k, orthonormal
  Vector ritz_values;          // estimates of sigma_1..sigma_k
  double complement_estimate = 0.0;  // estimate of sigma_{k+1}
  Index redrawn_directions = 0;      // directions re-randomized after rank loss
  bool rank_flag = false;
  bool gap_flag = false;  // no resolved gap between sigma_k and sigma_{k+1}
  int iterations = 0;
};

using PowerObserver = std::function<void(int iteration, const DenseMatrix& q)>;

/// Subspace power iteration Q_t = orth(A A^T Q_{t-1}) from a seeded random
/// orthonormal start. The observer (if any) sees Q_0 and every Q_t.
PowerIterationResult subspace_power(const SparseColMatrix& a, Index k, int iterations,
                                    std::uint64_t seed, const PowerObserver& observer = {});

/// ceil(ln d) * multiplier, at least 1.
int default_power_iterations(Index d, int multiplier = 3);

}  // namespace simplexi
