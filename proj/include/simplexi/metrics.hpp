#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simplexi/learner.hpp"
#include "simplexi/sparse_matrix.hpp"

namespace simplexi {

/// Minimum-total-cost perfect matching on a square cost matrix; returns the
/// column assigned to each row.
std::vector<Index> solve_assignment(const DenseMatrix& cost);

/// 300 k^4 sigma / (alpha sqrt(delta)); infinite when alpha is zero.
double recovery_bound(Index k, double sigma, double alpha, double delta);

struct MatchResult {
  std::vector<Index> permutation;  // estimate t is matched to column permutation[t] of M
  Vector per_vertex_error;         // l2 distance of each estimate to its match
  double max_error = 0.0;
  double total_cost = 0.0;
  double bound = 0.0;
  bool within_bound = false;
};

MatchResult match_vertices(const DenseMatrix& estimates, const DenseMatrix& truth, double sigma,
                           double alpha, double delta);
MatchResult match_vertices(const VertexEstimates& est, const DenseMatrix& truth, double sigma,
                           double alpha, double delta);

/// Euclidean projection onto the probability simplex (sort-based, exact).
Vector project_to_simplex(const Vector& v);

struct HullFit {
  Vector weights;
  double residual_sq = 0.0;
};

/// min ||a - V w||^2 over the probability simplex by projected gradient with
/// step 1 / ||V^T V||_2, starting from uniform weights.
HullFit hull_fit(const DenseMatrix& vertices, const Vector& a, int iters);

enum class LossMode { hull, span };

/// Sum of squared residuals of a seeded column sample fitted against the
/// vertices, scaled by n / sample. `hull` constrains the weights to the
/// simplex; `span` is unconstrained least squares.
double ls_loss(const SparseColMatrix& a, const DenseMatrix& vertices, Index sample, int iters,
               std::uint64_t seed, LossMode mode = LossMode::hull);

struct ReductionResult {
  double spectral_residual_sq = 0.0;  // ||A - P_B A||_2^2, B = span of the vertices
  double lra_bound = 0.0;             // ||A - A_k||_2^2 + n^(-1/3) ||A - A_k||_F^2
  bool passes = false;
};

ReductionResult reduction_check(const SparseColMatrix& a, const DenseMatrix& vertices, Index k);

/// max over seeded random subsets S of ||A_S - P_S|| sqrt(|S| / n) / sigma.
double subset_smoothing_check(const SparseColMatrix& a, const DenseMatrix& p, double sigma,
                              Index trials, std::uint64_t seed);

struct BenchRecord {
  std::string config;  // grid cell summary
  double wall_time_sketch = 0.0;
  double wall_time_topk = 0.0;
  double loss_sketch = 0.0;
  double loss_topk = 0.0;
  std::uint64_t seed = 0;
  std::string error;  // non-empty when the cell failed
};

}  // namespace simplexi
