#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "simplexi/sketch.hpp"
#include "simplexi/sparse_matrix.hpp"

namespace simplexi {

enum class SelectionMode { abs, two_sided };
enum class LowRankRoute { sketch, power_iteration };

struct LearnerConfig {
  Index k = 2;
  double delta = 0.1;      // smoothing fraction; each R_t has floor(delta * n) columns
  Index sketch_cols = 0;   // 0 selects k^2
  std::uint64_t seed = 0;
  SelectionMode selection_mode = SelectionMode::two_sided;
  LowRankRoute baseline = LowRankRoute::sketch;
  int power_iterations = 0;  // 0 selects ceil(ln d) * 3
};

/// floor(delta * n), at least 1.
Index subset_size(double delta, Index n);

/// Throws ParameterError unless cfg is usable on a d x n matrix.
void validate(const LearnerConfig& cfg, Index d, Index n);

struct VertexEstimates {
  DenseMatrix vertices;                       // d x k; column t is A_{R_t}
  std::vector<std::vector<Index>> index_sets;  // R_1..R_k, ascending
  DenseMatrix directions;                     // n x k; column t is u_t
  Index subset_size = 0;
  bool low_rank_flag = false;  // sketch rank deficiency or power-iteration flag
  int direction_redraws = 0;
  double seconds_low_rank = 0.0;
  double seconds_selection = 0.0;

  Index k() const { return vertices.cols(); }
  Index dim() const { return vertices.rows(); }
};

/// Hooks fired around each selection round (t = 0..k-1); used to audit which
/// columns of A a round reads.
struct LearnerHooks {
  std::function<void(Index)> round_begin;
  std::function<void(Index)> round_end;
};

/// Recovers k approximate simplex vertices: a rank-k factorization A ~ Y Z^T,
/// then k rounds that each pick a random direction in span(Y) orthogonal to
/// the vertices found so far, select the floor(delta n) columns with the most
/// extreme scores under that direction, and average them.
VertexEstimates learn_simplex(const SparseColMatrix& a, const LearnerConfig& cfg,
                              const LearnerHooks& hooks = {});

/// Same rounds, starting from a precomputed factorization.
VertexEstimates learn_from_factors(const SparseColMatrix& a, const RankKFactors& factors,
                                   const LearnerConfig& cfg, const LearnerHooks& hooks = {});

/// Indices of the s most extreme coordinates of u, ascending. Ties go to the
/// lower index.
std::vector<Index> select_indices(std::span<const double> u, Index s, SelectionMode mode);

// Text block: "k d s", k lines of R_t indices, then k lines of d vertex values.
void write_vertex_estimates(std::ostream& out, const VertexEstimates& est);
VertexEstimates read_vertex_estimates(std::istream& in);

}  // namespace simplexi
