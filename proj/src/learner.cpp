#include "simplexi/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "simplexi/snapshot.hpp"
#include "simplexi/subspace.hpp"

namespace simplexi {

namespace {

constexpr int kMaxDirectionDraws = 20;
constexpr double kDegenerateDirection = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// First s positions of `order` under `before`, returned ascending.
template <typename Before>
std::vector<Index> top_s(Index n, Index s, Before before) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::nth_element(order.begin(), order.begin() + (s - 1), order.end(), before);
  order.resize(static_cast<std::size_t>(s));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

Index subset_size(double delta, Index n) {
  return std::max<Index>(1, static_cast<Index>(std::floor(delta * static_cast<double>(n))));
}

void validate(const LearnerConfig& cfg, Index d, Index n) {
  if (cfg.k < 2) throw ParameterError("learner: k must be at least 2");
  if (cfg.k > std::min(d, n))
    throw ParameterError("learner: k = " + std::to_string(cfg.k) + " exceeds min(d, n) = " +
                         std::to_string(std::min(d, n)));
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0))
    throw ParameterError("learner: delta must lie in (0, 1]");
  if (cfg.sketch_cols != 0 && cfg.sketch_cols < cfg.k)
    throw ParameterError("learner: sketch_cols must be at least k");
  if (cfg.power_iterations < 0) throw ParameterError("learner: power_iterations must be >= 0");
}

std::vector<Index> select_indices(std::span<const double> u, Index s, SelectionMode mode) {
  const auto n = static_cast<Index>(u.size());
  if (s < 1 || s > n)
    throw ParameterError("select_indices: s = " + std::to_string(s) + " outside [1, " +
                         std::to_string(n) + "]");
  if (mode == SelectionMode::abs) {
    return top_s(n, s, [&](Index x, Index y) {
      const double ax = std::abs(u[x]);
      const double ay = std::abs(u[y]);
      return ax != ay ? ax > ay : x < y;
    });
  }
  auto largest = top_s(n, s, [&](Index x, Index y) { return u[x] != u[y] ? u[x] > u[y] : x < y; });
  auto smallest = top_s(n, s, [&](Index x, Index y) { return u[x] != u[y] ? u[x] < u[y] : x < y; });
  // Summed in ascending index order so the comparison is reproducible.
  double sum_hi = 0.0;
  double sum_lo = 0.0;
  for (Index j : largest) sum_hi += u[j];
  for (Index j : smallest) sum_lo += u[j];
  return std::abs(sum_lo) > std::abs(sum_hi) ? smallest : largest;
}

VertexEstimates learn_from_factors(const SparseColMatrix& a, const RankKFactors& factors,
                                   const LearnerConfig& cfg, const LearnerHooks& hooks) {
  const Index d = a.rows();
  const Index n = a.cols();
  validate(cfg, d, n);
  if (factors.Y.rows() != d || factors.Z.rows() != n || factors.Y.cols() != factors.Z.cols())
    throw DimensionError("learner: factor shapes do not match the matrix");
  const Index rank = factors.Y.cols();
  if (rank == 0) throw NumericalError("learner: low-rank factors are empty");

  VertexEstimates est;
  est.subset_size = subset_size(cfg.delta, n);
  est.vertices = DenseMatrix::Zero(d, cfg.k);
  est.directions = DenseMatrix::Zero(n, cfg.k);
  est.index_sets.reserve(static_cast<std::size_t>(cfg.k));
  est.low_rank_flag = factors.rank_deficient;

  Rng rng = make_rng(cfg.seed, 0xD1);
  const auto start = Clock::now();
  for (Index t = 0; t < cfg.k; ++t) {
    if (hooks.round_begin) hooks.round_begin(t);
    const Basis selected = orthonormalize(est.vertices.leftCols(t));

    Vector h_perp;
    for (int draw = 1;; ++draw) {
      const Vector g = gaussian_vector(rank, rng);
      const Vector h = factors.Y * g;
      h_perp = project_out(h, selected);
      const double hn = h_perp.norm();
      if (hn > kDegenerateDirection * h.norm()) {
        h_perp /= hn;
        break;
      }
      ++est.direction_redraws;
      if (draw >= kMaxDirectionDraws)
        throw NumericalError("learner: round " + std::to_string(t + 1) +
                             ": every random direction in span(Y) lies in the span of the "
                             "selected vertices (" +
                             std::to_string(kMaxDirectionDraws) + " draws)");
    }

    // u_t = Z (Y^T h'), an n-vector in O((n + d) k).
    const Vector coeff = factors.Y.transpose() * h_perp;
    const Vector u = factors.Z * coeff;
    std::vector<Index> chosen =
        select_indices(std::span<const double>(u.data(), static_cast<std::size_t>(n)),
                       est.subset_size, cfg.selection_mode);
    est.vertices.col(t) = column_subset_mean(a, chosen);
    est.directions.col(t) = u;
    est.index_sets.push_back(std::move(chosen));
    if (hooks.round_end) hooks.round_end(t);
  }
  est.seconds_selection = seconds_since(start);
  return est;
}

VertexEstimates learn_simplex(const SparseColMatrix& a, const LearnerConfig& cfg,
                              const LearnerHooks& hooks) {
  validate(cfg, a.rows(), a.cols());
  const auto start = Clock::now();
  RankKFactors factors;
  bool flag = false;
  if (cfg.baseline == LowRankRoute::sketch) {
    const Index c = cfg.sketch_cols ? cfg.sketch_cols : default_sketch_cols(cfg.k);
    factors = mixed_lra(a, cfg.k, c, cfg.seed);
    flag = factors.rank_deficient;
  } else {
    const int iters =
        cfg.power_iterations ? cfg.power_iterations : default_power_iterations(a.rows());
    PowerIterationResult p = subspace_power(a, cfg.k, iters, cfg.seed);
    factors.k = cfg.k;
    factors.Y = std::move(p.Q);
    factors.Z = transpose_apply(a, factors.Y);
    factors.sketch_rank = cfg.k;
    flag = p.rank_flag;
  }
  const double low_rank_seconds = seconds_since(start);
  VertexEstimates est = learn_from_factors(a, factors, cfg, hooks);
  est.low_rank_flag = est.low_rank_flag || flag;
  est.seconds_low_rank = low_rank_seconds;
  return est;
}

void write_vertex_estimates(std::ostream& out, const VertexEstimates& est) {
  out << est.k() << ' ' << est.dim() << ' ' << est.subset_size << '\n';
  for (const auto& set : est.index_sets) {
    for (std::size_t i = 0; i < set.size(); ++i) out << (i ? " " : "") << set[i];
    out << '\n';
  }
  for (Index t = 0; t < est.k(); ++t) {
    for (Index i = 0; i < est.dim(); ++i) out << (i ? " " : "") << format_double(est.vertices(i, t));
    out << '\n';
  }
}

VertexEstimates read_vertex_estimates(std::istream& in) {
  std::string line;
  auto next = [&](const char* what) {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return;
    }
    throw ParseError(std::string("vertex estimates: missing ") + what);
  };
  next("header");
  Index k = 0;
  Index d = 0;
  Index s = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> k >> d >> s) || k < 1 || d < 1 || s < 1)
      throw ParseError("vertex estimates: bad header '" + line + "'");
  }
  VertexEstimates est;
  est.subset_size = s;
  est.vertices.resize(d, k);
  for (Index t = 0; t < k; ++t) {
    next("index set");
    std::istringstream fields(line);
    std::vector<Index> set;
    Index j = 0;
    while (fields >> j) set.push_back(j);
    if (static_cast<Index>(set.size()) != s)
      throw ParseError("vertex estimates: index set " + std::to_string(t) + " has " +
                       std::to_string(set.size()) + " entries, expected " + std::to_string(s));
    est.index_sets.push_back(std::move(set));
  }
  for (Index t = 0; t < k; ++t) {
    next("vertex");
    std::istringstream fields(line);
    for (Index i = 0; i < d; ++i)
      if (!(fields >> est.vertices(i, t)))
        throw ParseError("vertex estimates: vertex " + std::to_string(t) + " truncated");
  }
  return est;
}

}  // namespace simplexi
