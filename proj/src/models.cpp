#include "simplexi/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "simplexi/learner.hpp"
#include "simplexi/sketch.hpp"
#include "simplexi/snapshot.hpp"
#include "simplexi/subspace.hpp"

namespace simplexi {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

// Multinomial(m, p) / m via sequential conditional binomials.
void sample_document(const Eigen::Ref<const Vector>& p, std::int64_t m, Rng& rng,
                     std::vector<Triplet>& out, Index col) {
  std::int64_t remaining = m;
  double mass = 1.0;
  const Index d = p.size();
  for (Index i = 0; i < d && remaining > 0; ++i) {
    std::int64_t count = 0;
    if (i == d - 1 || mass <= 0.0) {
      count = remaining;
    } else {
      const double pi = std::clamp(p(i) / mass, 0.0, 1.0);
      if (pi >= 1.0) {
        count = remaining;
      } else if (pi > 0.0) {
        std::binomial_distribution<std::int64_t> binom(remaining, pi);
        count = binom(rng);
      }
    }
    if (count > 0) out.push_back({i, col, static_cast<double>(count) / static_cast<double>(m)});
    remaining -= count;
    mass -= p(i);
  }
}

// Largest singular value through the smaller Gram matrix. Power iteration
// stalls on the clustered top of a noise spectrum; this does not.
constexpr Index kGramSigmaLimit = 1000;

double gram_spectral_norm(const DenseMatrix& x) {
  const DenseMatrix g = x.rows() <= x.cols() ? DenseMatrix(x * x.transpose()) : DenseMatrix(x.transpose() * x);
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues()(g.rows() - 1), 0.0));
}

void finish_sigma(SimplexInstance& inst, const SigmaOptions& opts) {
  inst.sigma = opts.measure ? compute_sigma(inst.A, inst.P, opts) : 0.0;
}

}  // namespace

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::lda:
      return "lda";
    case ModelTag::mmsb:
      return "mmsb";
    case ModelTag::clustering:
      return "clustering";
    case ModelTag::raw:
      return "raw";
  }
  return "raw";
}

ModelTag parse_model_tag(const std::string& name) {
  if (name == "lda") return ModelTag::lda;
  if (name == "mmsb") return ModelTag::mmsb;
  if (name == "clustering") return ModelTag::clustering;
  if (name == "raw") return ModelTag::raw;
  throw ParameterError("unknown model '" + name + "'");
}

Vector sample_dirichlet(Index dim, double alpha, Rng& rng) {
  require(dim >= 1 && alpha > 0.0, "dirichlet: need dim >= 1 and alpha > 0");
  // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space so tiny alpha never
  // underflows every component to zero.
  std::gamma_distribution<double> gamma(alpha + 1.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector logs(dim);
  for (Index i = 0; i < dim; ++i) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    double g = gamma(rng);
    while (g <= 0.0) g = gamma(rng);
    logs(i) = std::log(g) + std::log(u) / alpha;
  }
  const double top = logs.maxCoeff();
  Vector w = (logs.array() - top).exp();
  return w / w.sum();
}

SimplexInstance gen_lda(const LdaParams& prm) {
  require(prm.d >= 1 && prm.n >= 1 && prm.k >= 1, "gen_lda: d, n, k must be positive");
  require(prm.words >= 1, "gen_lda: words per document must be at least 1");
  const double conc = prm.concentration > 0.0 ? prm.concentration : 1.0 / static_cast<double>(prm.k);
  require(prm.topic_concentration > 0.0, "gen_lda: topic concentration must be positive");
  require(prm.delta > 0.0 && prm.delta <= 1.0, "gen_lda: delta must lie in (0, 1]");

  Rng rng = make_rng(prm.seed, 0x1DA);
  SimplexInstance inst;
  inst.model = ModelTag::lda;
  inst.seed = prm.seed;
  inst.delta = prm.delta;
  inst.M.resize(prm.d, prm.k);
  for (Index l = 0; l < prm.k; ++l) inst.M.col(l) = sample_dirichlet(prm.d, prm.topic_concentration, rng);
  inst.W.resize(prm.k, prm.n);
  for (Index j = 0; j < prm.n; ++j) inst.W.col(j) = sample_dirichlet(prm.k, conc, rng);
  inst.P = inst.M * inst.W;

  std::vector<Triplet> triplets;
  for (Index j = 0; j < prm.n; ++j) {
    Vector pj = inst.P.col(j);
    pj /= pj.sum();
    sample_document(pj, prm.words, rng, triplets, j);
  }
  inst.A = build_csc(triplets, prm.d, prm.n);
  finish_sigma(inst, prm.sigma);
  return inst;
}

SimplexInstance gen_mmsb(const MmsbParams& prm) {
  require(prm.n >= 1 && prm.d >= 1 && prm.k >= 1, "gen_mmsb: n, d, k must be positive");
  require(prm.q >= 0.0 && prm.q <= prm.p && prm.p > 0.0 && prm.p <= 1.0, "gen_mmsb: need 0 <= q <= p <= 1, p > 0");
  const double conc = prm.concentration > 0.0 ? prm.concentration : 1.0 / static_cast<double>(prm.k);

  Rng rng = make_rng(prm.seed, 0x3B3);
  DenseMatrix b = DenseMatrix::Constant(prm.k, prm.k, prm.q);
  b.diagonal().array() = prm.p;

  auto memberships = [&](Index count) {
    DenseMatrix w = DenseMatrix::Zero(prm.k, count);
    for (Index j = 0; j < count; ++j) {
      if (prm.pure)
        w(j * prm.k / count, j) = 1.0;
      else
        w.col(j) = sample_dirichlet(prm.k, conc, rng);
    }
    return w;
  };
  const DenseMatrix w_rows = memberships(prm.d);

  SimplexInstance inst;
  inst.model = ModelTag::mmsb;
  inst.seed = prm.seed;
  inst.delta = prm.delta > 0.0 ? prm.delta : (prm.pure ? 1.0 / static_cast<double>(prm.k) : 0.1);
  inst.W = memberships(prm.n);
  inst.M = w_rows.transpose() * b;
  inst.P = inst.M * inst.W;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Index> ptr(static_cast<std::size_t>(prm.n + 1), 0);
  std::vector<Index> idx;
  std::vector<double> vals;
  for (Index j = 0; j < prm.n; ++j) {
    for (Index i = 0; i < prm.d; ++i) {
      if (unif(rng) < inst.P(i, j)) {
        idx.push_back(i);
        vals.push_back(1.0);
      }
    }
    ptr[j + 1] = static_cast<Index>(vals.size());
  }
  inst.A = SparseColMatrix::from_csc(prm.d, prm.n, std::move(ptr), std::move(idx), std::move(vals));
  finish_sigma(inst, prm.sigma);
  return inst;
}

SimplexInstance gen_clusters_adversarial(const ClusterParams& prm) {
  require(prm.d >= 1 && prm.n >= 1 && prm.k >= 1, "clusters: d, n, k must be positive");
  require(prm.delta > 0.0 && prm.delta < 1.0, "clusters: delta must lie in (0, 1)");
  require(prm.adversary_fraction >= 0.0 && prm.adversary_fraction <= 1.0 - prm.delta,
          "clusters: adversary_fraction must lie in [0, 1 - delta]");
  require(prm.sigma_target >= 0.0, "clusters: sigma_target must be nonnegative");
  require(prm.mean_scale > 0.0, "clusters: mean_scale must be positive");

  Rng rng = make_rng(prm.seed, 0xC1);
  const Index k = prm.k;
  const Index n = prm.n;
  const Index d = prm.d;

  SimplexInstance inst;
  inst.model = ModelTag::clustering;
  inst.seed = prm.seed;
  inst.delta = prm.delta;
  inst.M = gaussian_matrix(d, k, rng);
  for (Index l = 0; l < k; ++l) inst.M.col(l) *= prm.mean_scale / inst.M.col(l).norm();

  const double required =
      prm.separation * static_cast<double>(k) * prm.sigma_target / std::sqrt(prm.delta);
  for (Index l = 0; l < k; ++l)
    for (Index m = l + 1; m < k; ++m)
      if ((inst.M.col(l) - inst.M.col(m)).norm() < required)
        throw ParameterError("clusters: infeasible separation; means " + std::to_string(l) + " and " +
                             std::to_string(m) + " closer than " + std::to_string(required));

  const Index protect_min = subset_size(prm.delta, n);
  inst.W = DenseMatrix::Zero(k, n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double radius =
      prm.sigma_target > 0.0 ? 4.0 * (1.0 - 1e-3) * prm.sigma_target / std::sqrt(prm.delta) : 0.0;

  // Random point in the hull of the other means, as mixing weights over all k.
  auto other_hull_weights = [&](Index l) {
    Vector w = Vector::Zero(k);
    if (prm.to_centroid) {
      w.setConstant(1.0 / static_cast<double>(k));
      return w;
    }
    const Vector others = sample_dirichlet(k - 1, 1.0, rng);
    for (Index m = 0, o = 0; m < k; ++m)
      if (m != l) w(m) = others(o++);
    return w;
  };

  Index begin = 0;
  for (Index l = 0; l < k; ++l) {
    const Index size = n / k + (l < n % k ? 1 : 0);
    if (protect_min > size)
      throw ParameterError("clusters: cluster " + std::to_string(l) + " has " + std::to_string(size) +
                           " points, fewer than floor(delta n) = " + std::to_string(protect_min));
    const auto moved_target = static_cast<Index>(std::llround(prm.adversary_fraction * size));
    const Index moved = k > 1 ? std::min(moved_target, size - protect_min) : 0;
    const Index protect = size - moved;
    for (Index j = begin; j < begin + size; ++j) {
      Vector e = Vector::Zero(k);
      e(l) = 1.0;
      if (k == 1) {
        inst.W.col(j) = e;
        continue;
      }
      const Vector target = other_hull_weights(l);
      if (j - begin < protect) {
        // Bounded perturbation toward the hull, staying on the segment.
        const double dist = (inst.M * (target - e)).norm();
        const double rho = dist > 0.0 ? unif(rng) * std::min(radius, dist) / dist : 0.0;
        inst.W.col(j) = (1.0 - rho) * e + rho * target;
      } else {
        const double lambda = 1.0 - unif(rng);  // (0, 1]
        inst.W.col(j) = (1.0 - lambda) * e + lambda * target;
      }
    }
    begin += size;
  }
  inst.P = inst.M * inst.W;

  DenseMatrix a = inst.P;
  if (prm.sigma_target > 0.0) {
    const double rn = std::sqrt(static_cast<double>(n));
    DenseMatrix noise = gaussian_matrix(d, n, rng);
    // Scaled so the measured sigma lands just under the target; the protected
    // perturbation radius above assumes sigma close to the target.
    const double measured = (std::min(d, n) <= kGramSigmaLimit ? gram_spectral_norm(noise)
                                                               : spectral_norm_est(noise, 1e-10, 20000, prm.seed).value) /
                            rn;
    if (measured > 0.0) noise *= (prm.sigma_target / measured) * (1.0 - 1e-6);
    a += noise;
  }
  inst.A = sparse_from_dense(a);
  finish_sigma(inst, prm.sigma);
  return inst;
}

SparseColMatrix gen_bernoulli(Index d, Index n, double p, std::uint64_t seed) {
  require(d >= 0 && n >= 0, "gen_bernoulli: negative dimension");
  require(p >= 0.0 && p <= 1.0, "gen_bernoulli: p must lie in [0, 1]");
  Rng rng = make_rng(seed, 0xBE);
  std::vector<Index> ptr(static_cast<std::size_t>(n + 1), 0);
  std::vector<Index> idx;
  std::vector<double> vals;
  idx.reserve(static_cast<std::size_t>(p * static_cast<double>(d) * static_cast<double>(n) * 1.1) + 16);
  if (p > 0.0 && p < 1.0) {
    // Geometric skips between successes over the column-major cell sequence.
    std::geometric_distribution<std::int64_t> gap(p);
    const std::int64_t total = d * n;
    std::int64_t cell = gap(rng);
    while (cell < total) {
      idx.push_back(cell % d);
      ptr[cell / d + 1]++;
      cell += 1 + gap(rng);
    }
  } else if (p == 1.0) {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < d; ++i) {
        idx.push_back(i);
        ptr[j + 1]++;
      }
  }
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  vals.assign(idx.size(), 1.0);
  return SparseColMatrix::from_csc(d, n, std::move(ptr), std::move(idx), std::move(vals));
}

double compute_alpha(const DenseMatrix& m) {
  const Index k = m.cols();
  require(k >= 2, "compute_alpha: need at least two vertices");
  const double max_norm = m.colwise().norm().maxCoeff();
  if (max_norm == 0.0) return 0.0;
  double worst = INFINITY;
  for (Index l = 0; l < k; ++l) {
    DenseMatrix others(m.rows(), k - 1);
    for (Index c = 0, o = 0; c < k; ++c)
      if (c != l) others.col(o++) = m.col(c);
    const Basis b = orthonormalize(others);
    worst = std::min(worst, project_out(m.col(l), b).norm());
  }
  return std::clamp(worst / max_norm, 0.0, 1.0);
}

double compute_sigma(const SparseColMatrix& a, const DenseMatrix& p, const SigmaOptions& opts) {
  if (a.rows() != p.rows() || a.cols() != p.cols())
    throw DimensionError("compute_sigma: A and P shapes differ");
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (std::min(a.rows(), a.cols()) <= kGramSigmaLimit)
    return gram_spectral_norm(a.to_dense() - p) / std::sqrt(static_cast<double>(a.cols()));
  LinearOperator diff{a.rows(), a.cols(),
                      [&](const Vector& x) -> Vector { return right_apply(a, x) - p * x; },
                      [&](const Vector& y) -> Vector { return left_apply(y, a) - p.transpose() * y; }};
  const NormEstimate est = spectral_norm_est(diff, opts.tol, opts.max_iter, 0x51);
  return est.value / std::sqrt(static_cast<double>(std::max<Index>(a.cols(), 1)));
}

AssumptionReport check_assumptions(const SimplexInstance& inst, const AssumptionOptions& opts) {
  const Index k = inst.k();
  const Index n = inst.n();
  if (inst.M.rows() != inst.d() || inst.P.rows() != inst.d() || inst.P.cols() != n)
    throw DimensionError("check_assumptions: instance shapes are inconsistent");
  require(k >= 2, "check_assumptions: need k >= 2");
  require(opts.c > 0.0, "check_assumptions: c must be positive");
  AssumptionReport r;

  r.alpha = compute_alpha(inst.M);
  r.well_separated_ok = r.alpha > 0.0;

  const Vector norms = inst.M.colwise().norm().transpose();
  r.proximity_mode = opts.proximity_mode;
  r.proximity_radius_used = opts.proximity_mode == ProximityMode::over_sqrt_delta
                                ? 4.0 * inst.sigma / std::sqrt(inst.delta)
                                : 4.0 * inst.sigma / inst.delta;
  r.required_count = subset_size(inst.delta, n);
  // Rounding slack so exact vertex copies count at sigma = 0.
  const double slack = 1e-12 * std::max(1.0, norms.maxCoeff());
  r.proximate_counts.assign(static_cast<std::size_t>(k), 0);
  for (Index j = 0; j < n; ++j)
    for (Index l = 0; l < k; ++l)
      if ((inst.P.col(j) - inst.M.col(l)).norm() <= r.proximity_radius_used + slack)
        ++r.proximate_counts[l];
  r.proximate_ok = std::all_of(r.proximate_counts.begin(), r.proximate_counts.end(),
                               [&](Index c) { return c >= r.required_count; });

  r.c_used = opts.c;
  r.spectral_lhs = inst.sigma / std::sqrt(inst.delta);
  r.spectral_rhs = r.alpha * r.alpha * norms.minCoeff() / (opts.c * std::pow(static_cast<double>(k), 9));
  r.spectral_ok = r.spectral_lhs <= r.spectral_rhs;

  r.phi = std::min(opts.phi_cap, static_cast<double>(inst.A.nnz()) /
                                     (static_cast<double>(n) * std::pow(static_cast<double>(k), opts.poly_exponent)));
  if (std::min(inst.d(), n) <= opts.oracle_limit) {
    const Vector s = exact_singular_values(inst.A, opts.oracle_limit);
    const TailMass tail = tail_mass(s, k);
    r.significant_checked = true;
    r.sigma_k = k - 1 < s.size() ? s(k - 1) : 0.0;
    r.sigma_k1 = k < s.size() ? s(k) : 0.0;
    // sigma_{k+1} = 0 passes vacuously.
    const double tiny = 1e-12 * (s.size() ? s(0) : 0.0);
    const bool no_tail = tail.spectral_sq <= tiny * tiny;
    r.tail_ratio = no_tail ? 0.0 : tail.frobenius_sq / tail.spectral_sq;
    r.significant_ok =
        r.sigma_k > r.phi * r.sigma_k1 && (no_tail || tail.frobenius_sq <= r.phi * tail.spectral_sq);
  }
  return r;
}

void save_instance(const std::filesystem::path& dir, const SimplexInstance& inst) {
  std::filesystem::create_directories(dir);
  save_matrix_snapshot(dir / "A.txt", inst.A);
  save_dense_block(dir / "M.txt", "M", inst.M);
  save_dense_block(dir / "P.txt", "P", inst.P);
  if (inst.W.size()) save_dense_block(dir / "W.txt", "W", inst.W);
  KeyValues meta{{"model", to_string(inst.model)},
                 {"d", std::to_string(inst.d())},
                 {"n", std::to_string(inst.n())},
                 {"k", std::to_string(inst.k())},
                 {"sigma", format_double(inst.sigma)},
                 {"delta", format_double(inst.delta)},
                 {"seed", std::to_string(inst.seed)}};
  std::ofstream out(dir / "meta.txt");
  if (!out) throw Error("cannot write " + (dir / "meta.txt").string());
  write_key_values(out, meta);
}

SimplexInstance load_instance(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "meta.txt");
  if (!meta_in) throw Error("instance directory " + dir.string() + " has no meta.txt");
  const KeyValues meta = read_key_values(meta_in);
  auto get = [&](const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) throw ParseError("meta.txt: missing key '" + key + "'");
    return it->second;
  };
  SimplexInstance inst;
  inst.model = parse_model_tag(get("model"));
  inst.sigma = std::stod(get("sigma"));
  inst.delta = std::stod(get("delta"));
  inst.seed = std::stoull(get("seed"));
  inst.A = load_matrix_snapshot(dir / "A.txt");
  inst.M = load_dense_block(dir / "M.txt", "M");
  inst.P = load_dense_block(dir / "P.txt", "P");
  if (std::filesystem::exists(dir / "W.txt")) inst.W = load_dense_block(dir / "W.txt", "W");
  if (inst.M.rows() != inst.A.rows() || inst.P.rows() != inst.A.rows() || inst.P.cols() != inst.A.cols())
    throw DimensionError("instance " + dir.string() + ": A, M, P shapes are inconsistent");
  return inst;
}

}  // namespace simplexi
