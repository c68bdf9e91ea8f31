#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "simplexi/random.hpp"
#include "simplexi/sparse_matrix.hpp"

namespace simplexi {

enum class ModelTag { lda, mmsb, clustering, raw };

std::string to_string(ModelTag tag);
ModelTag parse_model_tag(const std::string& name);

/// Ground truth plus observations for one generated latent-simplex instance.
struct SimplexInstance {
  DenseMatrix M;       // d x k vertices
  DenseMatrix P;       // d x n latent points
  SparseColMatrix A;   // d x n observations
  DenseMatrix W;       // k x n mixing weights (empty when not applicable)
  double sigma = 0.0;  // ||A - P||_2 / sqrt(n), measured
  double delta = 0.0;
  ModelTag model = ModelTag::raw;
  std::uint64_t seed = 0;

  Index k() const { return M.cols(); }
  Index d() const { return A.rows(); }
  Index n() const { return A.cols(); }
};

// Shared knobs for the sigma measurement done after generation.
struct SigmaOptions {
  bool measure = true;
  double tol = 1e-12;
  int max_iter = 20000;
};

struct LdaParams {
  Index d = 500;
  Index n = 5000;
  Index k = 5;
  std::int64_t words = 200;        // m, words per document
  double concentration = 0.0;      // document-topic Dirichlet; 0 selects 1/k
  double topic_concentration = 1.0;  // topic-word Dirichlet
  double delta = 0.1;              // recorded for downstream learners
  std::uint64_t seed = 0;
  SigmaOptions sigma;
};

struct MmsbParams {
  Index n = 4096;
  Index d = 256;
  Index k = 4;
  double p = 0.2;  // intra-community edge probability
  double q = 0.02;  // inter-community edge probability
  bool pure = false;  // equal-size blocks instead of Dirichlet memberships
  double concentration = 0.0;  // 0 selects 1/k
  double delta = 0.0;          // 0 selects 1/k for pure instances, 0.1 otherwise
  std::uint64_t seed = 0;
  SigmaOptions sigma;
};

struct ClusterParams {
  Index d = 50;
  Index n = 3000;
  Index k = 3;
  double sigma_target = 0.01;
  double delta = 0.1;
  double adversary_fraction = 0.5;
  double mean_scale = 10.0;  // norm of each cluster mean
  double separation = 1.0;   // required ||M_l - M_l'|| >= separation * k * sigma / sqrt(delta)
  bool to_centroid = false;  // adversary pushes moved points to the global centroid
  std::uint64_t seed = 0;
  SigmaOptions sigma;
};

SimplexInstance gen_lda(const LdaParams& params);
SimplexInstance gen_mmsb(const MmsbParams& params);
SimplexInstance gen_clusters_adversarial(const ClusterParams& params);
SparseColMatrix gen_bernoulli(Index d, Index n, double p, std::uint64_t seed);

/// Column-wise Dirichlet(alpha * 1) sample, robust for alpha << 1.
Vector sample_dirichlet(Index dim, double alpha, Rng& rng);

/// min over l of the residual of M_l against span(other columns), divided by
/// the largest column norm.
double compute_alpha(const DenseMatrix& m);

/// ||A - P||_2 / sqrt(n), with A - P applied as an operator.
double compute_sigma(const SparseColMatrix& a, const DenseMatrix& p, const SigmaOptions& opts = {});

enum class ProximityMode { over_delta, over_sqrt_delta };

struct AssumptionOptions {
  double c = 1.0;
  ProximityMode proximity_mode = ProximityMode::over_sqrt_delta;
  double phi_cap = 2.0;
  double poly_exponent = 3.0;  // phi <= nnz(A) / (n * k^poly_exponent)
  Index oracle_limit = 4000;
};

struct AssumptionReport {
  // Well-separateness.
  double alpha = 0.0;
  bool well_separated_ok = false;
  // Proximate latent points.
  std::vector<Index> proximate_counts;
  Index required_count = 0;
  double proximity_radius_used = 0.0;
  ProximityMode proximity_mode = ProximityMode::over_sqrt_delta;
  bool proximate_ok = false;
  // Spectrally bounded perturbation: sigma / sqrt(delta) vs alpha^2 min||M_l|| / (c k^9).
  double spectral_lhs = 0.0;
  double spectral_rhs = 0.0;
  double c_used = 1.0;
  bool spectral_ok = false;
  // Significant singular values.
  bool significant_checked = false;
  double sigma_k = 0.0;
  double sigma_k1 = 0.0;
  double tail_ratio = 0.0;  // ||A - A_k||_F^2 / ||A - A_k||_2^2
  double phi = 0.0;
  bool significant_ok = false;

  bool first_three_ok() const { return well_separated_ok && proximate_ok && spectral_ok; }
  bool all_ok() const { return first_three_ok() && significant_checked && significant_ok; }
};

AssumptionReport check_assumptions(const SimplexInstance& inst, const AssumptionOptions& opts = {});

// Directory layout: A.txt (matrix snapshot), M.txt / P.txt / W.txt (dense
// blocks), meta.txt (key=value).
void save_instance(const std::filesystem::path& dir, const SimplexInstance& inst);
SimplexInstance load_instance(const std::filesystem::path& dir);

}  // namespace simplexi
