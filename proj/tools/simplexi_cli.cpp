// simplexi: generate instances, learn vertices, benchmark the low-rank phase,
// and evaluate estimates. Parameters are key=value pairs from --config plus
// --key=value flags.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simplexi/config.hpp"
#include "simplexi/edge_list.hpp"
#include "simplexi/kernels.hpp"
#include "simplexi/learner.hpp"
#include "simplexi/metrics.hpp"
#include "simplexi/models.hpp"
#include "simplexi/report.hpp"
#include "simplexi/sketch.hpp"
#include "simplexi/snapshot.hpp"

namespace fs = std::filesystem;
using namespace simplexi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

// "1..30" expands to 1,2,...,30; anything else passes through.
std::vector<std::string> expand_ranges(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(item);
      continue;
    }
    const std::int64_t lo = parse_int(item, item.substr(0, dots));
    const std::int64_t hi = parse_int(item, item.substr(dots + 2));
    if (hi < lo) throw UsageError("empty range '" + item + "'");
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
  }
  return out;
}

std::vector<std::int64_t> int_list(const RunConfig& cfg, const std::string& key) {
  std::vector<std::int64_t> out;
  for (const auto& s : expand_ranges(cfg.get_list(key))) out.push_back(parse_int(key, s));
  return out;
}

std::vector<double> number_list(const RunConfig& cfg, const std::string& key) {
  std::vector<double> out;
  for (const auto& s : cfg.get_list(key)) out.push_back(parse_number(key, s));
  return out;
}

SelectionMode parse_mode(const std::string& s) {
  if (s == "abs") return SelectionMode::abs;
  if (s == "two_sided") return SelectionMode::two_sided;
  throw UsageError("mode must be abs or two_sided, got '" + s + "'");
}

LowRankRoute parse_route(const std::string& s) {
  if (s == "sketch") return LowRankRoute::sketch;
  if (s == "power_iteration") return LowRankRoute::power_iteration;
  throw UsageError("baseline must be sketch or power_iteration, got '" + s + "'");
}

void apply_isa(const RunConfig& cfg) {
  const std::string isa = cfg.get("isa", "auto");
  if (isa == "auto") return;
  if (isa == "scalar") {
    kernels::set_active_isa(kernels::Isa::scalar);
  } else if (isa == "avx2") {
    if (!kernels::isa_available(kernels::Isa::avx2)) throw UsageError("isa=avx2 is not available on this CPU");
    kernels::set_active_isa(kernels::Isa::avx2);
  } else {
    throw UsageError("isa must be auto, scalar or avx2");
  }
}

SigmaOptions sigma_options(const RunConfig& cfg) {
  SigmaOptions o;
  o.measure = cfg.get_bool("measure_sigma", true);
  o.tol = cfg.get_double("sigma_tol", o.tol);
  o.max_iter = static_cast<int>(cfg.get_int("sigma_max_iter", o.max_iter));
  return o;
}

// Matrix input for learn / eval sweeps: an instance directory, a directory
// holding only A.txt, a matrix snapshot, or an edge list (format=edges).
struct Input {
  std::optional<SimplexInstance> instance;
  SparseColMatrix a;
};

Input load_input(const RunConfig& cfg, const std::string& key) {
  const fs::path path = cfg.require(key);
  if (!fs::exists(path)) throw UsageError(key + ": no such file or directory: " + path.string());
  Input in;
  if (fs::is_directory(path)) {
    if (fs::exists(path / "M.txt")) {
      in.instance = load_instance(path);
      in.a = in.instance->A;
    } else {
      in.a = load_matrix_snapshot(path / "A.txt");
    }
  } else if (cfg.get("format", "snapshot") == "edges") {
    std::ifstream f(path);
    in.a = parse_edge_list(f, SquareMode{}).adjacency;
  } else {
    in.a = load_matrix_snapshot(path);
  }
  return in;
}

// ---------------------------------------------------------------- gen

int cmd_gen(RunConfig& cfg) {
  const std::string model = cfg.require("model");
  KeyValues record;
  const auto t0 = Clock::now();
  if (model == "raw") {
    const Index d = cfg.require_int("d");
    const Index n = cfg.require_int("n");
    const double p = cfg.require_double("p");
    const SparseColMatrix a = gen_bernoulli(d, n, p, cfg.seed);
    fs::create_directories(cfg.out_dir);
    save_matrix_snapshot(cfg.out_dir / "A.txt", a);
    record["nnz"] = std::to_string(a.nnz());
  } else {
    SimplexInstance inst;
    if (model == "lda") {
      LdaParams p;
      p.d = cfg.require_int("d");
      p.n = cfg.require_int("n");
      p.k = cfg.require_int("k");
      p.words = cfg.require_int("m");
      p.concentration = cfg.get_double("concentration", p.concentration);
      p.topic_concentration = cfg.get_double("topic_concentration", p.topic_concentration);
      p.delta = cfg.get_double("delta", p.delta);
      p.seed = cfg.seed;
      p.sigma = sigma_options(cfg);
      inst = gen_lda(p);
    } else if (model == "mmsb") {
      MmsbParams p;
      p.n = cfg.require_int("n");
      p.d = cfg.require_int("d");
      p.k = cfg.require_int("k");
      p.p = cfg.get_double("p", p.p);
      p.q = cfg.get_double("q", p.q);
      p.pure = cfg.get_bool("pure", p.pure);
      p.concentration = cfg.get_double("concentration", p.concentration);
      p.delta = cfg.get_double("delta", p.delta);
      p.seed = cfg.seed;
      p.sigma = sigma_options(cfg);
      inst = gen_mmsb(p);
    } else if (model == "clustering") {
      ClusterParams p;
      p.d = cfg.require_int("d");
      p.n = cfg.require_int("n");
      p.k = cfg.require_int("k");
      p.sigma_target = cfg.require_double("sigma");
      p.delta = cfg.get_double("delta", p.delta);
      p.adversary_fraction = cfg.get_double("adversary_fraction", p.adversary_fraction);
      p.mean_scale = cfg.get_double("mean_scale", p.mean_scale);
      p.separation = cfg.get_double("separation", p.separation);
      p.to_centroid = cfg.get_bool("to_centroid", p.to_centroid);
      p.seed = cfg.seed;
      p.sigma = sigma_options(cfg);
      inst = gen_clusters_adversarial(p);
    } else {
      throw UsageError("model must be lda, mmsb, clustering or raw, got '" + model + "'");
    }
    save_instance(cfg.out_dir, inst);
    record["nnz"] = std::to_string(inst.A.nnz());
    record["sigma"] = fmt(inst.sigma);
  }
  record["seconds_generate"] = fmt(seconds_since(t0));
  write_manifest(cfg, record);
  return kExitOk;
}

// ---------------------------------------------------------------- learn

LearnerConfig learner_config(const RunConfig& cfg, Index k, double delta) {
  LearnerConfig lc;
  lc.k = k;
  lc.delta = delta;
  lc.sketch_cols = cfg.get_int("sketch_cols", 0);
  lc.seed = cfg.seed;
  lc.selection_mode = parse_mode(cfg.get("mode", "two_sided"));
  lc.baseline = parse_route(cfg.get("baseline", "sketch"));
  return lc;
}

int power_iterations_for(const RunConfig& cfg, Index d) {
  const auto explicit_t = cfg.get_int("power_iterations", 0);
  if (explicit_t > 0) return static_cast<int>(explicit_t);
  return default_power_iterations(d, static_cast<int>(cfg.get_int("c_pm", 3)));
}

int cmd_learn(RunConfig& cfg) {
  const Input in = load_input(cfg, "input");
  const Index k = cfg.require_int("k");
  const double delta =
      cfg.get_double("delta", in.instance && in.instance->delta > 0 ? in.instance->delta : 0.1);
  LearnerConfig lc = learner_config(cfg, k, delta);
  lc.power_iterations = power_iterations_for(cfg, in.a.rows());

  const VertexEstimates est = learn_simplex(in.a, lc);
  fs::create_directories(cfg.out_dir);
  {
    std::ostringstream s;
    write_vertex_estimates(s, est);
    save_text(cfg.out_dir / "estimates.txt", s.str());
  }

  KeyValues record{{"seconds_low_rank", fmt(est.seconds_low_rank)},
                   {"seconds_selection", fmt(est.seconds_selection)},
                   {"low_rank_flag", est.low_rank_flag ? "true" : "false"},
                   {"direction_redraws", std::to_string(est.direction_redraws)},
                   {"subset_size", std::to_string(est.subset_size)}};

  if (in.instance && in.instance->k() == k) {
    const SimplexInstance& inst = *in.instance;
    const double alpha = compute_alpha(inst.M);
    const MatchResult m = match_vertices(est, inst.M, inst.sigma, alpha, delta);
    CsvTable t{{"estimate", "matched_vertex", "error", "bound", "within_bound"}, {}};
    for (Index i = 0; i < k; ++i)
      t.rows.push_back({std::to_string(i), std::to_string(m.permutation[i]), fmt(m.per_vertex_error(i)),
                        fmt(m.bound), m.per_vertex_error(i) <= m.bound ? "true" : "false"});
    save_csv(cfg.out_dir / "match.csv", t);
    record["max_error"] = fmt(m.max_error);
    record["within_bound"] = m.within_bound ? "true" : "false";
  }
  write_manifest(cfg, record);
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct Cell {
  std::string summary;
  Index k = 0;
  double p = 0.0;  // 0 for file input
  std::function<SparseColMatrix(std::uint64_t)> make;
};

struct CellResult {
  BenchRecord rec;
  Index k = 0;
  double p = 0.0;
  Index d = 0, n = 0, nnz = 0;
};

CellResult run_cell(const Cell& cell, const RunConfig& cfg, std::size_t index, Index repeats,
                    bool with_loss) {
  CellResult out;
  out.k = cell.k;
  out.p = cell.p;
  out.rec.config = cell.summary;
  out.rec.seed = mix_seed(cfg.seed, index);
  const Index sample_cap = cfg.get_int("loss_sample", 200);
  const int loss_iters = static_cast<int>(cfg.get_int("loss_iters", 200));
  const double delta_default = cfg.get_double("delta", 0.1);
  try {
    double ts = 0, tt = 0, ls = 0, lt = 0;
    for (Index r = 0; r < repeats; ++r) {
      const std::uint64_t seed = mix_seed(out.rec.seed, static_cast<std::uint64_t>(r));
      const SparseColMatrix a = cell.make(seed);
      out.d = a.rows();
      out.n = a.cols();
      out.nnz = a.nnz();
      if (cell.k > std::min(a.rows(), a.cols()))
        throw ParameterError("k exceeds min(d, n)");

      auto t0 = Clock::now();
      const RankKFactors sk = mixed_lra(a, cell.k, default_sketch_cols(cell.k), seed);
      ts += seconds_since(t0);

      t0 = Clock::now();
      PowerIterationResult pw =
          subspace_power(a, cell.k, power_iterations_for(cfg, a.rows()), seed);
      tt += seconds_since(t0);

      if (with_loss && sk.Y.cols() > 0) {
        LearnerConfig lc;
        lc.k = cell.k;
        lc.delta = delta_default;
        lc.seed = seed;
        RankKFactors pf;
        pf.k = cell.k;
        pf.Y = std::move(pw.Q);
        pf.Z = transpose_apply(a, pf.Y);
        const Index sample = std::min(a.cols(), sample_cap);
        ls += ls_loss(a, learn_from_factors(a, sk, lc).vertices, sample, loss_iters, seed);
        lt += ls_loss(a, learn_from_factors(a, pf, lc).vertices, sample, loss_iters, seed);
      }
    }
    const double inv = 1.0 / static_cast<double>(repeats);
    out.rec.wall_time_sketch = ts * inv;
    out.rec.wall_time_topk = tt * inv;
    out.rec.loss_sketch = with_loss ? ls * inv : NAN;
    out.rec.loss_topk = with_loss ? lt * inv : NAN;
  } catch (const Error& e) {
    out.rec.error = e.what();
  }
  return out;
}

int cmd_bench(RunConfig& cfg) {
  const auto ks = int_list(cfg, "ks");
  if (ks.empty()) throw UsageError("bench: empty grid (ks is required)");
  const Index repeats = cfg.get_int("repeats", 5);
  if (repeats < 1) throw UsageError("bench: repeats must be at least 1");
  const bool parallel = cfg.get_bool("parallel", false);
  const bool with_loss = cfg.get_bool("loss", true);

  std::vector<Cell> cells;
  if (cfg.has("edges")) {
    const fs::path path = cfg.require("edges");
    std::ifstream f(path);
    if (!f) throw UsageError("bench: cannot read edge list " + path.string());
    auto graph = std::make_shared<EdgeListGraph>(parse_edge_list(f, SquareMode{}));
    const std::string name = path.stem().string();
    for (auto k : ks)
      cells.push_back({name + " k=" + std::to_string(k), k, 0.0,
                       [graph](std::uint64_t) { return graph->adjacency; }});
  } else {
    const auto ps = number_list(cfg, "ps");
    if (ps.empty()) throw UsageError("bench: empty grid (ps is required without edges)");
    const Index d = cfg.get_int("d", 500);
    const Index n = cfg.get_int("n", 5000);
    const auto p_text = cfg.get_list("ps");
    for (auto k : ks)
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const double p = ps[i];
        cells.push_back({"k=" + std::to_string(k) + " p=" + p_text[i] + " d=" + std::to_string(d) +
                             " n=" + std::to_string(n),
                         k, p, [d, n, p](std::uint64_t s) { return gen_bernoulli(d, n, p, s); }});
      }
  }

  apply_isa(cfg);
  std::vector<CellResult> results(cells.size());
  if (parallel) {
    std::vector<std::future<CellResult>> futs;
    for (std::size_t i = 0; i < cells.size(); ++i)
      futs.push_back(std::async(std::launch::async, run_cell, std::cref(cells[i]), std::cref(cfg), i,
                                repeats, with_loss));
    for (std::size_t i = 0; i < cells.size(); ++i) results[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i)
      results[i] = run_cell(cells[i], cfg, i, repeats, with_loss);
  }

  // Timing columns are dropped in parallel mode: concurrent cells distort them.
  CsvTable t;
  t.header = {"config", "k", "p", "d", "n", "nnz", "repeats", "seed"};
  if (!parallel) t.header.insert(t.header.end(), {"wall_time_sketch", "wall_time_topk", "speedup"});
  t.header.insert(t.header.end(), {"loss_sketch", "loss_topk", "error"});
  auto opt = [](double v) { return std::isnan(v) ? std::string() : fmt(v); };
  for (const auto& r : results) {
    std::vector<std::string> row{r.rec.config,       std::to_string(r.k), fmt(r.p),
                                 std::to_string(r.d), std::to_string(r.n), std::to_string(r.nnz),
                                 std::to_string(repeats), std::to_string(r.rec.seed)};
    const bool ok = r.rec.error.empty();
    if (!parallel) {
      row.push_back(ok ? fmt(r.rec.wall_time_sketch) : "");
      row.push_back(ok ? fmt(r.rec.wall_time_topk) : "");
      row.push_back(ok && r.rec.wall_time_sketch > 0 ? fmt(r.rec.wall_time_topk / r.rec.wall_time_sketch)
                       : "");
    }
    row.push_back(ok ? opt(r.rec.loss_sketch) : "");
    row.push_back(ok ? opt(r.rec.loss_topk) : "");
    row.push_back(r.rec.error);
    t.rows.push_back(std::move(row));
  }
  save_csv(cfg.out_dir / "bench.csv", t);

  // One chart per grid cell plus an overview across cells.
  const std::string metric = parallel ? "loss" : "wall time (s)";
  BarChart overview{parallel ? "Mean least-squares loss per cell" : "Mean low-rank phase time per cell",
                    metric, {}, {{"input sparsity", {}}, {"top-k subspace", {}}}, !parallel};
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.rec.error.empty()) {
      ++failed;
      continue;
    }
    const double a = parallel ? r.rec.loss_sketch : r.rec.wall_time_sketch;
    const double b = parallel ? r.rec.loss_topk : r.rec.wall_time_topk;
    overview.categories.push_back(r.rec.config);
    overview.series[0].values.push_back(a);
    overview.series[1].values.push_back(b);
    BarChart one{r.rec.config, metric, {r.rec.config}, {{"input sparsity", {a}}, {"top-k subspace", {b}}},
                 false};
    save_text(cfg.out_dir / ("cell_" + slugify(r.rec.config) + ".svg"), render_bar_chart(one));
  }
  save_text(cfg.out_dir / "overview.svg", render_bar_chart(overview));
  write_manifest(cfg, {{"cells", std::to_string(results.size())}, {"failed_cells", std::to_string(failed)}});
  return kExitOk;
}

// ---------------------------------------------------------------- eval

int eval_sweep(RunConfig& cfg, const std::string& axis) {
  const Input in = load_input(cfg, "input");
  const SparseColMatrix& a = in.a;
  const Index n = a.cols();
  const Index sample = std::min(n, cfg.get_int("loss_sample", 500));
  const int iters = static_cast<int>(cfg.get_int("loss_iters", 200));

  std::vector<std::int64_t> ks, dns;
  if (axis == "k") {
    ks = int_list(cfg, "ks");
    if (ks.empty()) throw UsageError("eval: sweep=k needs ks");
    dns.assign(ks.size(), cfg.get_int("dn", 10));
  } else if (axis == "dn") {
    dns = int_list(cfg, "dns");
    if (dns.empty()) throw UsageError("eval: sweep=dn needs dns");
    ks.assign(dns.size(), cfg.require_int("k"));
  } else {
    throw UsageError("sweep must be k or dn, got '" + axis + "'");
  }

  CsvTable t{{"k", "dn", "loss_sketch", "loss_power", "error"}, {}};
  LineChart chart{axis == "k" ? "Least-squares loss vs k" : "Least-squares loss vs delta n",
                  axis == "k" ? "k" : "delta n", "loss", {}, {{"input sparsity", {}}, {"power iteration", {}}}};
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const Index k = ks[i];
    const Index dn = dns[i];
    std::vector<std::string> row{std::to_string(k), std::to_string(dn)};
    try {
      if (dn < 1 || dn > n) throw ParameterError("dn outside [1, n]");
      LearnerConfig lc = learner_config(cfg, k, static_cast<double>(dn) / static_cast<double>(n));
      // floor(delta n) must come back as dn exactly.
      lc.delta = (static_cast<double>(dn) + 0.5) / static_cast<double>(n);
      lc.baseline = LowRankRoute::sketch;
      const auto vs = learn_simplex(a, lc).vertices;
      lc.baseline = LowRankRoute::power_iteration;
      lc.power_iterations = power_iterations_for(cfg, a.rows());
      const auto vp = learn_simplex(a, lc).vertices;
      const double ls = ls_loss(a, vs, sample, iters, cfg.seed);
      const double lp = ls_loss(a, vp, sample, iters, cfg.seed);
      row.insert(row.end(), {fmt(ls), fmt(lp), ""});
      chart.x.push_back(static_cast<double>(axis == "k" ? k : dn));
      chart.series[0].values.push_back(ls);
      chart.series[1].values.push_back(lp);
    } catch (const Error& e) {
      row.insert(row.end(), {"", "", e.what()});
    }
    t.rows.push_back(std::move(row));
  }
  const std::string stem = axis == "k" ? "loss_vs_k" : "loss_vs_dn";
  save_csv(cfg.out_dir / (stem + ".csv"), t);
  save_text(cfg.out_dir / (stem + ".svg"), render_line_chart(chart));
  write_manifest(cfg, {{"rows", std::to_string(t.rows.size())}});
  return kExitOk;
}

int cmd_eval(RunConfig& cfg) {
  if (cfg.has("sweep")) return eval_sweep(cfg, cfg.get("sweep", ""));

  const fs::path inst_dir = cfg.require("instance");
  const fs::path est_path = cfg.require("estimates");
  if (!fs::is_directory(inst_dir)) throw UsageError("eval: no instance directory " + inst_dir.string());
  std::ifstream est_in(est_path);
  if (!est_in) throw UsageError("eval: cannot read estimates file " + est_path.string());
  const SimplexInstance inst = load_instance(inst_dir);
  const VertexEstimates est = read_vertex_estimates(est_in);
  if (est.dim() != inst.d() || est.k() != inst.k())
    throw DimensionError("eval: estimates are " + std::to_string(est.dim()) + "x" + std::to_string(est.k()) +
                         ", instance vertices are " + std::to_string(inst.d()) + "x" +
                         std::to_string(inst.k()));

  const double delta = cfg.get_double("delta", inst.delta);
  const double alpha = compute_alpha(inst.M);
  const MatchResult m = match_vertices(est, inst.M, inst.sigma, alpha, delta);
  const Index sample = std::min(inst.n(), cfg.get_int("loss_sample", 500));
  const int iters = static_cast<int>(cfg.get_int("loss_iters", 200));

  CsvTable t{{"metric", "value"}, {}};
  auto add = [&](const std::string& k, const std::string& v) { t.rows.push_back({k, v}); };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  add("max_error", fmt(m.max_error));
  add("total_error", fmt(m.total_cost));
  add("bound", fmt(m.bound));
  add("within_bound", flag(m.within_bound));
  add("sigma", fmt(inst.sigma));
  add("alpha", fmt(alpha));
  add("delta", fmt(delta));
  add("ls_loss", fmt(ls_loss(inst.A, est.vertices, sample, iters, cfg.seed)));
  add("ls_loss_span", fmt(ls_loss(inst.A, est.vertices, sample, iters, cfg.seed, LossMode::span)));
  if (std::min(inst.d(), inst.n()) <= kDenseOracleLimit) {
    const ReductionResult r = reduction_check(inst.A, est.vertices, inst.k());
    add("reduction_residual", fmt(r.spectral_residual_sq));
    add("reduction_bound", fmt(r.lra_bound));
    add("reduction_passes", flag(r.passes));
  }
  AssumptionOptions ao;
  ao.c = cfg.get_double("c", ao.c);
  const AssumptionReport rep = check_assumptions(inst, ao);
  add("well_separated", flag(rep.well_separated_ok));
  add("proximate", flag(rep.proximate_ok));
  add("proximity_radius", fmt(rep.proximity_radius_used));
  add("spectral_lhs", fmt(rep.spectral_lhs));
  add("spectral_rhs", fmt(rep.spectral_rhs));
  add("spectrally_bounded", flag(rep.spectral_ok));
  if (rep.significant_checked) {
    add("tail_ratio", fmt(rep.tail_ratio));
    add("significant_singular_values", flag(rep.significant_ok));
  }
  save_csv(cfg.out_dir / "eval.csv", t);
  write_manifest(cfg, {{"rows", std::to_string(t.rows.size())}});
  return kExitOk;
}

int dispatch(const std::string& command, const std::optional<fs::path>& config_file,
             const std::vector<std::string>& extras) {
  std::optional<std::string> env_seed;
  if (const char* s = std::getenv("SIMPLEXI_SEED")) env_seed = s;
  RunConfig cfg = resolve_config(command, config_file, extras, env_seed);
  apply_isa(cfg);
  if (command == "gen") return cmd_gen(cfg);
  if (command == "learn") return cmd_learn(cfg);
  if (command == "bench") return cmd_bench(cfg);
  return cmd_eval(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent simplex learning in input-sparsity time"};
  app.require_subcommand(1);
  std::optional<std::string> config_file;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"gen", "Generate an instance (model=lda|mmsb|clustering|raw)"},
      {"learn", "Learn k vertices from input=<instance dir | matrix file>"},
      {"bench", "Time the sketch phase against subspace power iteration over a grid"},
      {"eval", "Evaluate estimates against an instance, or sweep=k|dn loss curves"},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->allow_extras();
    sub->add_option("--config", config_file, "key=value config file");
    sub->footer("Every parameter is given as --key=value and may also come from --config.");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const auto* chosen = app.get_subcommands().front();
  std::optional<fs::path> cfg_path;
  if (config_file) cfg_path = *config_file;
  try {
    return dispatch(chosen->get_name(), cfg_path, chosen->remaining());
  } catch (const NumericalError& e) {
    std::cerr << "simplexi " << chosen->get_name() << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "simplexi " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "simplexi " << chosen->get_name() << ": " << e.what() << '\n';
    return kExitNumerical;
  }
}
