#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "submod/bench.hpp"
#include "submod/metrics.hpp"
#include "submod/pipeline.hpp"
#include "submod/synthetic.hpp"

namespace {

using nlohmann::json;
using namespace submod;

struct SummarizeArgs {
  std::string job_file;
  std::string manifest;
  std::string function;
  double budget = 0.0;
  std::string budget_mode = "cardinality";
  double cover_tau = -1.0;
  double cover_tolerance = 1e-9;
  bool lazy = true;
  bool memoized = true;
  double alpha = 0.2;
  double lambda = 1.0;
  std::string psi = "sqrt";
  double dpp_jitter = 1e-6;
  std::string feature_modality;
  double mixture_beta = 0.0;
  std::string query;
  std::string relevance;
  double threshold = 0.5;
  std::vector<std::string> modalities;
  std::vector<double> weights;
  int sparsify_k = 0;
  std::string annotations;
  std::string out;
};

void add_summarize_flags(CLI::App* cmd, SummarizeArgs& a, bool cover_required) {
  cmd->add_option("--job", a.job_file, "job description JSON (overrides flags)");
  cmd->add_option("--manifest", a.manifest, "ground set manifest JSON");
  cmd->add_option("--function", a.function, "objective kind");
  if (!cover_required) {
    cmd->add_option("--budget", a.budget, "budget value");
    cmd->add_option("--budget-mode", a.budget_mode, "cardinality or knapsack")
        ->check(CLI::IsMember({"cardinality", "knapsack"}));
  }
  cmd->add_option("--cover-tau", a.cover_tau, "cover fraction of f(V) in (0,1]");
  cmd->add_option("--cover-tolerance", a.cover_tolerance, "cover slack");
  cmd->add_flag("--lazy,!--no-lazy", a.lazy, "lazy greedy (default on)");
  cmd->add_flag("--memoized,!--no-memoized", a.memoized,
                "memoized gains (default on)");
  cmd->add_option("--alpha", a.alpha, "saturated_coverage threshold fraction");
  cmd->add_option("--lambda", a.lambda, "graph_cut tradeoff");
  cmd->add_option("--psi", a.psi, "feature_based shape")
      ->check(CLI::IsMember({"sqrt", "log1p", "inverse", "identity"}));
  cmd->add_option("--dpp-jitter", a.dpp_jitter, "diagonal jitter for dpp_logdet");
  cmd->add_option("--feature-modality", a.feature_modality,
                  "modality for feature_based");
  cmd->add_option("--beta", a.mixture_beta, "mixture weight for importance term");
  cmd->add_option("--query", a.query, "restrict to items tagged with a concept");
  cmd->add_option("--relevance", a.relevance, "per-item relevance score file");
  cmd->add_option("--threshold", a.threshold, "relevance cutoff (default 0.5)");
  cmd->add_option("--modalities", a.modalities, "kernel modalities")
      ->delimiter(',');
  cmd->add_option("--weights", a.weights, "kernel modality weights")
      ->delimiter(',');
  cmd->add_option("--sparsify-k", a.sparsify_k, "keep k neighbours per row");
  cmd->add_option("--annotations", a.annotations, "segment annotation JSON");
  cmd->add_option("--out", a.out, "report path (default stdout)");
}

SummarizationJob job_from_args(const SummarizeArgs& a, bool cover_mode) {
  if (!a.job_file.empty()) return SummarizationJob::from_json_file(a.job_file);
  if (a.manifest.empty() || a.function.empty())
    throw CLI::RequiredError("--manifest and --function (or --job)");

  SummarizationJob job;
  job.manifest = a.manifest;
  job.function = kind_from_name(a.function);
  job.params.alpha = a.alpha;
  job.params.lambda = a.lambda;
  job.params.psi = psi_from_name(a.psi);
  job.params.dpp_jitter = a.dpp_jitter;
  job.params.feature_modality = a.feature_modality;
  job.mixture_beta = a.mixture_beta;

  if (cover_mode || a.cover_tau > 0) {
    job.mode = SummarizationJob::Mode::cover;
    if (a.cover_tau <= 0)
      throw CLI::RequiredError("--cover-tau");
    job.cover.tau = a.cover_tau;
    job.cover.tolerance = a.cover_tolerance;
  } else {
    job.mode = SummarizationJob::Mode::budget;
    if (a.budget <= 0) throw CLI::RequiredError("--budget");
    job.budget.mode = a.budget_mode == "knapsack" ? BudgetSpec::Mode::knapsack
                                                  : BudgetSpec::Mode::cardinality;
    job.budget.budget = a.budget;
  }

  if (!a.query.empty()) job.query_concept = a.query;
  if (!a.relevance.empty()) job.relevance = a.relevance;
  job.relevance_threshold = a.threshold;
  job.kernel_modalities = a.modalities;
  job.kernel_weights = a.weights;
  if (a.sparsify_k > 0) job.sparsify_k = a.sparsify_k;
  job.solve.lazy = a.lazy;
  job.solve.memoized = a.memoized;
  if (!a.annotations.empty()) job.annotations = a.annotations;
  if (!a.out.empty()) job.output = a.out;
  return job;
}

int run_summarize(const SummarizeArgs& a, bool cover_mode) {
  SummarizationJob job = job_from_args(a, cover_mode);
  JobReport report = run_job(job);
  if (!job.output) std::cout << report_to_json(report);
  return 0;
}

int run_evaluate(const std::string& summary_path, const std::string& ann_path,
                 const std::string& manifest_path,
                 const std::vector<std::string>& requested) {
  std::ifstream in(summary_path);
  if (!in) throw Error("missing file: " + summary_path);
  json report;
  try {
    in >> report;
  } catch (const json::exception& e) {
    throw Error(summary_path + ": invalid JSON (" + e.what() + ")");
  }
  std::vector<int> order = report.at("order").get<std::vector<int>>();

  std::optional<GroundSet> gs;
  if (!manifest_path.empty()) gs = load_ground_set(manifest_path);

  int ground_size = 0;
  if (gs) ground_size = gs->n;
  for (int j : order) ground_size = std::max(ground_size, j + 1);

  std::optional<SegmentAnnotation> ann;
  if (!ann_path.empty()) ann = load_annotations(ann_path, ground_size);

  // Explicit --metrics is strict; the default reports whatever applies.
  const bool strict = !requested.empty();
  std::vector<std::string> wanted =
      strict ? requested : std::vector<std::string>{"R", "C", "D", "M"};

  json out = json::object();
  out["version"] = 1;
  for (const std::string& m : wanted) {
    if (m == "R") {
      if (!ann || ann->count(SegmentKind::scene) == 0) {
        if (strict) throw Error("metric R needs scene annotations");
        continue;
      }
      out["R"] = representation_score(order, *ann);
    } else if (m == "D") {
      if (!ann || ann->count(SegmentKind::outlier) == 0) {
        if (strict) throw Error("metric D needs outlier annotations");
        continue;
      }
      int d = diversity_score(order, *ann);
      out["D"] = d;
      out["D_norm"] = static_cast<double>(d) / ann->count(SegmentKind::outlier);
    } else if (m == "M") {
      if (!ann || ann->count(SegmentKind::cluster) == 0) {
        if (strict) throw Error("metric M needs cluster annotations");
        continue;
      }
      out["M"] = query_cluster_score(order, *ann);
      out["M_form"] = "R-form";
    } else if (m == "C") {
      if (!gs || !gs->concepts) {
        if (strict) throw Error("metric C needs a manifest with concepts");
        continue;
      }
      out["C"] = coverage_score(order, *gs->concepts);
    } else {
      throw Error("unknown metric: " + m + " (expected R, C, D, M)");
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"submodular data subset selection"};
  app.require_subcommand(1);

  SummarizeArgs sum_args;
  CLI::App* sum_cmd = app.add_subcommand("summarize", "select a summary subset");
  add_summarize_flags(sum_cmd, sum_args, false);

  SummarizeArgs cover_args;
  CLI::App* cover_cmd =
      app.add_subcommand("cover", "select until a coverage target is met");
  add_summarize_flags(cover_cmd, cover_args, true);

  std::string eval_summary, eval_annotations, eval_manifest;
  std::vector<std::string> eval_metrics;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score a summary report");
  eval_cmd->add_option("--summary", eval_summary, "report JSON from summarize")
      ->required();
  eval_cmd->add_option("--annotations", eval_annotations, "segment annotations");
  eval_cmd->add_option("--manifest", eval_manifest, "manifest (for metric C)");
  eval_cmd->add_option("--metrics", eval_metrics, "subset of R,C,D,M (strict)")
      ->delimiter(',');

  BenchConfig bench_config;
  std::vector<std::string> bench_functions;
  std::string bench_out;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "time memoized vs naive gains");
  bench_cmd->add_option("--n", bench_config.n, "ground set size")->required();
  bench_cmd->add_option("--functions", bench_functions,
                        "kinds to run (default all)")
      ->delimiter(',');
  bench_cmd->add_option("--budgets", bench_config.budget_percents,
                        "budget percents (default 5,15,30)")
      ->delimiter(',');
  bench_cmd->add_option("--repeats", bench_config.repeats, "timing repeats");
  bench_cmd->add_option("--seed", bench_config.seed, "data seed");
  bench_cmd->add_option("--dpp-max-n", bench_config.dpp_max_n,
                        "largest n dpp_logdet will run at");
  bench_cmd->add_flag("--lazy,!--no-lazy", bench_config.lazy,
                      "lazy greedy in both arms (default on)");
  bench_cmd->add_option("--out", bench_out, "write JSON report here");

  SyntheticSpec gen_spec;
  std::string gen_scenario = "clustered_with_outliers";
  std::string gen_dir;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write a synthetic scenario");
  gen_cmd->add_option("--scenario", gen_scenario,
                      "clustered_with_outliers, uniform, or concept_grid");
  gen_cmd->add_option("--n", gen_spec.n, "item count")->required();
  gen_cmd->add_option("--seed", gen_spec.seed, "rng seed");
  gen_cmd->add_option("--clusters", gen_spec.clusters, "cluster count");
  gen_cmd->add_option("--outliers", gen_spec.outliers, "outlier count");
  gen_cmd->add_option("--concepts", gen_spec.concepts, "concept count");
  gen_cmd->add_option("--dims", gen_spec.dims, "feature dimensions");
  gen_cmd->add_option("--spread", gen_spec.spread, "within-cluster scatter");
  gen_cmd->add_option("--out-dir", gen_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sum_cmd) return run_summarize(sum_args, false);
    if (*cover_cmd) return run_summarize(cover_args, true);
    if (*eval_cmd)
      return run_evaluate(eval_summary, eval_annotations, eval_manifest,
                          eval_metrics);
    if (*bench_cmd) {
      for (const std::string& name : bench_functions)
        bench_config.kinds.push_back(kind_from_name(name));
      BenchReport report = run_bench(bench_config);
      std::cout << report.table();
      if (!bench_out.empty()) {
        std::ofstream out(bench_out);
        if (!out) throw Error("cannot write " + bench_out);
        out << report.to_json();
      }
      return 0;
    }
    if (*gen_cmd) {
      gen_spec.scenario = scenario_from_name(gen_scenario);
      write_synthetic(gen_spec, gen_dir);
      return 0;
    }
  } catch (const CLI::RequiredError& e) {
    std::cerr << "error: missing required option " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
