#include "submod/pipeline.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace submod {

using nlohmann::json;

namespace {

bool needs_kernel(FunctionKind kind) {
  return kind == FunctionKind::facility_location ||
         kind == FunctionKind::saturated_coverage ||
         kind == FunctionKind::graph_cut || kind == FunctionKind::dpp_logdet ||
         is_dispersion_kind(kind);
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": invalid JSON (" + e.what() + ")");
  }
  return j;
}

}  // namespace

namespace {

SummarizationJob job_from_json(const json& j, const std::filesystem::path& base) {
  auto resolve = [&](const std::string& rel) { return base / rel; };

  SummarizationJob job;
  if (!j.contains("manifest")) throw Error("job file needs a \"manifest\" path");
  job.manifest = resolve(j["manifest"].get<std::string>());
  if (!j.contains("function")) throw Error("job file needs a \"function\" kind");
  job.function = kind_from_name(j["function"].get<std::string>());

  if (j.contains("params")) {
    const auto& p = j["params"];
    job.params.alpha = p.value("alpha", job.params.alpha);
    job.params.lambda = p.value("lambda", job.params.lambda);
    if (p.contains("psi")) job.params.psi = psi_from_name(p["psi"].get<std::string>());
    job.params.dpp_jitter = p.value("dpp_jitter", job.params.dpp_jitter);
    job.params.feature_modality =
        p.value("feature_modality", job.params.feature_modality);
  }
  job.mixture_beta = j.value("mixture_beta", 0.0);
  if (job.mixture_beta < 0) throw Error("mixture_beta must be nonnegative");

  if (j.contains("cover")) job.mode = SummarizationJob::Mode::cover;
  if (j.contains("mode")) {
    std::string m = j["mode"].get<std::string>();
    if (m == "budget")
      job.mode = SummarizationJob::Mode::budget;
    else if (m == "cover")
      job.mode = SummarizationJob::Mode::cover;
    else
      throw Error("unknown mode: " + m);
  }

  if (j.contains("budget")) {
    const auto& b = j["budget"];
    if (b.is_number()) {
      job.budget.mode = BudgetSpec::Mode::cardinality;
      job.budget.budget = b.get<double>();
    } else {
      std::string bm = b.value("mode", "cardinality");
      if (bm == "cardinality")
        job.budget.mode = BudgetSpec::Mode::cardinality;
      else if (bm == "knapsack")
        job.budget.mode = BudgetSpec::Mode::knapsack;
      else
        throw Error("unknown budget mode: " + bm);
      job.budget.budget = b.at("value").get<double>();
      if (b.contains("stop_on_negative"))
        job.budget.stop_on_negative_gain = b["stop_on_negative"].get<bool>();
    }
  }
  if (j.contains("cover")) {
    const auto& c = j["cover"];
    if (c.is_number()) {
      job.cover.tau = c.get<double>();
    } else {
      job.cover.tau = c.value("tau", 1.0);
      job.cover.tolerance = c.value("tolerance", 1e-9);
    }
  }

  if (j.contains("query")) {
    const auto& q = j["query"];
    if (q.is_string()) {
      job.query_concept = q.get<std::string>();
    } else {
      if (q.contains("concept")) job.query_concept = q["concept"].get<std::string>();
      if (q.contains("relevance"))
        job.relevance = resolve(q["relevance"].get<std::string>());
      job.relevance_threshold = q.value("threshold", 0.5);
      if (job.query_concept && job.relevance)
        throw Error("query takes a concept or a relevance file, not both");
    }
  }

  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    if (k.contains("modalities"))
      job.kernel_modalities = k["modalities"].get<std::vector<std::string>>();
    if (k.contains("weights"))
      job.kernel_weights = k["weights"].get<std::vector<double>>();
    if (k.contains("sparsify_k")) job.sparsify_k = k["sparsify_k"].get<int>();
  }

  job.solve.lazy = j.value("lazy", true);
  job.solve.memoized = j.value("memoized", true);
  if (j.contains("annotations"))
    job.annotations = resolve(j["annotations"].get<std::string>());
  if (j.contains("output")) job.output = resolve(j["output"].get<std::string>());
  return job;
}

}  // namespace

SummarizationJob SummarizationJob::from_json_file(
    const std::filesystem::path& path) {
  return job_from_json(parse_json_file(path), path.parent_path());
}

SummarizationJob SummarizationJob::from_json_text(
    const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid job JSON (") + e.what() + ")");
  }
  return job_from_json(j, base_dir);
}

JobReport run_job(const SummarizationJob& job) {
  GroundSet gs = load_ground_set(job.manifest);

  std::optional<std::vector<int>> keep;
  if (job.query_concept && job.relevance)
    throw Error("query takes a concept or a relevance file, not both");
  if (job.query_concept) keep = filter_by_query(gs, *job.query_concept);
  else if (job.relevance)
    keep = filter_by_query(gs, *job.relevance, job.relevance_threshold);

  GroundSet work = keep ? gs.subset(*keep) : gs;

  std::shared_ptr<const SimilarityKernel> kernel;
  std::shared_ptr<const DistanceMatrix> distance;
  if (needs_kernel(job.function)) {
    std::vector<std::string> modalities = job.kernel_modalities;
    std::vector<double> weights = job.kernel_weights;
    if (modalities.empty() && !work.precomputed_kernel)
      modalities = work.modality_names();
    if (weights.empty()) weights.assign(modalities.size(), 1.0);
    kernel = std::make_shared<SimilarityKernel>(
        build_kernel(work, modalities, weights, job.sparsify_k));
    if (is_dispersion_kind(job.function))
      distance = std::make_shared<DistanceMatrix>(to_distance(*kernel));
  }

  std::unique_ptr<SetFunction> f =
      make_objective(job.function, work, kernel, distance, job.params);
  if (job.mixture_beta > 0) {
    std::vector<std::pair<std::unique_ptr<SetFunction>, double>> parts;
    parts.emplace_back(std::move(f), 1.0);
    parts.emplace_back(make_objective(FunctionKind::modular, work, nullptr,
                                      nullptr, job.params),
                       job.mixture_beta);
    f = make_weighted_sum(std::move(parts));
  }

  JobReport report;
  report.function = kind_name(job.function);
  if (job.mode == SummarizationJob::Mode::budget) {
    report.mode = "budget";
    if (is_dispersion_kind(job.function)) {
      if (job.budget.mode == BudgetSpec::Mode::knapsack)
        throw Error("dispersion kinds support cardinality budgets only");
      double rounded = std::nearbyint(job.budget.budget);
      if (rounded != job.budget.budget)
        throw Error("cardinality budget must be an integer");
      report.solution = dispersion_greedy(*f, static_cast<int>(rounded),
                                          job.solve, job.function);
    } else {
      report.solution = greedy_budget(*f, work.costs, job.budget, job.solve);
    }
  } else {
    report.mode = "cover";
    report.solution = greedy_cover(*f, job.cover, job.solve);
  }

  // Map the solved subset's indices back to the original ground set.
  if (keep)
    for (int& j : report.solution.order) j = (*keep)[j];
  for (int j : report.solution.order)
    report.item_ids.push_back(gs.item_ids[j]);

  const auto& order = report.solution.order;
  if (job.annotations) {
    SegmentAnnotation ann = load_annotations(*job.annotations, gs.n);
    if (ann.count(SegmentKind::scene) > 0)
      report.metrics["R"] = representation_score(order, ann);
    int n_outliers = ann.count(SegmentKind::outlier);
    if (n_outliers > 0) {
      int d = diversity_score(order, ann);
      report.metrics["D"] = d;
      report.metrics["D_norm"] = static_cast<double>(d) / n_outliers;
    }
    if (ann.count(SegmentKind::cluster) > 0)
      report.metrics["M"] = query_cluster_score(order, ann);
  }
  if (gs.concepts) {
    bool any_label = false;
    for (const auto& labels : gs.concepts->hard_labels)
      if (!labels.empty()) {
        any_label = true;
        break;
      }
    if (any_label) report.metrics["C"] = coverage_score(order, *gs.concepts);
  }

  if (job.output) write_report(report, *job.output);
  return report;
}

std::string report_to_json(const JobReport& report) {
  const SolveStats& st = report.solution.stats;
  json j{
      {"version", 1},
      {"function", report.function},
      {"mode", report.mode},
      {"order", report.solution.order},
      {"item_ids", report.item_ids},
      {"gains", report.solution.gains},
      {"objective", report.solution.objective},
      {"cost", report.solution.cost},
      {"stats",
       {{"evals", st.gain_evals},
        {"resorts", st.resorts},
        {"iterations", st.iterations},
        {"wall_ms", st.wall_ms},
        {"lazy", st.lazy},
        {"memoized", st.memoized},
        {"lazy_fallback", st.lazy_fallback},
        {"singleton_patch", st.singleton_patch},
        {"infeasible", st.infeasible}}},
  };
  if (!report.metrics.empty()) {
    json m = json::object();
    for (const auto& [name, value] : report.metrics) m[name] = value;
    if (report.metrics.count("M")) m["M_form"] = "R-form";
    j["metrics"] = m;
  }
  return j.dump(2) + "\n";
}

void write_report(const JobReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << report_to_json(report);
}

}  // namespace submod
