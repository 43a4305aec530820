#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "submod/bench.hpp"
#include "submod/metrics.hpp"
#include "submod/optimizers.hpp"
#include "submod/pipeline.hpp"
#include "submod/synthetic.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace submod;

namespace {

std::string summarize_json(const std::string& job_text,
                           const std::string& base_dir) {
  SummarizationJob job = SummarizationJob::from_json_text(job_text, base_dir);
  return report_to_json(run_job(job));
}

void generate(const std::string& scenario, int n, std::uint64_t seed,
              const std::string& out_dir, int clusters, int outliers,
              int concepts, int dims, double spread) {
  SyntheticSpec spec;
  spec.scenario = scenario_from_name(scenario);
  spec.n = n;
  spec.seed = seed;
  spec.clusters = clusters;
  spec.outliers = outliers;
  spec.concepts = concepts;
  spec.dims = dims;
  spec.spread = spread;
  write_synthetic(spec, out_dir);
}

std::string evaluate_json(const std::vector<int>& order,
                          const std::string& annotations_path,
                          const std::string& manifest_path, int ground_size) {
  std::optional<GroundSet> gs;
  if (!manifest_path.empty()) gs = load_ground_set(manifest_path);
  int n = gs ? gs->n : ground_size;
  for (int j : order) n = std::max(n, j + 1);

  json out{{"version", 1}};
  if (!annotations_path.empty()) {
    SegmentAnnotation ann = load_annotations(annotations_path, n);
    if (ann.count(SegmentKind::scene) > 0)
      out["R"] = representation_score(order, ann);
    int n_out = ann.count(SegmentKind::outlier);
    if (n_out > 0) {
      int d = diversity_score(order, ann);
      out["D"] = d;
      out["D_norm"] = static_cast<double>(d) / n_out;
    }
    if (ann.count(SegmentKind::cluster) > 0) {
      out["M"] = query_cluster_score(order, ann);
      out["M_form"] = "R-form";
    }
  }
  if (gs && gs->concepts) out["C"] = coverage_score(order, *gs->concepts);
  return out.dump();
}

// In-memory path: a dense similarity matrix straight from numpy.
std::string greedy_kernel(const Matrix& similarity, const std::string& kind_str,
                          int budget, double alpha, double lambda, double jitter,
                          bool lazy, bool memoized) {
  auto kernel = std::make_shared<SimilarityKernel>(
      SimilarityKernel::from_dense(similarity));
  FunctionKind kind = kind_from_name(kind_str);

  std::shared_ptr<const DistanceMatrix> distance;
  std::unique_ptr<SetFunction> f;
  switch (kind) {
    case FunctionKind::facility_location:
      f = make_facility_location(kernel);
      break;
    case FunctionKind::saturated_coverage:
      f = make_saturated_coverage(kernel, alpha);
      break;
    case FunctionKind::graph_cut:
      f = make_graph_cut(kernel, lambda);
      break;
    case FunctionKind::dpp_logdet:
      f = make_dpp_logdet(kernel, jitter);
      break;
    case FunctionKind::disparity_min:
    case FunctionKind::disparity_sum:
    case FunctionKind::disparity_min_sum:
      distance = std::make_shared<DistanceMatrix>(to_distance(*kernel));
      f = make_disparity(kind, distance);
      break;
    default:
      throw Error(std::string("greedy_kernel supports kernel/distance kinds, not ") +
                  kind_str);
  }

  SolveOptions options{lazy, memoized};
  SummarySolution sol;
  if (is_dispersion_kind(kind)) {
    sol = dispersion_greedy(*f, budget, options, kind);
  } else {
    BudgetSpec spec{BudgetSpec::Mode::cardinality, static_cast<double>(budget),
                    std::nullopt};
    sol = greedy_budget(*f, Vector::Ones(kernel->size()), spec, options);
  }
  json j{{"order", sol.order},
         {"gains", sol.gains},
         {"objective", sol.objective},
         {"evals", sol.stats.gain_evals},
         {"resorts", sol.stats.resorts}};
  return j.dump();
}

std::string bench_json(int n, const std::vector<std::string>& functions,
                       const std::vector<double>& budgets, int repeats,
                       std::uint64_t seed, int dpp_max_n, bool lazy) {
  BenchConfig config;
  config.n = n;
  for (const auto& name : functions) config.kinds.push_back(kind_from_name(name));
  if (!budgets.empty()) config.budget_percents = budgets;
  config.repeats = repeats;
  config.seed = seed;
  config.dpp_max_n = dpp_max_n;
  config.lazy = lazy;
  return run_bench(config).to_json();
}

std::vector<std::string> kind_names() {
  std::vector<std::string> out;
  for (FunctionKind kind : all_function_kinds()) out.push_back(kind_name(kind));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "submodular data subset selection";
  py::register_exception<Error>(m, "SubmodError", PyExc_ValueError);

  m.def("summarize_json", &summarize_json, py::arg("job_text"),
        py::arg("base_dir") = ".",
        "Run a summarization job given as a JSON string; returns the report "
        "as a JSON string.");
  m.def("generate", &generate, py::arg("scenario"), py::arg("n"),
        py::arg("seed") = 0, py::arg("out_dir") = ".",
        py::arg("clusters") = 5, py::arg("outliers") = 10,
        py::arg("concepts") = 11, py::arg("dims") = 8, py::arg("spread") = 0.08,
        "Write a synthetic scenario (manifest + annotations) to a directory.");
  m.def("evaluate_json", &evaluate_json, py::arg("order"),
        py::arg("annotations_path") = "", py::arg("manifest_path") = "",
        py::arg("ground_size") = 0,
        "Score a summary against annotations; returns metrics as JSON.");
  m.def("greedy_kernel", &greedy_kernel, py::arg("similarity"), py::arg("kind"),
        py::arg("budget"), py::arg("alpha") = 0.2, py::arg("lam") = 1.0,
        py::arg("jitter") = 1e-6, py::arg("lazy") = true,
        py::arg("memoized") = true,
        "Greedy selection over an in-memory dense similarity matrix.");
  m.def("bench_json", &bench_json, py::arg("n"),
        py::arg("functions") = std::vector<std::string>{},
        py::arg("budgets") = std::vector<double>{}, py::arg("repeats") = 1,
        py::arg("seed") = 0, py::arg("dpp_max_n") = 1000, py::arg("lazy") = true,
        "Time memoized vs naive gains; returns the report as JSON.");
  m.def("kind_names", &kind_names, "All objective kinds.");
}
