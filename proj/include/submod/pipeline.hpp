#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "submod/ground_set.hpp"
#include "submod/metrics.hpp"
#include "submod/optimizers.hpp"

namespace submod {

// One end-to-end summarization request: data, objective, constraint, query.
struct SummarizationJob {
  enum class Mode { budget, cover };

  std::filesystem::path manifest;
  FunctionKind function = FunctionKind::facility_location;
  ObjectiveParams params;
  double mixture_beta = 0.0;  // adds beta * modular(importance) to the objective

  Mode mode = Mode::budget;
  BudgetSpec budget{BudgetSpec::Mode::cardinality, 10.0, std::nullopt};
  CoverSpec cover;

  std::optional<std::string> query_concept;
  std::optional<std::filesystem::path> relevance;
  double relevance_threshold = 0.5;

  std::vector<std::string> kernel_modalities;  // empty: precomputed, else all
  std::vector<double> kernel_weights;          // empty: uniform
  std::optional<int> sparsify_k;

  SolveOptions solve;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> output;

  static SummarizationJob from_json_file(const std::filesystem::path& path);
  // Same schema as a job file; relative paths resolve against base_dir.
  static SummarizationJob from_json_text(const std::string& text,
                                         const std::filesystem::path& base_dir);
};

struct JobReport {
  std::string function;
  std::string mode;
  SummarySolution solution;           // order in original ground-set indices
  std::vector<std::string> item_ids;  // ids of the selected items
  std::map<std::string, double> metrics;
};

JobReport run_job(const SummarizationJob& job);

std::string report_to_json(const JobReport& report);
void write_report(const JobReport& report, const std::filesystem::path& path);

}  // namespace submod
