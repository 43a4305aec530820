#include "submod/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "submod/optimizers.hpp"
#include "submod/synthetic.hpp"

namespace submod {

using nlohmann::json;

namespace {

// Ground sets below the synthetic generator's minimum size (degenerate
// bench cells like n = 1) are built inline.
GroundSet tiny_ground_set(int n, std::uint64_t seed) {
  Rng rng(seed);
  const int d = 8;
  Matrix visual(n, d), colors(n, d);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < d; ++t) visual(i, t) = rng.normal();
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < d; ++t) colors(i, t) = std::abs(rng.normal());
  Vector importance(n);
  for (int i = 0; i < n; ++i) importance[i] = rng.uniform();

  GroundSet gs;
  gs.n = n;
  for (int i = 0; i < n; ++i) gs.item_ids.push_back(std::to_string(i));
  gs.costs = Vector::Ones(n);
  gs.modalities.emplace_back(
      "visual", FeatureMatrix{FeatureMatrix::Kind::embedding, std::move(visual)});
  gs.modalities.emplace_back(
      "colors", FeatureMatrix{FeatureMatrix::Kind::histogram, std::move(colors)});
  gs.importance = std::move(importance);
  ConceptTable ct;
  const int m = std::max(1, std::min(n, 3));
  for (int u = 0; u < m; ++u) ct.names.push_back("c_" + std::to_string(u));
  ct.weights = Vector::Ones(m);
  for (int i = 0; i < n; ++i) ct.hard_labels.push_back({i % m});
  gs.concepts = std::move(ct);
  return gs;
}

SummarySolution solve_cell(const SetFunction& f, FunctionKind kind, int b,
                           const Vector& costs, const SolveOptions& options) {
  if (is_dispersion_kind(kind)) return dispersion_greedy(f, b, options, kind);
  BudgetSpec spec{BudgetSpec::Mode::cardinality, static_cast<double>(b),
                  std::nullopt};
  return greedy_budget(f, costs, spec, options);
}

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
  if (config.n < 1) throw Error("bench needs n >= 1");
  if (config.repeats < 1) throw Error("bench needs repeats >= 1");
  for (double pct : config.budget_percents)
    if (!(pct > 0) || pct > 100)
      throw Error("bench budgets are percents in (0, 100]");

  const bool explicit_kinds = !config.kinds.empty();
  std::vector<FunctionKind> kinds =
      explicit_kinds ? config.kinds : all_function_kinds();

  GroundSet gs;
  if (config.n >= 10) {
    SyntheticSpec spec;
    spec.scenario = Scenario::clustered_with_outliers;
    spec.n = config.n;
    spec.seed = config.seed;
    spec.outliers = config.n >= 30 ? 10 : 0;
    spec.clusters = std::min(5, config.n - spec.outliers);
    gs = std::move(generate_synthetic(spec).ground);
  } else {
    gs = tiny_ground_set(config.n, config.seed);
  }

  const auto modality_names = gs.modality_names();
  auto kernel = std::make_shared<SimilarityKernel>(build_kernel(
      gs, modality_names, std::vector<double>(modality_names.size(), 1.0)));
  std::shared_ptr<const DistanceMatrix> distance;
  auto get_distance = [&]() {
    if (!distance) distance = std::make_shared<DistanceMatrix>(to_distance(*kernel));
    return distance;
  };

  BenchReport report;
  report.config = config;

  for (FunctionKind kind : kinds) {
    if (kind == FunctionKind::dpp_logdet && config.n > config.dpp_max_n) {
      if (explicit_kinds)
        throw Error("dpp_logdet bench at n=" + std::to_string(config.n) +
                    " exceeds the cap; raise --dpp-max-n to force it");
      for (double pct : config.budget_percents) {
        BenchCell cell;
        cell.kind = kind;
        cell.budget_percent = pct;
        cell.skipped = true;
        cell.note = "skipped: n exceeds --dpp-max-n (" +
                    std::to_string(config.dpp_max_n) + ")";
        report.cells.push_back(std::move(cell));
      }
      continue;
    }

    std::unique_ptr<SetFunction> f = make_objective(
        kind, gs, kernel,
        is_dispersion_kind(kind) ? get_distance() : nullptr, ObjectiveParams{});

    for (double pct : config.budget_percents) {
      BenchCell cell;
      cell.kind = kind;
      cell.budget_percent = pct;
      int b = static_cast<int>(std::llround(pct / 100.0 * config.n));
      b = std::clamp(b, 1, config.n);
      cell.budget_items = b;

      SolveOptions memo{config.lazy, true};
      SolveOptions naive{config.lazy, false};
      SummarySolution memo_sol, naive_sol;
      for (int r = 0; r < config.repeats; ++r) {
        memo_sol = solve_cell(*f, kind, b, gs.costs, memo);
        naive_sol = solve_cell(*f, kind, b, gs.costs, naive);
        cell.memo_ms += memo_sol.stats.wall_ms;
        cell.naive_ms += naive_sol.stats.wall_ms;
      }
      cell.memo_ms /= config.repeats;
      cell.naive_ms /= config.repeats;
      cell.memo_gain_evals = memo_sol.stats.gain_evals;
      cell.naive_gain_evals = naive_sol.stats.gain_evals;
      cell.memo_resorts = memo_sol.stats.resorts;
      cell.naive_resorts = naive_sol.stats.resorts;
      cell.speedup = cell.naive_ms / std::max(cell.memo_ms, 1e-6);
      cell.identical_selection = memo_sol.order == naive_sol.order;
      for (long long t = 0; t < static_cast<long long>(memo_sol.order.size()); ++t)
        cell.resort_bound += config.n - t;
      if (!cell.identical_selection) cell.note = "ARMS DISAGREE";
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string BenchReport::table() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %5s %6s %12s %12s %9s %12s %12s %8s\n",
                "function", "b%", "b", "memo_ms", "naive_ms", "speedup",
                "evals_memo", "evals_naive", "n_R");
  out += line;
  for (const auto& c : cells) {
    if (c.skipped) {
      std::snprintf(line, sizeof(line), "%-18s %5.0f %6s %s\n",
                    kind_name(c.kind), c.budget_percent, "-", c.note.c_str());
      out += line;
      continue;
    }
    std::snprintf(line, sizeof(line),
                  "%-18s %5.0f %6d %12.2f %12.2f %8.1fx %12lld %12lld %8lld\n",
                  kind_name(c.kind), c.budget_percent, c.budget_items, c.memo_ms,
                  c.naive_ms, c.speedup, c.memo_gain_evals, c.naive_gain_evals,
                  c.memo_resorts);
    out += line;
  }
  return out;
}

std::string BenchReport::to_json() const {
  json cells_json = json::array();
  for (const auto& c : cells) {
    json cj{{"function", kind_name(c.kind)},
            {"budget_percent", c.budget_percent},
            {"skipped", c.skipped}};
    if (c.skipped) {
      cj["note"] = c.note;
    } else {
      cj["budget_items"] = c.budget_items;
      cj["memo_ms"] = c.memo_ms;
      cj["naive_ms"] = c.naive_ms;
      cj["speedup"] = c.speedup;
      cj["memo_gain_evals"] = c.memo_gain_evals;
      cj["naive_gain_evals"] = c.naive_gain_evals;
      cj["memo_resorts"] = c.memo_resorts;
      cj["naive_resorts"] = c.naive_resorts;
      cj["resort_bound"] = c.resort_bound;
      cj["identical_selection"] = c.identical_selection;
      if (!c.note.empty()) cj["note"] = c.note;
    }
    cells_json.push_back(std::move(cj));
  }
  json j{{"version", 1},
         {"n", config.n},
         {"seed", config.seed},
         {"repeats", config.repeats},
         {"lazy", config.lazy},
         {"budget_percents", config.budget_percents},
         {"cells", cells_json}};
  return j.dump(2) + "\n";
}

}  // namespace submod
