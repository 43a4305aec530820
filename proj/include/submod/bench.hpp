#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "submod/objectives.hpp"

namespace submod {

struct BenchConfig {
  int n = 1000;
  std::vector<FunctionKind> kinds;  // empty: every kind
  std::vector<double> budget_percents = {5.0, 15.0, 30.0};
  int repeats = 1;
  std::uint64_t seed = 0;
  int dpp_max_n = 1000;  // refuse the cubic kind above this size
  bool lazy = true;
};

// One (function, budget) measurement: the same instance solved with memoized
// gains and with gains recomputed by two full evaluations.
struct BenchCell {
  FunctionKind kind = FunctionKind::facility_location;
  double budget_percent = 0.0;
  int budget_items = 0;
  double memo_ms = 0.0;
  double naive_ms = 0.0;
  long long memo_gain_evals = 0;
  long long naive_gain_evals = 0;
  long long memo_resorts = 0;
  long long naive_resorts = 0;
  long long resort_bound = 0;  // sum over steps of remaining candidates
  double speedup = 0.0;        // naive_ms / memo_ms
  bool identical_selection = false;
  bool skipped = false;
  std::string note;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchCell> cells;

  std::string table() const;    // aligned text, one row per cell
  std::string to_json() const;  // schema-versioned
};

BenchReport run_bench(const BenchConfig& config);

}  // namespace submod
