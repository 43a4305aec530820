#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "submod/common.hpp"
#include "submod/objectives.hpp"

namespace submod {

struct BudgetSpec {
  enum class Mode { cardinality, knapsack };
  Mode mode = Mode::cardinality;
  double budget = 0.0;  // item count (integral) or total cost
  // Default: stop when the best gain drops below zero iff the objective is
  // non-monotone; monotone objectives never produce negative gains.
  std::optional<bool> stop_on_negative_gain;
};

struct CoverSpec {
  double tau = 1.0;        // stop at f(X) >= tau * f(V) - tolerance
  double tolerance = 1e-9;
};

struct SolveOptions {
  bool lazy = true;      // priority-queue greedy when the kind allows it
  bool memoized = true;  // false: every gain is two full evaluations
};

struct SolveStats {
  long long gain_evals = 0;  // marginal-gain computations
  long long resorts = 0;     // lazy-queue refreshes (n_R)
  long long iterations = 0;  // accepted picks
  double wall_ms = 0.0;
  bool lazy = false;      // what actually ran
  bool memoized = true;
  bool lazy_fallback = false;    // lazy requested for a non-submodular kind
  bool singleton_patch = false;  // knapsack answer replaced by best singleton
  bool infeasible = false;       // budget below every single item's cost
};

struct SummarySolution {
  std::vector<int> order;     // insertion order
  std::vector<double> gains;  // per-step marginal gains
  double objective = 0.0;
  double cost = 0.0;
  SolveStats stats;
};

// Greedy for a budget constraint: picks argmax gain/cost (gain alone in
// cardinality mode), ties to the lowest index.  Knapsack answers are patched
// against the best feasible singleton.
SummarySolution greedy_budget(const SetFunction& f, const Vector& costs,
                              const BudgetSpec& spec,
                              const SolveOptions& options = {});

// Greedy until f(X) reaches tau * f(V) - tolerance.  Monotone kinds only.
SummarySolution greedy_cover(const SetFunction& f, const CoverSpec& spec,
                             const SolveOptions& options = {});

// Farthest-point insertion for dispersion objectives: seeds with the max
// row-sum item, then repeatedly adds the candidate farthest from the current
// set (min-distance rule; sum-distance for disparity_sum).  `rule` overrides
// the rule kind when f is a mixture wrapping a dispersion term.
SummarySolution dispersion_greedy(const SetFunction& f, int budget,
                                  const SolveOptions& options = {},
                                  std::optional<FunctionKind> rule = {});

// Exact argmax over all subsets of size <= budget.  Test oracle; n <= 20.
std::pair<std::vector<int>, double> exhaustive_oracle(const SetFunction& f,
                                                      int budget);

}  // namespace submod
