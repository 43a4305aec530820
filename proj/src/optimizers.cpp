#include "submod/optimizers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace submod {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Candidate {
  double ratio;
  double gain;
  int j;
  int step;  // |X| when the gain was computed
};

// Max-heap: higher ratio first, ties to the lower index.
struct CandidateOrder {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    return a.j > b.j;
  }
};

// One selection step for both budget and cover greedy.  The lazy path keeps a
// priority queue of possibly-stale gains; stale entries are refreshed until no
// remaining bound can beat the best fresh gain (correct for submodular kinds,
// where stale gains are upper bounds).  A small margin also refreshes bounds
// that merely tie: rounding can leave a stale bound a hair below an exact tie,
// and ties must resolve by index exactly like the eager scan.
class Selector {
 public:
  Selector(const SetFunction& f, const Vector& costs, bool use_ratio, bool lazy,
           bool memoized, SolveStats& stats)
      : f_(f),
        costs_(costs),
        use_ratio_(use_ratio),
        lazy_(lazy),
        memoized_(memoized),
        stats_(stats) {}

  // Best feasible candidate and its fresh gain; j = -1 when none remains.
  std::pair<int, double> next(const GainState& state, double remaining) {
    return lazy_ ? next_lazy(state, remaining) : next_eager(state, remaining);
  }

 private:
  double fresh_gain(const GainState& state, int j) {
    ++stats_.gain_evals;
    return memoized_ ? f_.gain(state, j) : f_.gain_naive(state, j);
  }

  double ratio_of(double gain, int j) const {
    return use_ratio_ ? gain / costs_[j] : gain;
  }

  std::pair<int, double> next_eager(const GainState& state, double remaining) {
    int best = -1;
    double best_gain = 0.0, best_ratio = 0.0;
    for (int j = 0; j < f_.ground_size(); ++j) {
      if (state.contains(j)) continue;
      if (use_ratio_ && costs_[j] > remaining) continue;
      double g = fresh_gain(state, j);
      double r = ratio_of(g, j);
      if (best < 0 || r > best_ratio) {
        best = j;
        best_gain = g;
        best_ratio = r;
      }
    }
    return {best, best_gain};
  }

  static double refresh_margin(double best_ratio) {
    return 1e-9 * std::max(1.0, std::abs(best_ratio));
  }

  std::pair<int, double> next_lazy(const GainState& state, double remaining) {
    const int step = state.size();
    if (!initialized_) {
      initialized_ = true;
      for (int j = 0; j < f_.ground_size(); ++j) {
        if (state.contains(j)) continue;
        if (use_ratio_ && costs_[j] > remaining) continue;
        double g = fresh_gain(state, j);
        heap_.push({ratio_of(g, j), g, j, step});
      }
    }
    int best = -1;
    double best_gain = 0.0, best_ratio = 0.0;
    std::vector<Candidate> fresh;
    while (!heap_.empty()) {
      if (best >= 0 && heap_.top().ratio < best_ratio - refresh_margin(best_ratio))
        break;
      Candidate top = heap_.top();
      heap_.pop();
      // Budgets only shrink, so an infeasible entry never comes back.
      if (use_ratio_ && costs_[top.j] > remaining) continue;
      if (top.step != step) {
        double g = fresh_gain(state, top.j);
        ++stats_.resorts;
        top = {ratio_of(g, top.j), g, top.j, step};
      }
      fresh.push_back(top);
      if (best < 0 || top.ratio > best_ratio ||
          (top.ratio == best_ratio && top.j < best)) {
        best = top.j;
        best_gain = top.gain;
        best_ratio = top.ratio;
      }
    }
    for (const Candidate& c : fresh)
      if (c.j != best) heap_.push(c);
    if (best < 0) return {-1, 0.0};
    return {best, best_gain};
  }

  const SetFunction& f_;
  const Vector& costs_;
  bool use_ratio_;
  bool lazy_;
  bool memoized_;
  SolveStats& stats_;
  bool initialized_ = false;
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap_;
};

bool resolve_lazy(const SetFunction& f, const SolveOptions& options,
                  SolveStats& stats) {
  stats.memoized = options.memoized;
  if (!options.lazy) return false;
  if (!f.traits().submodular) {
    stats.lazy_fallback = true;
    return false;
  }
  return true;
}

void accept(const SetFunction& f, GainState& state, SummarySolution& out,
            int j, double gain) {
  f.commit(state, j);
  out.order.push_back(j);
  out.gains.push_back(gain);
  out.objective += gain;
  ++out.stats.iterations;
}

}  // namespace

SummarySolution greedy_budget(const SetFunction& f, const Vector& costs,
                              const BudgetSpec& spec,
                              const SolveOptions& options) {
  const auto start = Clock::now();
  const int n = f.ground_size();
  if (n < 1) throw Error("empty ground set");
  if (costs.size() != n) throw Error("cost vector length must match ground set");
  if (!costs.allFinite() || costs.minCoeff() <= 0)
    throw Error("costs must be finite and strictly positive");
  if (!(spec.budget > 0)) throw Error("budget must be positive");

  const bool knapsack = spec.mode == BudgetSpec::Mode::knapsack;
  int slots = n;
  if (!knapsack) {
    double rounded = std::nearbyint(spec.budget);
    if (rounded != spec.budget)
      throw Error("cardinality budget must be an integer");
    slots = static_cast<int>(std::min<double>(rounded, n));
  }

  SummarySolution out;
  const bool lazy = resolve_lazy(f, options, out.stats);
  out.stats.lazy = lazy;
  const bool stop_on_negative =
      spec.stop_on_negative_gain.value_or(!f.traits().monotone);

  auto state = f.make_state();
  Selector selector(f, costs, knapsack, lazy, options.memoized, out.stats);
  double remaining = knapsack ? spec.budget : 0.0;

  while (static_cast<int>(out.order.size()) < slots) {
    auto [j, gain] = selector.next(*state, remaining);
    if (j < 0) break;
    if (stop_on_negative && gain < 0) break;
    accept(f, *state, out, j, gain);
    out.cost += costs[j];
    if (knapsack) remaining -= costs[j];
  }

  if (knapsack) {
    // The bare ratio rule can starve a single high-value expensive item;
    // compare against the best feasible singleton.
    int best = -1;
    double best_value = 0.0;
    auto empty = f.make_state();
    for (int j = 0; j < n; ++j) {
      if (costs[j] > spec.budget) continue;
      ++out.stats.gain_evals;
      double v = options.memoized ? f.gain(*empty, j) : f.gain_naive(*empty, j);
      if (best < 0 || v > best_value) {
        best = j;
        best_value = v;
      }
    }
    if (best >= 0 && best_value > out.objective) {
      out.order = {best};
      out.gains = {best_value};
      out.objective = best_value;
      out.cost = costs[best];
      out.stats.singleton_patch = true;
    }
    if (out.order.empty() && best < 0) out.stats.infeasible = true;
  }

  out.stats.wall_ms = elapsed_ms(start);
  return out;
}

SummarySolution greedy_cover(const SetFunction& f, const CoverSpec& spec,
                             const SolveOptions& options) {
  const auto start = Clock::now();
  const int n = f.ground_size();
  if (n < 1) throw Error("empty ground set");
  if (!(spec.tau > 0) || spec.tau > 1)
    throw Error("cover tau must lie in (0, 1]");
  if (!f.traits().monotone)
    throw Error(std::string("cover mode needs a monotone objective; ") +
                kind_name(f.kind()) + " is not");

  std::vector<int> everything(n);
  for (int i = 0; i < n; ++i) everything[i] = i;
  const double full_value = f.evaluate(everything);
  const double target = spec.tau * full_value - spec.tolerance;

  SummarySolution out;
  const bool lazy = resolve_lazy(f, options, out.stats);
  out.stats.lazy = lazy;

  const Vector unit_costs = Vector::Ones(n);
  auto state = f.make_state();
  Selector selector(f, unit_costs, false, lazy, options.memoized, out.stats);

  while (out.objective < target) {
    auto [j, gain] = selector.next(*state, 0.0);
    if (j < 0)
      throw Error("cover target unreachable");  // guarded: monotone f reaches f(V)
    accept(f, *state, out, j, gain);
    out.cost += 1.0;
  }

  out.stats.wall_ms = elapsed_ms(start);
  return out;
}

SummarySolution dispersion_greedy(const SetFunction& f, int budget,
                                  const SolveOptions& options,
                                  std::optional<FunctionKind> rule) {
  const auto start = Clock::now();
  const DistanceMatrix* dist = f.dispersion_distance();
  if (!dist) throw Error("dispersion solver needs a disparity objective");
  const int n = f.ground_size();
  if (budget < 1) throw Error("dispersion budget must be >= 1");
  if (budget > n) throw Error("dispersion budget exceeds ground set size");

  FunctionKind rule_kind = rule.value_or(f.kind());
  const bool sum_rule = rule_kind == FunctionKind::disparity_sum;

  SummarySolution out;
  out.stats.memoized = options.memoized;
  auto state = f.make_state();

  // score[j]: distance from candidate j to the selected set under the rule.
  Vector score = sum_rule
                     ? Vector::Zero(n)
                     : Vector::Constant(n, std::numeric_limits<double>::infinity());

  for (int step = 0; step < budget; ++step) {
    int pick = -1;
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      if (state->contains(j)) continue;
      double s = step == 0 ? dist->row_sum(j) : score[j];
      if (pick < 0 || s > best) {
        pick = j;
        best = s;
      }
    }
    ++out.stats.gain_evals;
    double gain = options.memoized ? f.gain(*state, pick)
                                   : f.gain_naive(*state, pick);
    accept(f, *state, out, pick, gain);
    out.cost += 1.0;
    for (int j = 0; j < n; ++j) {
      if (sum_rule)
        score[j] += dist->at(j, pick);
      else
        score[j] = std::min(score[j], dist->at(j, pick));
    }
  }

  out.stats.wall_ms = elapsed_ms(start);
  return out;
}

std::pair<std::vector<int>, double> exhaustive_oracle(const SetFunction& f,
                                                      int budget) {
  const int n = f.ground_size();
  if (n > 20) throw Error("exhaustive oracle is capped at 20 items");
  if (budget < 0) throw Error("budget must be nonnegative");

  std::vector<int> best_set;
  double best_value = 0.0;  // f(empty) = 0 for every kind
  std::vector<int> items;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > budget) continue;
    items.clear();
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) items.push_back(j);
    double v = f.evaluate(items);
    if (v > best_value) {
      best_value = v;
      best_set = items;
    }
  }
  return {best_set, best_value};
}

}  // namespace submod
