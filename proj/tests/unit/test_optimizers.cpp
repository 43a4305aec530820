#include <cmath>
#include <vector>

#include "doctest.h"
#include "submod/optimizers.hpp"
#include "test_support.hpp"

using namespace submod;

TEST_CASE("budget greedy reproduces the hand run on the three-item kernel") {
  auto f = make_facility_location(test::k3_kernel());
  BudgetSpec spec{BudgetSpec::Mode::cardinality, 2.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, Vector::Ones(3), spec);
  CHECK(sol.order == std::vector<int>{0, 2});
  REQUIRE(sol.gains.size() == 2);
  CHECK(sol.gains[0] == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(sol.gains[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(sol.cost == 2.0);
  CHECK(sol.stats.iterations == 2);
  CHECK(sol.stats.lazy);
  CHECK(sol.stats.memoized);
  CHECK_FALSE(sol.stats.lazy_fallback);
  CHECK(sol.stats.gain_evals >= 3);
  CHECK(sol.stats.wall_ms >= 0.0);
}

TEST_CASE("knapsack ratios and remaining budget") {
  auto f = make_facility_location(test::k3_kernel());
  Vector costs(3);
  costs << 1, 2, 1;
  BudgetSpec spec{BudgetSpec::Mode::knapsack, 2.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, costs, spec);
  // ratios at step one: 1.7, 0.8, 1.3 -> pick 0; item 1 no longer fits
  CHECK(sol.order == std::vector<int>{0, 2});
  CHECK(sol.cost == 2.0);
  CHECK_FALSE(sol.stats.singleton_patch);
}

TEST_CASE("knapsack prefers the best feasible singleton when ratios mislead") {
  Vector scores(2);
  scores << 1.5, 10.0;
  auto f = make_modular(scores);
  Vector costs(2);
  costs << 1, 10;
  BudgetSpec spec{BudgetSpec::Mode::knapsack, 10.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, costs, spec);
  // ratio rule takes item 0 first (1.5 > 1.0) and then cannot afford item 1;
  // the singleton {1} is worth 10 > 1.5, so it replaces the greedy run.
  CHECK(sol.order == std::vector<int>{1});
  CHECK(sol.objective == doctest::Approx(10.0));
  CHECK(sol.cost == 10.0);
  CHECK(sol.stats.singleton_patch);
}

TEST_CASE("modular budget greedy sorts by score") {
  Vector scores(3);
  scores << 0.3, 0.9, 0.1;
  auto f = make_modular(scores);
  BudgetSpec spec{BudgetSpec::Mode::cardinality, 2.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, Vector::Ones(3), spec);
  CHECK(sol.order == std::vector<int>{1, 0});
  CHECK(sol.objective == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("budget validation") {
  auto f = make_facility_location(test::k3_kernel());
  BudgetSpec bad{BudgetSpec::Mode::cardinality, 2.5, std::nullopt};
  CHECK_THROWS_WITH_AS(greedy_budget(*f, Vector::Ones(3), bad),
                       doctest::Contains("must be an integer"), Error);
  BudgetSpec zero{BudgetSpec::Mode::cardinality, 0.0, std::nullopt};
  CHECK_THROWS_WITH_AS(greedy_budget(*f, Vector::Ones(3), zero),
                       doctest::Contains("budget must be positive"), Error);
  BudgetSpec ok{BudgetSpec::Mode::cardinality, 2.0, std::nullopt};
  CHECK_THROWS_WITH_AS(greedy_budget(*f, Vector::Ones(2), ok),
                       doctest::Contains("length must match"), Error);
  Vector negcosts(3);
  negcosts << 1, -1, 1;
  CHECK_THROWS_AS(greedy_budget(*f, negcosts, ok), Error);
}

TEST_CASE("budget larger than the ground set selects everything") {
  auto f = make_facility_location(test::k3_kernel());
  BudgetSpec spec{BudgetSpec::Mode::cardinality, 50.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, Vector::Ones(3), spec);
  CHECK(sol.order.size() == 3);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("knapsack below every cost returns the infeasible flag") {
  auto f = make_facility_location(test::k3_kernel());
  Vector costs(3);
  costs << 5, 5, 5;
  BudgetSpec spec{BudgetSpec::Mode::knapsack, 2.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, costs, spec);
  CHECK(sol.order.empty());
  CHECK(sol.objective == 0.0);
  CHECK(sol.stats.infeasible);
}

TEST_CASE("non-monotone kinds stop at negative gains by default") {
  // graph_cut at this lambda takes item 0 (gain 0.19) and then every
  // remaining gain is negative, so the run stops short of the budget
  auto f = make_graph_cut(test::k3_kernel(), 0.7);
  BudgetSpec spec{BudgetSpec::Mode::cardinality, 3.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, Vector::Ones(3), spec);
  CHECK(sol.order == std::vector<int>{0});
  REQUIRE(sol.gains.size() == 1);
  CHECK(sol.gains[0] == doctest::Approx(0.19).epsilon(1e-12));

  // forcing the stop off fills the budget regardless
  BudgetSpec forced{BudgetSpec::Mode::cardinality, 3.0, false};
  SummarySolution full = greedy_budget(*f, Vector::Ones(3), forced);
  CHECK(full.order.size() == 3);
}

TEST_CASE("lazy and eager agree across submodular kinds") {
  Rng rng(17);
  for (FunctionKind kind : all_function_kinds()) {
    if (!is_dispersion_kind(kind)) {
      auto inst = test::random_instance(kind, 30, rng);
      if (!inst.f->traits().submodular) continue;
      BudgetSpec spec{BudgetSpec::Mode::cardinality, 8.0, std::nullopt};
      SummarySolution lazy = greedy_budget(*inst.f, Vector::Ones(30), spec,
                                           {true, true});
      SummarySolution eager = greedy_budget(*inst.f, Vector::Ones(30), spec,
                                            {false, true});
      SummarySolution naive = greedy_budget(*inst.f, Vector::Ones(30), spec,
                                            {false, false});
      CHECK(lazy.order == eager.order);
      CHECK(eager.order == naive.order);
      CHECK(lazy.stats.lazy);
      CHECK_FALSE(eager.stats.lazy);
      CHECK_FALSE(naive.stats.memoized);
      CHECK(lazy.objective == doctest::Approx(eager.objective).epsilon(1e-9));
      // lazy evaluates no more often than eager
      CHECK(lazy.stats.gain_evals <= eager.stats.gain_evals);
    }
  }
}

TEST_CASE("lazy request on a non-submodular kind falls back and records it") {
  auto d = test::k3_distance();
  auto f = make_disparity(FunctionKind::disparity_sum, d);
  BudgetSpec spec{BudgetSpec::Mode::cardinality, 2.0, std::nullopt};
  SummarySolution sol = greedy_budget(*f, Vector::Ones(3), spec, {true, true});
  CHECK_FALSE(sol.stats.lazy);
  CHECK(sol.stats.lazy_fallback);
}

TEST_CASE("gains recorded along the run match fresh evaluation deltas") {
  Rng rng(23);
  for (FunctionKind kind : all_function_kinds()) {
    if (is_dispersion_kind(kind)) continue;
    auto inst = test::random_instance(kind, 20, rng);
    BudgetSpec spec{BudgetSpec::Mode::cardinality, 6.0, std::nullopt};
    SummarySolution sol = greedy_budget(*inst.f, Vector::Ones(20), spec);
    std::vector<int> prefix;
    for (std::size_t t = 0; t < sol.order.size(); ++t) {
      double before = inst.f->evaluate(prefix);
      prefix.push_back(sol.order[t]);
      double after = inst.f->evaluate(prefix);
      double tol = kind == FunctionKind::dpp_logdet
                       ? 1e-9 + 1e-6 * std::abs(after - before)
                       : 1e-9;
      CHECK(std::abs(sol.gains[t] - (after - before)) <= tol);
    }
    CHECK(sol.objective == doctest::Approx(inst.f->evaluate(sol.order))
                               .epsilon(1e-8));
  }
}

TEST_CASE("cover greedy walks to the target fraction") {
  std::vector<std::vector<int>> labels = {{0, 1}, {1, 2}, {2}};
  auto sc = make_set_cover(labels, Vector::Ones(3));
  SummarySolution sol = greedy_cover(*sc, {1.0, 1e-9});
  CHECK(sol.order == std::vector<int>{0, 1});  // tie between 1 and 2 -> 1
  CHECK(sol.objective == doctest::Approx(3.0));

  auto fl = make_facility_location(test::k3_kernel());
  SummarySolution partial = greedy_cover(*fl, {0.9, 1e-9});
  CHECK(partial.order == std::vector<int>{0, 2, 1});  // 2.5 < 2.7 target <= 3.0
  CHECK(partial.objective == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("cover on a single item ground set") {
  Matrix one = Matrix::Ones(1, 1);
  auto f = make_facility_location(std::make_shared<SimilarityKernel>(
      SimilarityKernel::from_dense(one)));
  SummarySolution sol = greedy_cover(*f, {1.0, 1e-9});
  CHECK(sol.order == std::vector<int>{0});
}

TEST_CASE("cover rejects bad tau and non-monotone kinds") {
  auto fl = make_facility_location(test::k3_kernel());
  CHECK_THROWS_WITH_AS(greedy_cover(*fl, {0.0, 1e-9}),
                       doctest::Contains("tau must lie in (0, 1]"), Error);
  CHECK_THROWS_WITH_AS(greedy_cover(*fl, {1.5, 1e-9}),
                       doctest::Contains("tau must lie in (0, 1]"), Error);
  auto gc = make_graph_cut(test::k3_kernel(), 1.0);
  CHECK_THROWS_WITH_AS(greedy_cover(*gc, {1.0, 1e-9}),
                       doctest::Contains("monotone"), Error);
}

TEST_CASE("dispersion greedy seeds at the max row sum then spreads") {
  auto d = test::k3_distance();
  auto f = make_disparity(FunctionKind::disparity_min, d);
  SummarySolution sol = dispersion_greedy(*f, 2);
  CHECK(sol.order == std::vector<int>{2, 1});  // row sums [1.3, 1.4, 1.7]
  CHECK(sol.objective == doctest::Approx(0.9).epsilon(1e-12));

  SummarySolution all = dispersion_greedy(*f, 3);
  CHECK(all.order.size() == 3);
  CHECK(all.objective == doctest::Approx(0.5).epsilon(1e-12));

  SummarySolution one = dispersion_greedy(*f, 1);
  CHECK(one.order == std::vector<int>{2});
  CHECK(one.objective == 0.0);

  CHECK_THROWS_WITH_AS(dispersion_greedy(*f, 4),
                       doctest::Contains("exceeds ground set size"), Error);
  CHECK_THROWS_WITH_AS(dispersion_greedy(*f, 0),
                       doctest::Contains("must be >= 1"), Error);

  auto fl = make_facility_location(test::k3_kernel());
  CHECK_THROWS_WITH_AS(dispersion_greedy(*fl, 2),
                       doctest::Contains("disparity objective"), Error);
}

TEST_CASE("dispersion greedy handles identical items") {
  Matrix d(2, 2);
  d << 0, 0,
       0, 0;
  auto dist = std::make_shared<DistanceMatrix>(Matrix(d));
  auto f = make_disparity(FunctionKind::disparity_min, dist);
  SummarySolution sol = dispersion_greedy(*f, 2);
  CHECK(sol.order == std::vector<int>{0, 1});
  CHECK(sol.objective == 0.0);
}

TEST_CASE("dispersion sum rule accumulates distances") {
  auto d = test::k3_distance();
  auto f = make_disparity(FunctionKind::disparity_sum, d);
  SummarySolution sol = dispersion_greedy(*f, 3);
  CHECK(sol.order.size() == 3);
  CHECK(sol.order[0] == 2);
  CHECK(sol.objective == doctest::Approx(2.2).epsilon(1e-12));
}

TEST_CASE("memoized and naive dispersion arms pick the same items") {
  Rng rng(31);
  for (FunctionKind kind :
       {FunctionKind::disparity_min, FunctionKind::disparity_sum,
        FunctionKind::disparity_min_sum}) {
    auto inst = test::random_instance(kind, 25, rng);
    SummarySolution memo = dispersion_greedy(*inst.f, 7, {true, true});
    SummarySolution naive = dispersion_greedy(*inst.f, 7, {true, false});
    CHECK(memo.order == naive.order);
    for (std::size_t t = 0; t < memo.gains.size(); ++t)
      CHECK(memo.gains[t] == doctest::Approx(naive.gains[t]).epsilon(1e-9));
  }
}

TEST_CASE("exhaustive oracle enumerates small instances") {
  auto f = make_facility_location(test::k3_kernel());
  auto [best, value] = exhaustive_oracle(*f, 2);
  CHECK(best == std::vector<int>{0, 2});
  CHECK(value == doctest::Approx(2.5).epsilon(1e-12));

  auto [none, zero] = exhaustive_oracle(*f, 0);
  CHECK(none.empty());
  CHECK(zero == 0.0);

  Vector scores(4);
  scores << 0.3, 0.9, 0.1, 0.4;
  auto mod = make_modular(scores);
  auto [top, sum] = exhaustive_oracle(*mod, 2);
  CHECK(top == std::vector<int>{1, 3});
  CHECK(sum == doctest::Approx(1.3).epsilon(1e-12));

  Rng rng(5);
  auto big = test::random_instance(FunctionKind::facility_location, 21, rng);
  CHECK_THROWS_WITH_AS(exhaustive_oracle(*big.f, 2),
                       doctest::Contains("capped at 20"), Error);
}

TEST_CASE("solvers are deterministic across repeat runs") {
  Rng rng(47);
  auto inst = test::random_instance(FunctionKind::saturated_coverage, 40, rng);
  BudgetSpec spec{BudgetSpec::Mode::cardinality, 10.0, std::nullopt};
  SummarySolution a = greedy_budget(*inst.f, Vector::Ones(40), spec);
  SummarySolution b = greedy_budget(*inst.f, Vector::Ones(40), spec);
  CHECK(a.order == b.order);
  CHECK(a.objective == b.objective);  // bit-identical
  CHECK(a.gains == b.gains);
}

TEST_CASE("mismatched cost vector is rejected") {
  auto f = make_facility_location(test::k3_kernel());
  BudgetSpec spec{BudgetSpec::Mode::cardinality, 1.0, std::nullopt};
  CHECK_THROWS_AS(greedy_budget(*f, Vector(), spec), Error);
}
