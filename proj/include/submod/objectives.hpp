#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "submod/common.hpp"
#include "submod/kernel.hpp"

namespace submod {

struct GroundSet;

// Set-function families. `mixture` only appears as the kind of a WeightedSum;
// the eleven concrete kinds are what make_objective accepts.
enum class FunctionKind {
  facility_location,
  saturated_coverage,
  graph_cut,
  feature_based,
  set_cover,
  prob_set_cover,
  dpp_logdet,
  disparity_min,
  disparity_sum,
  disparity_min_sum,
  modular,
  mixture,
};

const char* kind_name(FunctionKind kind);
FunctionKind kind_from_name(const std::string& name);
std::vector<FunctionKind> all_function_kinds();

// Dispersion kinds are optimized by farthest-point insertion, not plain greedy.
bool is_dispersion_kind(FunctionKind kind);

struct Traits {
  bool monotone = false;
  bool submodular = false;
};

// Concave shapes for the feature-based function.
enum class Psi { sqrt_fn, log1p_fn, inverse_fn, identity_fn };

Psi psi_from_name(const std::string& name);
const char* psi_name(Psi psi);
double apply_psi(Psi psi, double x);

struct ObjectiveParams {
  double alpha = 0.2;            // saturated_coverage: threshold fraction of row mass
  double lambda = 1.0;           // graph_cut: representation/diversity tradeoff
  Psi psi = Psi::sqrt_fn;        // feature_based concave shape
  double dpp_jitter = 1e-6;      // diagonal added before Cholesky
  std::string feature_modality;  // feature_based source; default: first histogram
};

// Incremental statistics for one greedy run: the selected set in insertion
// order plus whatever kind-specific accumulators make marginal gains cheap.
class GainState {
 public:
  virtual ~GainState() = default;
  const std::vector<int>& selected() const { return selected_; }
  int size() const { return static_cast<int>(selected_.size()); }
  bool contains(int j) const { return member_[j] != 0; }

 protected:
  explicit GainState(int n) : member_(n, 0) {}
  void record(int j) {
    selected_.push_back(j);
    member_[j] = 1;
  }
  std::vector<int> selected_;
  std::vector<char> member_;
  friend class SetFunction;
};

class SetFunction {
 public:
  virtual ~SetFunction() = default;

  virtual FunctionKind kind() const = 0;
  virtual Traits traits() const = 0;
  virtual int ground_size() const = 0;

  // Full evaluation from scratch; the ground truth every fast path answers to.
  virtual double evaluate(std::span<const int> items) const = 0;

  virtual std::unique_ptr<GainState> make_state() const = 0;
  // Marginal value of adding j, answered from the state's statistics.
  virtual double gain(const GainState& state, int j) const = 0;
  // Advance the statistics to X ∪ {j}.
  virtual void commit(GainState& state, int j) const = 0;

  // Two full evaluations; the oracle the memoized gain is tested against.
  double gain_naive(std::span<const int> items, int j) const;
  double gain_naive(const GainState& state, int j) const;

  // Non-null only for dispersion kinds (and mixtures containing one).
  virtual const DistanceMatrix* dispersion_distance() const { return nullptr; }

 protected:
  static void record_selection(GainState& state, int j) { state.record(j); }
  void check_items(std::span<const int> items) const;
  void check_candidate(const GainState& state, int j) const;
};

std::unique_ptr<SetFunction> make_facility_location(
    std::shared_ptr<const SimilarityKernel> kernel);
std::unique_ptr<SetFunction> make_saturated_coverage(
    std::shared_ptr<const SimilarityKernel> kernel, double alpha);
std::unique_ptr<SetFunction> make_graph_cut(
    std::shared_ptr<const SimilarityKernel> kernel, double lambda);
std::unique_ptr<SetFunction> make_feature_based(Matrix features, Psi psi);
std::unique_ptr<SetFunction> make_set_cover(std::vector<std::vector<int>> labels,
                                            Vector weights);
std::unique_ptr<SetFunction> make_prob_set_cover(Matrix probabilities,
                                                 Vector weights);
std::unique_ptr<SetFunction> make_dpp_logdet(
    std::shared_ptr<const SimilarityKernel> kernel, double jitter);
std::unique_ptr<SetFunction> make_disparity(
    FunctionKind kind, std::shared_ptr<const DistanceMatrix> distance);
std::unique_ptr<SetFunction> make_modular(Vector scores);
std::unique_ptr<SetFunction> make_weighted_sum(
    std::vector<std::pair<std::unique_ptr<SetFunction>, double>> parts);

// Wire a kind to the ground data it needs, with kernel/distance built upstream.
std::unique_ptr<SetFunction> make_objective(
    FunctionKind kind, const GroundSet& gs,
    std::shared_ptr<const SimilarityKernel> kernel,
    std::shared_ptr<const DistanceMatrix> distance,
    const ObjectiveParams& params);

}  // namespace submod
