#include "submod/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "submod/ground_set.hpp"

namespace submod {

namespace {

struct KindName {
  FunctionKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {FunctionKind::facility_location, "facility_location"},
    {FunctionKind::saturated_coverage, "saturated_coverage"},
    {FunctionKind::graph_cut, "graph_cut"},
    {FunctionKind::feature_based, "feature_based"},
    {FunctionKind::set_cover, "set_cover"},
    {FunctionKind::prob_set_cover, "prob_set_cover"},
    {FunctionKind::dpp_logdet, "dpp_logdet"},
    {FunctionKind::disparity_min, "disparity_min"},
    {FunctionKind::disparity_sum, "disparity_sum"},
    {FunctionKind::disparity_min_sum, "disparity_min_sum"},
    {FunctionKind::modular, "modular"},
    {FunctionKind::mixture, "mixture"},
};

}  // namespace

const char* kind_name(FunctionKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

FunctionKind kind_from_name(const std::string& name) {
  for (const auto& kn : kKindNames)
    if (name == kn.name && kn.kind != FunctionKind::mixture) return kn.kind;
  throw Error("unknown function kind: " + name);
}

std::vector<FunctionKind> all_function_kinds() {
  std::vector<FunctionKind> out;
  for (const auto& kn : kKindNames)
    if (kn.kind != FunctionKind::mixture) out.push_back(kn.kind);
  return out;
}

bool is_dispersion_kind(FunctionKind kind) {
  return kind == FunctionKind::disparity_min ||
         kind == FunctionKind::disparity_sum ||
         kind == FunctionKind::disparity_min_sum;
}

Psi psi_from_name(const std::string& name) {
  if (name == "sqrt") return Psi::sqrt_fn;
  if (name == "log1p") return Psi::log1p_fn;
  if (name == "inverse") return Psi::inverse_fn;
  if (name == "identity") return Psi::identity_fn;
  throw Error("unknown psi: " + name + " (expected sqrt, log1p, inverse, identity)");
}

const char* psi_name(Psi psi) {
  switch (psi) {
    case Psi::sqrt_fn: return "sqrt";
    case Psi::log1p_fn: return "log1p";
    case Psi::inverse_fn: return "inverse";
    case Psi::identity_fn: return "identity";
  }
  return "unknown";
}

double apply_psi(Psi psi, double x) {
  switch (psi) {
    case Psi::sqrt_fn: return std::sqrt(x);
    case Psi::log1p_fn: return std::log1p(x);
    case Psi::inverse_fn: return x / (1.0 + x);
    case Psi::identity_fn: return x;
  }
  return x;
}

void SetFunction::check_items(std::span<const int> items) const {
  const int n = ground_size();
  for (int x : items)
    if (x < 0 || x >= n) throw Error("item index out of range: " + std::to_string(x));
  if (items.size() > 1) {
    std::vector<int> sorted(items.begin(), items.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error("duplicate item in set");
  }
}

void SetFunction::check_candidate(const GainState& state, int j) const {
  if (j < 0 || j >= ground_size())
    throw Error("item index out of range: " + std::to_string(j));
  if (state.contains(j))
    throw Error("item already selected: " + std::to_string(j));
}

double SetFunction::gain_naive(std::span<const int> items, int j) const {
  for (int x : items)
    if (x == j) throw Error("item already selected: " + std::to_string(j));
  std::vector<int> with(items.begin(), items.end());
  with.push_back(j);
  return evaluate(with) - evaluate(items);
}

double SetFunction::gain_naive(const GainState& state, int j) const {
  check_candidate(state, j);
  return gain_naive(std::span<const int>(state.selected()), j);
}

namespace {

// ---------------------------------------------------------------- facility location

struct FacLocState final : GainState {
  explicit FacLocState(int n) : GainState(n), best(Vector::Zero(n)) {}
  Vector best;  // best[i] = max_{j in X} s_ij
};

class FacilityLocation final : public SetFunction {
 public:
  explicit FacilityLocation(std::shared_ptr<const SimilarityKernel> kernel)
      : kernel_(std::move(kernel)) {
    if (!kernel_) throw Error("facility_location needs a similarity kernel");
  }

  FunctionKind kind() const override { return FunctionKind::facility_location; }
  Traits traits() const override { return {true, true}; }
  int ground_size() const override { return kernel_->size(); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    Vector best = Vector::Zero(ground_size());
    for (int j : items)
      kernel_->for_each_in_column(j, [&](int i, double s) {
        if (s > best[i]) best[i] = s;
      });
    return best.sum();
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<FacLocState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const FacLocState&>(state);
    double total = 0.0;
    kernel_->for_each_in_column(j, [&](int i, double s) {
      if (s > st.best[i]) total += s - st.best[i];
    });
    return total;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<FacLocState&>(state);
    kernel_->for_each_in_column(j, [&](int i, double s) {
      if (s > st.best[i]) st.best[i] = s;
    });
    record_selection(state, j);
  }

 private:
  std::shared_ptr<const SimilarityKernel> kernel_;
};

// ---------------------------------------------------------------- saturated coverage

struct SatCovState final : GainState {
  explicit SatCovState(int n) : GainState(n), covsum(Vector::Zero(n)) {}
  Vector covsum;  // covsum[i] = sum_{j in X} s_ij
};

class SaturatedCoverage final : public SetFunction {
 public:
  SaturatedCoverage(std::shared_ptr<const SimilarityKernel> kernel, double alpha)
      : kernel_(std::move(kernel)) {
    if (!kernel_) throw Error("saturated_coverage needs a similarity kernel");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw Error("saturated_coverage alpha must be nonnegative");
    const int n = kernel_->size();
    cap_ = Vector::Zero(n);
    for (int j = 0; j < n; ++j)
      kernel_->for_each_in_column(j, [&](int i, double s) { cap_[i] += s; });
    cap_ *= alpha;
  }

  FunctionKind kind() const override { return FunctionKind::saturated_coverage; }
  Traits traits() const override { return {true, true}; }
  int ground_size() const override { return kernel_->size(); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    Vector covsum = Vector::Zero(ground_size());
    for (int j : items)
      kernel_->for_each_in_column(j, [&](int i, double s) { covsum[i] += s; });
    double total = 0.0;
    for (int i = 0; i < ground_size(); ++i)
      total += std::min(covsum[i], cap_[i]);
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<SatCovState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const SatCovState&>(state);
    double total = 0.0;
    kernel_->for_each_in_column(j, [&](int i, double s) {
      total += std::min(st.covsum[i] + s, cap_[i]) - std::min(st.covsum[i], cap_[i]);
    });
    return total;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<SatCovState&>(state);
    kernel_->for_each_in_column(j, [&](int i, double s) { st.covsum[i] += s; });
    record_selection(state, j);
  }

 private:
  std::shared_ptr<const SimilarityKernel> kernel_;
  Vector cap_;  // cap_[i] = alpha * sum_j s_ij
};

// ---------------------------------------------------------------- graph cut

struct GraphCutState final : GainState {
  explicit GraphCutState(int n) : GainState(n), xsum(Vector::Zero(n)) {}
  Vector xsum;  // xsum[i] = sum_{j in X} s_ij
};

class GraphCut final : public SetFunction {
 public:
  GraphCut(std::shared_ptr<const SimilarityKernel> kernel, double lambda)
      : kernel_(std::move(kernel)), lambda_(lambda) {
    if (!kernel_) throw Error("graph_cut needs a similarity kernel");
    if (!std::isfinite(lambda_)) throw Error("graph_cut lambda must be finite");
    const int n = kernel_->size();
    colsum_ = Vector::Zero(n);
    for (int j = 0; j < n; ++j) colsum_[j] = kernel_->column_sum(j);
  }

  FunctionKind kind() const override { return FunctionKind::graph_cut; }
  Traits traits() const override { return {false, true}; }
  int ground_size() const override { return kernel_->size(); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    double attract = 0.0;
    for (int j : items) attract += colsum_[j];
    Vector xsum = Vector::Zero(ground_size());
    for (int j : items)
      kernel_->for_each_in_column(j, [&](int i, double s) { xsum[i] += s; });
    double internal = 0.0;
    for (int j : items) internal += xsum[j];
    return lambda_ * attract - internal;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<GraphCutState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const GraphCutState&>(state);
    return lambda_ * colsum_[j] - 2.0 * st.xsum[j] - kernel_->at(j, j);
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<GraphCutState&>(state);
    kernel_->for_each_in_column(j, [&](int i, double s) { st.xsum[i] += s; });
    record_selection(state, j);
  }

 private:
  std::shared_ptr<const SimilarityKernel> kernel_;
  double lambda_;
  Vector colsum_;
};

// ---------------------------------------------------------------- feature based

struct FeatureState final : GainState {
  FeatureState(int n, int d) : GainState(n), acc(Vector::Zero(d)) {}
  Vector acc;  // acc[f] = sum_{j in X} q_jf
};

class FeatureBased final : public SetFunction {
 public:
  FeatureBased(Matrix features, Psi psi)
      : features_(std::move(features)), psi_(psi) {
    if (features_.rows() < 1) throw Error("feature_based needs a nonempty feature matrix");
    if (!features_.allFinite() || features_.minCoeff() < 0)
      throw Error("feature_based needs nonnegative finite features");
  }

  FunctionKind kind() const override { return FunctionKind::feature_based; }
  Traits traits() const override { return {true, true}; }
  int ground_size() const override { return static_cast<int>(features_.rows()); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    Vector acc = Vector::Zero(features_.cols());
    for (int j : items) acc += features_.row(j);
    double total = 0.0;
    for (int f = 0; f < acc.size(); ++f) total += apply_psi(psi_, acc[f]);
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<FeatureState>(ground_size(),
                                          static_cast<int>(features_.cols()));
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const FeatureState&>(state);
    double total = 0.0;
    for (int f = 0; f < st.acc.size(); ++f)
      total += apply_psi(psi_, st.acc[f] + features_(j, f)) - apply_psi(psi_, st.acc[f]);
    return total;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<FeatureState&>(state);
    st.acc += features_.row(j);
    record_selection(state, j);
  }

 private:
  Matrix features_;
  Psi psi_;
};

// ---------------------------------------------------------------- set cover

struct SetCoverState final : GainState {
  SetCoverState(int n, int universe) : GainState(n), covered(universe, 0) {}
  std::vector<char> covered;
};

class SetCover final : public SetFunction {
 public:
  SetCover(std::vector<std::vector<int>> labels, Vector weights)
      : labels_(std::move(labels)), weights_(std::move(weights)) {
    if (labels_.empty()) throw Error("set_cover needs a nonempty ground set");
    for (auto& row : labels_) {
      std::sort(row.begin(), row.end());
      for (int u : row)
        if (u < 0 || u >= weights_.size())
          throw Error("set_cover concept index out of range");
    }
    if (weights_.size() < 1 || !weights_.allFinite() || weights_.minCoeff() < 0)
      throw Error("set_cover needs nonnegative concept weights");
  }

  FunctionKind kind() const override { return FunctionKind::set_cover; }
  Traits traits() const override { return {true, true}; }
  int ground_size() const override { return static_cast<int>(labels_.size()); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    std::vector<char> covered(weights_.size(), 0);
    for (int j : items)
      for (int u : labels_[j]) covered[u] = 1;
    double total = 0.0;
    for (int u = 0; u < weights_.size(); ++u)
      if (covered[u]) total += weights_[u];
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<SetCoverState>(ground_size(),
                                           static_cast<int>(weights_.size()));
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const SetCoverState&>(state);
    double total = 0.0;
    for (int u : labels_[j])
      if (!st.covered[u]) total += weights_[u];
    return total;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<SetCoverState&>(state);
    for (int u : labels_[j]) st.covered[u] = 1;
    record_selection(state, j);
  }

 private:
  std::vector<std::vector<int>> labels_;
  Vector weights_;
};

// ---------------------------------------------------------------- probabilistic set cover

struct ProbCoverState final : GainState {
  ProbCoverState(int n, int universe)
      : GainState(n), miss(Vector::Ones(universe)) {}
  Vector miss;  // miss[u] = prod_{j in X} (1 - p_ju)
};

class ProbSetCover final : public SetFunction {
 public:
  ProbSetCover(Matrix probabilities, Vector weights)
      : probs_(std::move(probabilities)), weights_(std::move(weights)) {
    if (probs_.rows() < 1) throw Error("prob_set_cover needs a nonempty ground set");
    if (probs_.cols() != weights_.size())
      throw Error("prob_set_cover probability columns must match concept count");
    if (!probs_.allFinite() || probs_.minCoeff() < 0 || probs_.maxCoeff() > 1)
      throw Error("prob_set_cover probabilities must lie in [0,1]");
    if (!weights_.allFinite() || (weights_.size() && weights_.minCoeff() < 0))
      throw Error("prob_set_cover needs nonnegative concept weights");
  }

  FunctionKind kind() const override { return FunctionKind::prob_set_cover; }
  Traits traits() const override { return {true, true}; }
  int ground_size() const override { return static_cast<int>(probs_.rows()); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    double total = 0.0;
    for (int u = 0; u < probs_.cols(); ++u) {
      double miss = 1.0;
      for (int j : items) miss *= 1.0 - probs_(j, u);
      total += weights_[u] * (1.0 - miss);
    }
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<ProbCoverState>(ground_size(),
                                            static_cast<int>(probs_.cols()));
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const ProbCoverState&>(state);
    double total = 0.0;
    for (int u = 0; u < probs_.cols(); ++u)
      total += weights_[u] * st.miss[u] * probs_(j, u);
    return total;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<ProbCoverState&>(state);
    for (int u = 0; u < probs_.cols(); ++u) st.miss[u] *= 1.0 - probs_(j, u);
    record_selection(state, j);
  }

 private:
  Matrix probs_;
  Vector weights_;
};

// ---------------------------------------------------------------- dpp log det

struct DppState final : GainState {
  explicit DppState(int n) : GainState(n) {}
  // Lower-triangular Cholesky factor of S_XX + eps*I in packed row-major
  // order: row t occupies entries [t(t+1)/2, t(t+1)/2 + t].
  std::vector<double> chol;
};

class DppLogDet final : public SetFunction {
 public:
  DppLogDet(std::shared_ptr<const SimilarityKernel> kernel, double jitter)
      : kernel_(std::move(kernel)), jitter_(jitter) {
    if (!kernel_) throw Error("dpp_logdet needs a similarity kernel");
    if (kernel_->is_sparse()) throw Error("dpp_logdet requires a dense kernel");
    if (jitter_ < 0 || !std::isfinite(jitter_))
      throw Error("dpp_logdet jitter must be nonnegative");
  }

  FunctionKind kind() const override { return FunctionKind::dpp_logdet; }
  Traits traits() const override { return {false, true}; }
  int ground_size() const override { return kernel_->size(); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    if (items.empty()) return 0.0;
    const int k = static_cast<int>(items.size());
    Matrix sub(k, k);
    const Matrix& s = kernel_->dense_matrix();
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) sub(a, b) = s(items[a], items[b]);
    sub.diagonal().array() += jitter_;
    Eigen::LLT<Matrix> llt(sub);
    if (llt.info() != Eigen::Success)
      throw Error("dpp_logdet: kernel submatrix is not positive definite");
    double logdet = 0.0;
    for (int a = 0; a < k; ++a) logdet += 2.0 * std::log(llt.matrixL()(a, a));
    return logdet;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<DppState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const DppState&>(state);
    double schur;
    schur_complement(st, j, nullptr, &schur);
    if (schur <= 0.0)
      throw Error("dpp_logdet: kernel not positive definite when adding item " +
                  std::to_string(j));
    return std::log(schur);
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<DppState&>(state);
    std::vector<double> row(st.size());
    double schur;
    schur_complement(st, j, &row, &schur);
    if (schur <= 0.0)
      throw Error("dpp_logdet: kernel not positive definite when adding item " +
                  std::to_string(j));
    st.chol.insert(st.chol.end(), row.begin(), row.end());
    st.chol.push_back(std::sqrt(schur));
    record_selection(state, j);
  }

 private:
  // Solve L c = S_{X,j} by forward substitution; schur = S_jj + eps - |c|^2.
  void schur_complement(const DppState& st, int j, std::vector<double>* c_out,
                        double* schur_out) const {
    const int k = st.size();
    const Matrix& s = kernel_->dense_matrix();
    std::vector<double> c(k);
    double csq = 0.0;
    for (int t = 0; t < k; ++t) {
      const double* lrow = st.chol.data() + t * (t + 1) / 2;
      double v = s(st.selected()[t], j);
      for (int r = 0; r < t; ++r) v -= lrow[r] * c[r];
      c[t] = v / lrow[t];
      csq += c[t] * c[t];
    }
    if (c_out) *c_out = std::move(c);
    *schur_out = s(j, j) + jitter_ - csq;
  }

  std::shared_ptr<const SimilarityKernel> kernel_;
  double jitter_;
};

// ---------------------------------------------------------------- dispersion family

struct DisparityMinState final : GainState {
  explicit DisparityMinState(int n)
      : GainState(n),
        cur_min(std::numeric_limits<double>::infinity()),
        cand_min(Vector::Constant(n, std::numeric_limits<double>::infinity())) {}
  double cur_min;   // min pairwise distance inside X (inf while |X| < 2)
  Vector cand_min;  // cand_min[j] = min_{k in X} d_kj
};

class DisparityMin final : public SetFunction {
 public:
  explicit DisparityMin(std::shared_ptr<const DistanceMatrix> dist)
      : dist_(std::move(dist)) {
    if (!dist_) throw Error("disparity_min needs a distance matrix");
  }

  FunctionKind kind() const override { return FunctionKind::disparity_min; }
  Traits traits() const override { return {false, false}; }
  int ground_size() const override { return dist_->size(); }
  const DistanceMatrix* dispersion_distance() const override { return dist_.get(); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    if (items.size() < 2) return 0.0;
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < items.size(); ++a)
      for (std::size_t b = a + 1; b < items.size(); ++b)
        mn = std::min(mn, dist_->at(items[a], items[b]));
    return mn;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<DisparityMinState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const DisparityMinState&>(state);
    const int k = st.size();
    if (k == 0) return 0.0;
    double after = std::min(st.cur_min, st.cand_min[j]);
    double before = k < 2 ? 0.0 : st.cur_min;
    return after - before;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<DisparityMinState&>(state);
    if (st.size() >= 1) st.cur_min = std::min(st.cur_min, st.cand_min[j]);
    for (int i = 0; i < ground_size(); ++i)
      st.cand_min[i] = std::min(st.cand_min[i], dist_->at(j, i));
    record_selection(state, j);
  }

 private:
  std::shared_ptr<const DistanceMatrix> dist_;
};

struct DisparitySumState final : GainState {
  explicit DisparitySumState(int n) : GainState(n), cand_sum(Vector::Zero(n)) {}
  Vector cand_sum;  // cand_sum[j] = sum_{k in X} d_kj
};

class DisparitySum final : public SetFunction {
 public:
  explicit DisparitySum(std::shared_ptr<const DistanceMatrix> dist)
      : dist_(std::move(dist)) {
    if (!dist_) throw Error("disparity_sum needs a distance matrix");
  }

  FunctionKind kind() const override { return FunctionKind::disparity_sum; }
  Traits traits() const override { return {true, false}; }  // supermodular
  int ground_size() const override { return dist_->size(); }
  const DistanceMatrix* dispersion_distance() const override { return dist_.get(); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    double total = 0.0;
    for (std::size_t a = 0; a < items.size(); ++a)
      for (std::size_t b = a + 1; b < items.size(); ++b)
        total += dist_->at(items[a], items[b]);
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<DisparitySumState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    return static_cast<const DisparitySumState&>(state).cand_sum[j];
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<DisparitySumState&>(state);
    for (int i = 0; i < ground_size(); ++i) st.cand_sum[i] += dist_->at(j, i);
    record_selection(state, j);
  }

 private:
  std::shared_ptr<const DistanceMatrix> dist_;
};

struct DisparityMinSumState final : GainState {
  explicit DisparityMinSumState(int n)
      : GainState(n),
        min_in(Vector::Constant(n, std::numeric_limits<double>::infinity())),
        cand_min(Vector::Constant(n, std::numeric_limits<double>::infinity())),
        value(0.0) {}
  Vector min_in;    // for k in X: min_{l in X, l != k} d_kl (inf while alone)
  Vector cand_min;  // cand_min[j] = min_{k in X} d_kj
  double value;     // current f(X)
};

class DisparityMinSum final : public SetFunction {
 public:
  explicit DisparityMinSum(std::shared_ptr<const DistanceMatrix> dist)
      : dist_(std::move(dist)) {
    if (!dist_) throw Error("disparity_min_sum needs a distance matrix");
  }

  FunctionKind kind() const override { return FunctionKind::disparity_min_sum; }
  // Not submodular: adding a close neighbour can *lower* an existing member's
  // nearest-distance term, so gains are not diminishing.  See README notes.
  Traits traits() const override { return {false, false}; }
  int ground_size() const override { return dist_->size(); }
  const DistanceMatrix* dispersion_distance() const override { return dist_.get(); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    if (items.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t a = 0; a < items.size(); ++a) {
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < items.size(); ++b)
        if (b != a) mn = std::min(mn, dist_->at(items[a], items[b]));
      total += mn;
    }
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<DisparityMinSumState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const DisparityMinSumState&>(state);
    if (st.size() == 0) return 0.0;
    return value_with(st, j) - st.value;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<DisparityMinSumState&>(state);
    if (st.size() > 0) {
      st.value = value_with(st, j);
      for (int x : st.selected())
        st.min_in[x] = std::min(st.min_in[x], dist_->at(x, j));
      st.min_in[j] = st.cand_min[j];
    }
    for (int i = 0; i < ground_size(); ++i)
      st.cand_min[i] = std::min(st.cand_min[i], dist_->at(j, i));
    record_selection(state, j);
  }

 private:
  // f(X ∪ {j}): every member's nearest-distance term may shrink to d(x,j);
  // the newcomer contributes its own nearest distance into X.
  double value_with(const DisparityMinSumState& st, int j) const {
    double total = st.cand_min[j];
    for (int x : st.selected())
      total += std::min(st.min_in[x], dist_->at(x, j));
    return total;
  }

  std::shared_ptr<const DistanceMatrix> dist_;
};

// ---------------------------------------------------------------- modular

struct ModularState final : GainState {
  explicit ModularState(int n) : GainState(n), sum(0.0) {}
  double sum;
};

class Modular final : public SetFunction {
 public:
  explicit Modular(Vector scores) : scores_(std::move(scores)) {
    if (scores_.size() < 1) throw Error("modular needs a nonempty score vector");
    if (!scores_.allFinite() || scores_.minCoeff() < 0)
      throw Error("modular needs nonnegative finite scores");
  }

  FunctionKind kind() const override { return FunctionKind::modular; }
  Traits traits() const override { return {true, true}; }
  int ground_size() const override { return static_cast<int>(scores_.size()); }

  double evaluate(std::span<const int> items) const override {
    check_items(items);
    double total = 0.0;
    for (int j : items) total += scores_[j];
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    return std::make_unique<ModularState>(ground_size());
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    return scores_[j];
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    static_cast<ModularState&>(state).sum += scores_[j];
    record_selection(state, j);
  }

 private:
  Vector scores_;
};

// ---------------------------------------------------------------- weighted sum

struct WeightedSumState final : GainState {
  explicit WeightedSumState(int n) : GainState(n) {}
  std::vector<std::unique_ptr<GainState>> parts;
};

class WeightedSum final : public SetFunction {
 public:
  explicit WeightedSum(
      std::vector<std::pair<std::unique_ptr<SetFunction>, double>> parts)
      : parts_(std::move(parts)) {
    if (parts_.empty()) throw Error("mixture needs at least one term");
    for (const auto& [f, coef] : parts_) {
      if (!f) throw Error("mixture term is null");
      if (coef < 0 || !std::isfinite(coef))
        throw Error("mixture coefficients must be nonnegative");
      if (f->ground_size() != parts_.front().first->ground_size())
        throw Error("mixture terms disagree on ground set size");
    }
  }

  FunctionKind kind() const override { return FunctionKind::mixture; }

  Traits traits() const override {
    Traits t{true, true};
    for (const auto& [f, coef] : parts_) {
      Traits ft = f->traits();
      t.monotone = t.monotone && ft.monotone;
      t.submodular = t.submodular && ft.submodular;
    }
    return t;
  }

  int ground_size() const override { return parts_.front().first->ground_size(); }

  double evaluate(std::span<const int> items) const override {
    double total = 0.0;
    for (const auto& [f, coef] : parts_) total += coef * f->evaluate(items);
    return total;
  }

  std::unique_ptr<GainState> make_state() const override {
    auto st = std::make_unique<WeightedSumState>(ground_size());
    for (const auto& [f, coef] : parts_) st->parts.push_back(f->make_state());
    return st;
  }

  double gain(const GainState& state, int j) const override {
    check_candidate(state, j);
    const auto& st = static_cast<const WeightedSumState&>(state);
    double total = 0.0;
    for (std::size_t t = 0; t < parts_.size(); ++t)
      total += parts_[t].second * parts_[t].first->gain(*st.parts[t], j);
    return total;
  }

  void commit(GainState& state, int j) const override {
    check_candidate(state, j);
    auto& st = static_cast<WeightedSumState&>(state);
    for (std::size_t t = 0; t < parts_.size(); ++t)
      parts_[t].first->commit(*st.parts[t], j);
    record_selection(state, j);
  }

  const DistanceMatrix* dispersion_distance() const override {
    for (const auto& [f, coef] : parts_)
      if (const DistanceMatrix* d = f->dispersion_distance()) return d;
    return nullptr;
  }

 private:
  std::vector<std::pair<std::unique_ptr<SetFunction>, double>> parts_;
};

}  // namespace

std::unique_ptr<SetFunction> make_facility_location(
    std::shared_ptr<const SimilarityKernel> kernel) {
  return std::make_unique<FacilityLocation>(std::move(kernel));
}

std::unique_ptr<SetFunction> make_saturated_coverage(
    std::shared_ptr<const SimilarityKernel> kernel, double alpha) {
  return std::make_unique<SaturatedCoverage>(std::move(kernel), alpha);
}

std::unique_ptr<SetFunction> make_graph_cut(
    std::shared_ptr<const SimilarityKernel> kernel, double lambda) {
  return std::make_unique<GraphCut>(std::move(kernel), lambda);
}

std::unique_ptr<SetFunction> make_feature_based(Matrix features, Psi psi) {
  return std::make_unique<FeatureBased>(std::move(features), psi);
}

std::unique_ptr<SetFunction> make_set_cover(std::vector<std::vector<int>> labels,
                                            Vector weights) {
  return std::make_unique<SetCover>(std::move(labels), std::move(weights));
}

std::unique_ptr<SetFunction> make_prob_set_cover(Matrix probabilities,
                                                 Vector weights) {
  return std::make_unique<ProbSetCover>(std::move(probabilities), std::move(weights));
}

std::unique_ptr<SetFunction> make_dpp_logdet(
    std::shared_ptr<const SimilarityKernel> kernel, double jitter) {
  return std::make_unique<DppLogDet>(std::move(kernel), jitter);
}

std::unique_ptr<SetFunction> make_disparity(
    FunctionKind kind, std::shared_ptr<const DistanceMatrix> distance) {
  switch (kind) {
    case FunctionKind::disparity_min:
      return std::make_unique<DisparityMin>(std::move(distance));
    case FunctionKind::disparity_sum:
      return std::make_unique<DisparitySum>(std::move(distance));
    case FunctionKind::disparity_min_sum:
      return std::make_unique<DisparityMinSum>(std::move(distance));
    default:
      throw Error(std::string("not a dispersion kind: ") + kind_name(kind));
  }
}

std::unique_ptr<SetFunction> make_modular(Vector scores) {
  return std::make_unique<Modular>(std::move(scores));
}

std::unique_ptr<SetFunction> make_weighted_sum(
    std::vector<std::pair<std::unique_ptr<SetFunction>, double>> parts) {
  return std::make_unique<WeightedSum>(std::move(parts));
}

std::unique_ptr<SetFunction> make_objective(
    FunctionKind kind, const GroundSet& gs,
    std::shared_ptr<const SimilarityKernel> kernel,
    std::shared_ptr<const DistanceMatrix> distance,
    const ObjectiveParams& params) {
  auto need_kernel = [&]() -> std::shared_ptr<const SimilarityKernel> {
    if (!kernel)
      throw Error(std::string(kind_name(kind)) + " needs a similarity kernel");
    return kernel;
  };
  auto need_distance = [&]() -> std::shared_ptr<const DistanceMatrix> {
    if (!distance)
      throw Error(std::string(kind_name(kind)) + " needs a distance matrix");
    return distance;
  };
  auto need_concepts = [&]() -> const ConceptTable& {
    if (!gs.concepts)
      throw Error(std::string(kind_name(kind)) + " needs concept annotations");
    return *gs.concepts;
  };

  switch (kind) {
    case FunctionKind::facility_location:
      return make_facility_location(need_kernel());
    case FunctionKind::saturated_coverage:
      return make_saturated_coverage(need_kernel(), params.alpha);
    case FunctionKind::graph_cut:
      return make_graph_cut(need_kernel(), params.lambda);
    case FunctionKind::feature_based: {
      const FeatureMatrix* fm = nullptr;
      if (!params.feature_modality.empty()) {
        fm = &gs.modality(params.feature_modality);
      } else {
        for (const auto& [name, m] : gs.modalities)
          if (m.kind == FeatureMatrix::Kind::histogram) {
            fm = &m;
            break;
          }
        if (!fm)
          throw Error("feature_based needs a histogram modality "
                      "(or an explicit feature_modality)");
      }
      return make_feature_based(fm->values, params.psi);
    }
    case FunctionKind::set_cover: {
      const ConceptTable& ct = need_concepts();
      return make_set_cover(ct.hard_labels, ct.weights);
    }
    case FunctionKind::prob_set_cover: {
      const ConceptTable& ct = need_concepts();
      if (ct.probabilities) return make_prob_set_cover(*ct.probabilities, ct.weights);
      Matrix probs = Matrix::Zero(ct.item_count(), ct.concept_count());
      for (int i = 0; i < ct.item_count(); ++i)
        for (int u : ct.hard_labels[i]) probs(i, u) = 1.0;
      return make_prob_set_cover(std::move(probs), ct.weights);
    }
    case FunctionKind::dpp_logdet:
      return make_dpp_logdet(need_kernel(), params.dpp_jitter);
    case FunctionKind::disparity_min:
    case FunctionKind::disparity_sum:
    case FunctionKind::disparity_min_sum:
      return make_disparity(kind, need_distance());
    case FunctionKind::modular:
      if (!gs.importance) throw Error("modular needs importance scores");
      return make_modular(*gs.importance);
    case FunctionKind::mixture:
      throw Error("mixture objectives are built from explicit terms");
  }
  throw Error("unknown function kind");
}

}  // namespace submod
