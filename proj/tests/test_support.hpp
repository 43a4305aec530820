#pragma once

#include <algorithm>
#include <memory>
#include <set>
#include <utility>
#include <vector>

#include "submod/common.hpp"
#include "submod/kernel.hpp"
#include "submod/objectives.hpp"

namespace submod::test {

// Random similarity from random unit embeddings: (cos + 1)/2 is symmetric
// with unit diagonal and entries in [0, 1]. With dims >= n the Gram matrix
// is comfortably positive definite, which dpp_logdet needs.
inline Matrix random_similarity(int n, Rng& rng, int dims = 6) {
  Matrix x(n, dims);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) x(i, d) = rng.normal();
    double norm = x.row(i).norm();
    if (norm == 0.0) x(i, 0) = norm = 1.0;
    x.row(i) /= norm;
  }
  Matrix s = ((x * x.transpose()).array() + 1.0) / 2.0;
  s = s.cwiseMax(0.0).cwiseMin(1.0);
  s = ((s + s.transpose()) / 2.0).eval();
  s.diagonal().setOnes();
  return s;
}

inline Matrix random_nonneg_features(int n, int d, Rng& rng) {
  Matrix q(n, d);
  for (int i = 0; i < n; ++i)
    for (int f = 0; f < d; ++f) q(i, f) = std::abs(rng.normal());
  return q;
}

inline Vector random_weights(int m, Rng& rng) {
  Vector w(m);
  for (int u = 0; u < m; ++u) w[u] = rng.uniform(0.1, 1.0);
  return w;
}

// Each item gets one to three distinct concept labels, sorted.
inline std::vector<std::vector<int>> random_labels(int n, int m, Rng& rng) {
  std::vector<std::vector<int>> labels(n);
  for (int i = 0; i < n; ++i) {
    int count = rng.uniform_int(1, 3);
    std::set<int> picked;
    while (static_cast<int>(picked.size()) < count)
      picked.insert(rng.uniform_int(0, m - 1));
    labels[i].assign(picked.begin(), picked.end());
  }
  return labels;
}

inline Matrix random_probabilities(int n, int m, Rng& rng) {
  Matrix p(n, m);
  for (int i = 0; i < n; ++i)
    for (int u = 0; u < m; ++u) p(i, u) = rng.uniform();
  return p;
}

// A random instance of one kind, owning whatever data the function borrows.
struct Instance {
  std::shared_ptr<const SimilarityKernel> kernel;
  std::shared_ptr<const DistanceMatrix> distance;
  std::unique_ptr<SetFunction> f;
};

inline Instance random_instance(FunctionKind kind, int n, Rng& rng,
                                const ObjectiveParams& params = {}) {
  Instance inst;
  switch (kind) {
    case FunctionKind::facility_location:
    case FunctionKind::saturated_coverage:
    case FunctionKind::graph_cut:
    case FunctionKind::dpp_logdet: {
      int dims = kind == FunctionKind::dpp_logdet ? n + 8 : 6;
      inst.kernel = std::make_shared<SimilarityKernel>(
          SimilarityKernel::from_dense(random_similarity(n, rng, dims)));
      if (kind == FunctionKind::facility_location)
        inst.f = make_facility_location(inst.kernel);
      else if (kind == FunctionKind::saturated_coverage)
        inst.f = make_saturated_coverage(inst.kernel, params.alpha);
      else if (kind == FunctionKind::graph_cut)
        inst.f = make_graph_cut(inst.kernel, params.lambda);
      else
        inst.f = make_dpp_logdet(inst.kernel, params.dpp_jitter);
      break;
    }
    case FunctionKind::disparity_min:
    case FunctionKind::disparity_sum:
    case FunctionKind::disparity_min_sum: {
      SimilarityKernel s =
          SimilarityKernel::from_dense(random_similarity(n, rng));
      inst.distance = std::make_shared<DistanceMatrix>(to_distance(s));
      inst.f = make_disparity(kind, inst.distance);
      break;
    }
    case FunctionKind::feature_based:
      inst.f = make_feature_based(random_nonneg_features(n, 12, rng), params.psi);
      break;
    case FunctionKind::set_cover: {
      int m = std::max(3, n / 3);
      inst.f = make_set_cover(random_labels(n, m, rng), random_weights(m, rng));
      break;
    }
    case FunctionKind::prob_set_cover: {
      int m = std::max(3, n / 3);
      inst.f = make_prob_set_cover(random_probabilities(n, m, rng),
                                   random_weights(m, rng));
      break;
    }
    case FunctionKind::modular: {
      Vector scores(n);
      for (int i = 0; i < n; ++i) scores[i] = std::abs(rng.normal());
      inst.f = make_modular(scores);
      break;
    }
    case FunctionKind::mixture:
      throw Error("random_instance: mixture is not a concrete kind");
  }
  return inst;
}

// Random subset of {0..n-1} of the given size, sorted.
inline std::vector<int> random_subset(int n, int size, Rng& rng) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < size; ++i) {
    int j = rng.uniform_int(i, n - 1);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

// The hand-checked three-item kernel used across the regression tests.
inline Matrix k3_matrix() {
  Matrix s(3, 3);
  s << 1.0, 0.5, 0.2,
       0.5, 1.0, 0.1,
       0.2, 0.1, 1.0;
  return s;
}

inline std::shared_ptr<const SimilarityKernel> k3_kernel() {
  return std::make_shared<SimilarityKernel>(
      SimilarityKernel::from_dense(k3_matrix()));
}

inline std::shared_ptr<const DistanceMatrix> k3_distance() {
  return std::make_shared<DistanceMatrix>(to_distance(*k3_kernel()));
}

}  // namespace submod::test
