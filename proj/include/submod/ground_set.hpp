#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "submod/kernel.hpp"

namespace submod {

struct FeatureMatrix {
  enum class Kind { embedding, histogram };
  Kind kind = Kind::embedding;
  Matrix values;  // one row per item

  int rows() const { return static_cast<int>(values.rows()); }
  int dims() const { return static_cast<int>(values.cols()); }
};

/// Per-item concept labels with concept weights, optionally backed by a
/// probability matrix. Hard labels are always available: when probabilities
/// exist they are derived (or validated) against the configured threshold.
struct ConceptTable {
  std::vector<std::string> names;
  Vector weights;                            // one per concept, >= 0
  std::vector<std::vector<int>> hard_labels; // sorted concept ids per item
  std::optional<Matrix> probabilities;       // n x m, entries in [0, 1]
  double threshold = 0.5;

  int concept_count() const { return static_cast<int>(names.size()); }
  int item_count() const { return static_cast<int>(hard_labels.size()); }
  int concept_id(const std::string& name) const;  // -1 when unknown
};

/// The universe of selectable items plus everything loaded for them.
struct GroundSet {
  int n = 0;
  std::vector<std::string> item_ids;
  Vector costs;  // strictly positive, defaults to 1
  std::vector<std::pair<std::string, FeatureMatrix>> modalities;
  std::optional<ConceptTable> concepts;
  std::optional<Vector> importance;  // nonnegative scores
  std::shared_ptr<const SimilarityKernel> precomputed_kernel;

  bool has_modality(const std::string& name) const;
  const FeatureMatrix& modality(const std::string& name) const;
  std::vector<std::string> modality_names() const;

  /// New ground set restricted to `keep` (original order preserved).
  GroundSet subset(const std::vector<int>& keep) const;
};

/// Loads and validates a ground set from a JSON manifest; relative paths in
/// the manifest resolve against its directory.
GroundSet load_ground_set(const std::filesystem::path& manifest_path);

/// Weighted combination of per-modality similarities. Embedding modalities
/// contribute (cos + 1)/2 over L2-normalized rows; histogram modalities
/// contribute (pearson + 1)/2 over bins. With sparsify_k set, each row keeps
/// its k largest off-diagonal entries and the result is symmetrized by max.
SimilarityKernel build_kernel(const GroundSet& gs,
                              const std::vector<std::string>& modality_names,
                              const std::vector<double>& weights,
                              std::optional<int> sparsify_k = std::nullopt);

/// Items whose hard label set contains the named concept.
std::vector<int> filter_by_query(const GroundSet& gs, const std::string& concept_name);

/// Items whose relevance score (one per line) is >= threshold.
std::vector<int> filter_by_query(const GroundSet& gs,
                                 const std::filesystem::path& relevance_path,
                                 double threshold);

ConceptTable concept_table_from_json_file(const std::filesystem::path& path);

}  // namespace submod
