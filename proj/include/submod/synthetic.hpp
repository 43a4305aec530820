#pragma once

#include <filesystem>
#include <string>

#include "submod/ground_set.hpp"
#include "submod/metrics.hpp"

namespace submod {

enum class Scenario { clustered_with_outliers, uniform, concept_grid };

Scenario scenario_from_name(const std::string& name);
const char* scenario_name(Scenario scenario);

struct SyntheticSpec {
  Scenario scenario = Scenario::clustered_with_outliers;
  int n = 100;
  std::uint64_t seed = 0;
  int clusters = 5;
  int outliers = 10;   // clustered_with_outliers only
  int concepts = 11;   // clustered: cluster concepts + rare extras; grid: total
  int dims = 8;
  double spread = 0.08;  // within-cluster scatter
};

struct SyntheticData {
  GroundSet ground;
  SegmentAnnotation annotations;
};

// Deterministic in the spec (identical spec -> identical data, bit for bit).
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Writes manifest.json, feature matrices, importance.csv, concepts.json and
// annotations.json into dir.  Repeated calls produce byte-identical files.
void write_synthetic(const SyntheticSpec& spec,
                     const std::filesystem::path& dir);

}  // namespace submod
