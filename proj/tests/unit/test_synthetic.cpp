#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "submod/ground_set.hpp"
#include "submod/synthetic.hpp"

using namespace submod;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "submod_syn_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("scenario names roundtrip") {
  for (Scenario s : {Scenario::clustered_with_outliers, Scenario::uniform,
                     Scenario::concept_grid})
    CHECK(scenario_from_name(scenario_name(s)) == s);
  CHECK_THROWS_WITH_AS(scenario_from_name("noise"),
                       doctest::Contains("unknown scenario"), Error);
}

TEST_CASE("generation is deterministic in the spec") {
  SyntheticSpec spec;
  spec.n = 40;
  spec.seed = 9;
  SyntheticData a = generate_synthetic(spec);
  SyntheticData b = generate_synthetic(spec);
  CHECK(a.ground.modality("visual").values == b.ground.modality("visual").values);
  CHECK(a.ground.modality("colors").values == b.ground.modality("colors").values);
  CHECK(*a.ground.importance == *b.ground.importance);
  REQUIRE(a.annotations.segments.size() == b.annotations.segments.size());
  for (std::size_t s = 0; s < a.annotations.segments.size(); ++s)
    CHECK(a.annotations.segments[s].members == b.annotations.segments[s].members);

  SyntheticSpec other = spec;
  other.seed = 10;
  SyntheticData c = generate_synthetic(other);
  CHECK(a.ground.modality("visual").values != c.ground.modality("visual").values);
}

TEST_CASE("clustered scenario plants scenes, outliers and concepts") {
  SyntheticSpec spec;
  spec.n = 60;
  spec.clusters = 4;
  spec.outliers = 6;
  spec.concepts = 9;
  SyntheticData data = generate_synthetic(spec);
  CHECK(data.ground.n == 60);
  CHECK(data.annotations.count(SegmentKind::scene) == 4);
  CHECK(data.annotations.count(SegmentKind::cluster) == 4);
  CHECK(data.annotations.count(SegmentKind::outlier) == 6);
  // concepts: one per cluster, the requested extras, one per outlier
  CHECK(data.ground.concepts->concept_count() == 4 + 5 + 6);
  // every item carries at least one concept and scenes partition the blob
  int covered = 0;
  for (const auto& seg : data.annotations.segments)
    if (seg.kind == SegmentKind::scene) covered += static_cast<int>(seg.members.size());
  CHECK(covered == 60 - 6);
  for (const auto& labels : data.ground.concepts->hard_labels)
    CHECK(!labels.empty());
  CHECK(data.ground.modality("colors").values.minCoeff() >= 0.0);
  CHECK(data.ground.importance->minCoeff() >= 0.0);
  CHECK(data.ground.importance->maxCoeff() < 1.0);
}

TEST_CASE("uniform scenario has no outliers") {
  SyntheticSpec spec;
  spec.scenario = Scenario::uniform;
  spec.n = 30;
  SyntheticData data = generate_synthetic(spec);
  CHECK(data.annotations.count(SegmentKind::outlier) == 0);
  CHECK(data.annotations.count(SegmentKind::scene) >= 1);
  CHECK(data.ground.concepts->hard_labels[13] == std::vector<int>{13 % 11});
}

TEST_CASE("concept grid labels items round robin") {
  SyntheticSpec spec;
  spec.scenario = Scenario::concept_grid;
  spec.n = 24;
  spec.concepts = 6;
  SyntheticData data = generate_synthetic(spec);
  CHECK(data.ground.concepts->concept_count() == 6);
  for (int i = 0; i < 24; ++i)
    CHECK(data.ground.concepts->hard_labels[i] == std::vector<int>{i % 6});
  CHECK(data.annotations.count(SegmentKind::scene) == 6);
}

TEST_CASE("size and dimension guards") {
  SyntheticSpec spec;
  spec.n = 5;
  CHECK_THROWS_WITH_AS(generate_synthetic(spec),
                       doctest::Contains("n >= 10"), Error);
  spec.n = 20;
  spec.dims = 1;
  CHECK_THROWS_WITH_AS(generate_synthetic(spec),
                       doctest::Contains("dims >= 2"), Error);
  spec.dims = 8;
  spec.outliers = 18;
  spec.clusters = 5;
  CHECK_THROWS_AS(generate_synthetic(spec), Error);  // 2 blob items, 5 clusters
}

TEST_CASE("written datasets load back and repeat byte for byte") {
  SyntheticSpec spec;
  spec.n = 25;
  spec.seed = 4;
  spec.outliers = 3;
  fs::path dir1 = fresh_dir("a");
  fs::path dir2 = fresh_dir("b");
  write_synthetic(spec, dir1);
  write_synthetic(spec, dir2);
  for (const char* name : {"manifest.json", "features_visual.bin",
                           "features_colors.bin", "importance.csv",
                           "concepts.json", "annotations.json"})
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));

  GroundSet gs = load_ground_set(dir1 / "manifest.json");
  SyntheticData direct = generate_synthetic(spec);
  CHECK(gs.n == 25);
  CHECK(gs.modality("visual").kind == FeatureMatrix::Kind::embedding);
  CHECK(gs.modality("colors").kind == FeatureMatrix::Kind::histogram);
  REQUIRE(gs.concepts.has_value());
  CHECK(gs.concepts->names == direct.ground.concepts->names);
  for (int i = 0; i < gs.n; ++i)
    CHECK(gs.concepts->hard_labels[i] == direct.ground.concepts->hard_labels[i]);
  SegmentAnnotation ann = load_annotations(dir1 / "annotations.json", gs.n);
  CHECK(ann.count(SegmentKind::outlier) == 3);
  // importance survives the csv roundtrip exactly
  for (int i = 0; i < gs.n; ++i)
    CHECK((*gs.importance)[i] == (*direct.ground.importance)[i]);
}
