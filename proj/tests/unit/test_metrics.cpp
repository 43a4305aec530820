#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "submod/metrics.hpp"

using namespace submod;
namespace fs = std::filesystem;

namespace {

SegmentAnnotation sample_annotation() {
  SegmentAnnotation ann;
  ann.segments.push_back({"s0", SegmentKind::scene, {0, 1, 2}});
  ann.segments.push_back({"s1", SegmentKind::scene, {3, 4}});
  ann.segments.push_back({"o0", SegmentKind::outlier, {5}});
  ann.segments.push_back({"o1", SegmentKind::outlier, {9, 10}});
  ann.segments.push_back({"c0", SegmentKind::cluster, {0, 1}});
  ann.segments.push_back({"c1", SegmentKind::cluster, {2}});
  return ann;
}

ConceptTable sample_concepts() {
  ConceptTable ct;
  ct.names = {"a", "b", "c"};
  ct.weights = Vector::Ones(3);
  ct.hard_labels = {{0, 1}, {1, 2}, {2}};
  return ct;
}

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "submod_metrics_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("representation counts hit scenes") {
  SegmentAnnotation ann = sample_annotation();
  std::vector<int> both = {1, 4, 7};
  CHECK(representation_score(both, ann) == 1.0);
  std::vector<int> one = {0, 1};
  CHECK(representation_score(one, ann) == 0.5);
  std::vector<int> none;
  CHECK(representation_score(none, ann) == 0.0);
}

TEST_CASE("diversity counts outlier events unnormalized") {
  SegmentAnnotation ann = sample_annotation();
  std::vector<int> both = {5, 9};
  CHECK(diversity_score(both, ann) == 2);
  std::vector<int> one = {5};
  CHECK(diversity_score(one, ann) == 1);
  std::vector<int> dup = {9, 10};  // same event twice still counts once
  CHECK(diversity_score(dup, ann) == 1);
  std::vector<int> none;
  CHECK(diversity_score(none, ann) == 0);
}

TEST_CASE("cluster score is the scene formula over clusters") {
  SegmentAnnotation ann = sample_annotation();
  std::vector<int> both = {0, 2};
  CHECK(query_cluster_score(both, ann) == 1.0);
  std::vector<int> one = {0, 1};
  CHECK(query_cluster_score(one, ann) == 0.5);
  std::vector<int> none;
  CHECK(query_cluster_score(none, ann) == 0.0);
}

TEST_CASE("coverage is the covered fraction of the occupied universe") {
  ConceptTable ct = sample_concepts();
  std::vector<int> first = {0};
  CHECK(coverage_score(first, ct) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  std::vector<int> all = {0, 1, 2};
  CHECK(coverage_score(all, ct) == 1.0);
  std::vector<int> none;
  CHECK(coverage_score(none, ct) == 0.0);

  // a concept no item carries shrinks the universe, not the score
  ConceptTable wider = sample_concepts();
  wider.names.push_back("ghost");
  wider.weights = Vector::Ones(4);
  CHECK(coverage_score(first, wider) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  ConceptTable empty;
  empty.names = {"a"};
  empty.weights = Vector::Ones(1);
  empty.hard_labels = {{}, {}};
  std::vector<int> pick = {0};
  CHECK_THROWS_WITH_AS(coverage_score(pick, empty),
                       doctest::Contains("universe is empty"), Error);
}

TEST_CASE("scores only improve as the summary grows") {
  SegmentAnnotation ann = sample_annotation();
  ConceptTable ct = sample_concepts();
  std::vector<int> grow, labelled;
  double r = 0, c = 0, m = 0;
  int d = 0;
  for (int i : {7, 0, 5, 3, 2, 9}) {
    grow.push_back(i);
    double r2 = representation_score(grow, ann);
    double m2 = query_cluster_score(grow, ann);
    int d2 = diversity_score(grow, ann);
    CHECK(r2 >= r);
    CHECK(m2 >= m);
    CHECK(d2 >= d);
    r = r2;
    m = m2;
    d = d2;
    if (i < ct.item_count()) {  // the concept table only covers items 0..2
      labelled.push_back(i);
      double c2 = coverage_score(labelled, ct);
      CHECK(c2 >= c);
      c = c2;
    }
  }
}

TEST_CASE("missing segment kinds are reported") {
  SegmentAnnotation scenes_only;
  scenes_only.segments.push_back({"s", SegmentKind::scene, {0}});
  std::vector<int> x = {0};
  CHECK_THROWS_WITH_AS(diversity_score(x, scenes_only),
                       doctest::Contains("no outlier segments"), Error);
  CHECK_THROWS_WITH_AS(query_cluster_score(x, scenes_only),
                       doctest::Contains("no cluster segments"), Error);
  SegmentAnnotation empty;
  CHECK_THROWS_WITH_AS(representation_score(x, empty),
                       doctest::Contains("no scene segments"), Error);
}

TEST_CASE("annotation files roundtrip") {
  SegmentAnnotation ann = sample_annotation();
  fs::path path = temp_file("ann.json");
  write_annotations(ann, path);
  SegmentAnnotation back = load_annotations(path, 11);
  REQUIRE(back.segments.size() == ann.segments.size());
  for (std::size_t s = 0; s < ann.segments.size(); ++s) {
    CHECK(back.segments[s].name == ann.segments[s].name);
    CHECK(back.segments[s].kind == ann.segments[s].kind);
    CHECK(back.segments[s].members == ann.segments[s].members);
  }
  CHECK(back.count(SegmentKind::scene) == 2);
  CHECK(back.count(SegmentKind::outlier) == 2);
  CHECK(back.count(SegmentKind::cluster) == 2);
}

TEST_CASE("annotation validation") {
  fs::path path = temp_file("bad.json");
  std::ofstream(path) << R"({"segments": [
    {"name": "s", "kind": "scene", "members": [0, 12]}
  ]})";
  CHECK_THROWS_WITH_AS(load_annotations(path, 11),
                       doctest::Contains("out of range"), Error);

  std::ofstream(path) << R"({"segments": [
    {"name": "s0", "kind": "scene", "members": [0, 1]},
    {"name": "s1", "kind": "scene", "members": [1, 2]}
  ]})";
  CHECK_THROWS_WITH_AS(load_annotations(path, 11),
                       doctest::Contains("overlapping scene segments"), Error);

  // the same items may appear in segments of different kinds
  std::ofstream(path) << R"({"segments": [
    {"name": "s0", "kind": "scene", "members": [0, 1]},
    {"name": "c0", "kind": "cluster", "members": [0, 1]}
  ]})";
  SegmentAnnotation ok = load_annotations(path, 11);
  CHECK(ok.segments.size() == 2);

  std::ofstream(path) << R"({"segments": [
    {"name": "s", "kind": "movie", "members": [0]}
  ]})";
  CHECK_THROWS_WITH_AS(load_annotations(path, 11),
                       doctest::Contains("unknown segment kind"), Error);

  CHECK_THROWS_WITH_AS(load_annotations(temp_file("gone.json"), 5),
                       doctest::Contains("missing file"), Error);
}
