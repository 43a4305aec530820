#include "submod/metrics.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace submod {

using nlohmann::json;

const char* segment_kind_name(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::scene: return "scene";
    case SegmentKind::outlier: return "outlier";
    case SegmentKind::cluster: return "cluster";
  }
  return "unknown";
}

SegmentKind segment_kind_from_name(const std::string& name) {
  if (name == "scene") return SegmentKind::scene;
  if (name == "outlier") return SegmentKind::outlier;
  if (name == "cluster") return SegmentKind::cluster;
  throw Error("unknown segment kind: " + name);
}

int SegmentAnnotation::count(SegmentKind kind) const {
  int c = 0;
  for (const auto& seg : segments)
    if (seg.kind == kind) ++c;
  return c;
}

SegmentAnnotation load_annotations(const std::filesystem::path& path,
                                   int ground_size) {
  std::ifstream in(path);
  if (!in) throw Error("missing file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": invalid JSON (" + e.what() + ")");
  }

  SegmentAnnotation ann;
  std::vector<std::vector<char>> seen(3, std::vector<char>(ground_size, 0));
  for (const auto& s : j.at("segments")) {
    Segment seg;
    seg.name = s.at("name").get<std::string>();
    seg.kind = segment_kind_from_name(s.at("kind").get<std::string>());
    for (const auto& m : s.at("members")) {
      int i = m.get<int>();
      if (i < 0 || i >= ground_size)
        throw Error("segment \"" + seg.name + "\": member " + std::to_string(i) +
                    " out of range");
      auto& mask = seen[static_cast<int>(seg.kind)];
      if (mask[i])
        throw Error(std::string("overlapping ") + segment_kind_name(seg.kind) +
                    " segments at item " + std::to_string(i));
      mask[i] = 1;
      seg.members.push_back(i);
    }
    ann.segments.push_back(std::move(seg));
  }
  return ann;
}

void write_annotations(const SegmentAnnotation& ann,
                       const std::filesystem::path& path) {
  json segments = json::array();
  for (const auto& seg : ann.segments)
    segments.push_back({{"name", seg.name},
                        {"kind", segment_kind_name(seg.kind)},
                        {"members", seg.members}});
  json j{{"version", 1}, {"segments", segments}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

namespace {

// Fraction of `kind` segments containing at least one summary item.
double hit_fraction(std::span<const int> summary, const SegmentAnnotation& ann,
                    SegmentKind kind, int* raw_hits) {
  int total = 0, hits = 0;
  for (const auto& seg : ann.segments) {
    if (seg.kind != kind) continue;
    ++total;
    for (int m : seg.members) {
      if (std::find(summary.begin(), summary.end(), m) != summary.end()) {
        ++hits;
        break;
      }
    }
  }
  if (total == 0)
    throw Error(std::string("no ") + segment_kind_name(kind) + " segments");
  if (raw_hits) *raw_hits = hits;
  return static_cast<double>(hits) / total;
}

}  // namespace

double representation_score(std::span<const int> summary,
                            const SegmentAnnotation& ann) {
  return hit_fraction(summary, ann, SegmentKind::scene, nullptr);
}

int diversity_score(std::span<const int> summary, const SegmentAnnotation& ann) {
  int hits = 0;
  hit_fraction(summary, ann, SegmentKind::outlier, &hits);
  return hits;
}

double query_cluster_score(std::span<const int> summary,
                           const SegmentAnnotation& ann) {
  return hit_fraction(summary, ann, SegmentKind::cluster, nullptr);
}

double coverage_score(std::span<const int> summary, const ConceptTable& concepts) {
  std::vector<char> in_summary(concepts.concept_count(), 0);
  std::vector<char> anywhere(concepts.concept_count(), 0);
  for (int i = 0; i < concepts.item_count(); ++i)
    for (int u : concepts.hard_labels[i]) anywhere[u] = 1;
  for (int i : summary) {
    if (i < 0 || i >= concepts.item_count())
      throw Error("summary index out of range: " + std::to_string(i));
    for (int u : concepts.hard_labels[i]) in_summary[u] = 1;
  }
  int total = 0, covered = 0;
  for (int u = 0; u < concepts.concept_count(); ++u) {
    if (anywhere[u]) ++total;
    if (in_summary[u]) ++covered;
  }
  if (total == 0) throw Error("coverage universe is empty");
  return static_cast<double>(covered) / total;
}

}  // namespace submod
