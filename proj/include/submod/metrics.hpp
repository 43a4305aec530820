#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "submod/ground_set.hpp"

namespace submod {

enum class SegmentKind { scene, outlier, cluster };

const char* segment_kind_name(SegmentKind kind);
SegmentKind segment_kind_from_name(const std::string& name);

struct Segment {
  std::string name;
  SegmentKind kind;
  std::vector<int> members;
};

// Ground-truth events a summary is scored against.  Segments of the same
// kind are pairwise disjoint; members index the ground set.
struct SegmentAnnotation {
  std::vector<Segment> segments;
  int count(SegmentKind kind) const;
};

SegmentAnnotation load_annotations(const std::filesystem::path& path,
                                   int ground_size);
void write_annotations(const SegmentAnnotation& ann,
                       const std::filesystem::path& path);

// Fraction of scene segments hit by X.
double representation_score(std::span<const int> summary,
                            const SegmentAnnotation& ann);

// Concepts covered by X as a fraction of concepts covered by anything.
double coverage_score(std::span<const int> summary, const ConceptTable& concepts);

// Number of outlier events hit by X (unnormalized).
int diversity_score(std::span<const int> summary, const SegmentAnnotation& ann);

// Fraction of cluster segments hit by X.
double query_cluster_score(std::span<const int> summary,
                           const SegmentAnnotation& ann);

}  // namespace submod
