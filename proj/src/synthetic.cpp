#include "submod/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "submod/matrix_io.hpp"

namespace submod {

using nlohmann::json;

Scenario scenario_from_name(const std::string& name) {
  if (name == "clustered_with_outliers") return Scenario::clustered_with_outliers;
  if (name == "uniform") return Scenario::uniform;
  if (name == "concept_grid") return Scenario::concept_grid;
  throw Error("unknown scenario: " + name);
}

const char* scenario_name(Scenario scenario) {
  switch (scenario) {
    case Scenario::clustered_with_outliers: return "clustered_with_outliers";
    case Scenario::uniform: return "uniform";
    case Scenario::concept_grid: return "concept_grid";
  }
  return "unknown";
}

namespace {

Vector gaussian_vector(Rng& rng, int dims) {
  Vector v(dims);
  for (int t = 0; t < dims; ++t) v[t] = rng.normal();
  return v;
}

Vector uniform_importance(Rng& rng, int n) {
  Vector imp(n);
  for (int i = 0; i < n; ++i) imp[i] = rng.uniform();
  return imp;
}

void finish_ground(GroundSet& gs, Matrix visual, Matrix colors, Vector importance,
                   ConceptTable concepts) {
  const int n = static_cast<int>(visual.rows());
  gs.n = n;
  for (int i = 0; i < n; ++i) gs.item_ids.push_back(std::to_string(i));
  gs.costs = Vector::Ones(n);
  FeatureMatrix fv{FeatureMatrix::Kind::embedding, std::move(visual)};
  FeatureMatrix fc{FeatureMatrix::Kind::histogram, std::move(colors)};
  gs.modalities.emplace_back("visual", std::move(fv));
  gs.modalities.emplace_back("colors", std::move(fc));
  gs.importance = std::move(importance);
  gs.concepts = std::move(concepts);
}

SyntheticData make_clustered(const SyntheticSpec& spec) {
  const int k = spec.clusters;
  const int n_out = spec.outliers;
  const int n_blob = spec.n - n_out;
  if (k < 1) throw Error("clustered scenario needs at least one cluster");
  if (n_out < 0) throw Error("outlier count must be nonnegative");
  if (n_blob < k)
    throw Error("clustered scenario needs at least one item per cluster "
                "beyond the outliers");

  Rng rng(spec.seed);
  const int d = spec.dims;
  Vector axis = Vector::Zero(d);
  axis[0] = 1.0;

  // Cluster directions share a common axis component so within-cluster
  // similarity stays high.  The last two clusters are deliberately close
  // ("twins"): representation-seeking picks still resolve both, pure
  // dispersion picks usually do not.
  std::vector<Vector> bases;
  for (int c = 0; c < k; ++c) bases.push_back(gaussian_vector(rng, d));
  std::vector<Vector> centers(k);
  for (int c = 0; c < k; ++c) {
    Vector dir = axis + 0.6 * bases[c];
    if (k >= 2 && c == k - 1) dir = axis + 0.6 * bases[k - 2] + 0.22 * bases[c];
    centers[c] = dir / dir.norm();
  }

  std::vector<int> sizes(k, n_blob / k);
  for (int c = 0; c < n_blob % k; ++c) ++sizes[c];

  Matrix visual(spec.n, d), colors(spec.n, d);
  SegmentAnnotation ann;
  std::vector<std::vector<int>> blocks(k);
  int row = 0;
  for (int c = 0; c < k; ++c) {
    for (int t = 0; t < sizes[c]; ++t) {
      Vector g = gaussian_vector(rng, d);
      visual.row(row) = centers[c] + spec.spread * g;
      Vector h = gaussian_vector(rng, d);
      colors.row(row) = centers[c].cwiseAbs() + 0.15 * h.cwiseAbs();
      blocks[c].push_back(row);
      ++row;
    }
  }
  std::vector<int> outlier_rows;
  for (int t = 0; t < n_out; ++t) {
    Vector g = gaussian_vector(rng, d);
    Vector ortho = g - g.dot(axis) * axis;
    if (ortho.norm() < 1e-12) ortho[1 + t % (d - 1)] = 1.0;
    ortho /= ortho.norm();
    visual.row(row) = ortho - 0.3 * axis;
    Vector h = gaussian_vector(rng, d);
    colors.row(row) = h.cwiseAbs();
    outlier_rows.push_back(row);
    ++row;
  }

  Vector importance = uniform_importance(rng, spec.n);

  // Concepts: one per cluster, a few rare ones planted on two items each,
  // one per outlier.  Coverage-seeking picks are the only way to light up
  // (almost) the whole universe.
  const int n_rare = std::max(0, spec.concepts - k);
  ConceptTable ct;
  for (int c = 0; c < k; ++c) ct.names.push_back("cluster_" + std::to_string(c));
  for (int r = 0; r < n_rare; ++r) ct.names.push_back("rare_" + std::to_string(r));
  for (int t = 0; t < n_out; ++t) ct.names.push_back("outlier_" + std::to_string(t));
  ct.weights = Vector::Ones(static_cast<int>(ct.names.size()));

  ct.hard_labels.assign(spec.n, {});
  for (int c = 0; c < k; ++c)
    for (int i : blocks[c]) ct.hard_labels[i].push_back(c);
  for (int r = 0; r < n_rare; ++r) {
    int c = rng.uniform_int(0, k - 1);
    int size = static_cast<int>(blocks[c].size());
    int a = rng.uniform_int(0, size - 1);
    int b = size > 1 ? rng.uniform_int(0, size - 2) : a;
    if (size > 1 && b >= a) ++b;
    ct.hard_labels[blocks[c][a]].push_back(k + r);
    if (b != a) ct.hard_labels[blocks[c][b]].push_back(k + r);
  }
  for (int t = 0; t < n_out; ++t)
    ct.hard_labels[outlier_rows[t]].push_back(k + n_rare + t);
  for (auto& labels : ct.hard_labels) std::sort(labels.begin(), labels.end());

  for (int c = 0; c < k; ++c) {
    ann.segments.push_back({"scene_" + std::to_string(c), SegmentKind::scene,
                            blocks[c]});
  }
  for (int t = 0; t < n_out; ++t)
    ann.segments.push_back({"outlier_" + std::to_string(t), SegmentKind::outlier,
                            {outlier_rows[t]}});
  for (int c = 0; c < k; ++c)
    ann.segments.push_back({"cluster_" + std::to_string(c), SegmentKind::cluster,
                            blocks[c]});

  SyntheticData data;
  finish_ground(data.ground, std::move(visual), std::move(colors),
                std::move(importance), std::move(ct));
  data.annotations = std::move(ann);
  return data;
}

SyntheticData make_uniform(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  const int d = spec.dims;
  Matrix visual(spec.n, d), colors(spec.n, d);
  for (int i = 0; i < spec.n; ++i) {
    Vector g = gaussian_vector(rng, d);
    visual.row(i) = g;
    Vector h = gaussian_vector(rng, d);
    colors.row(i) = h.cwiseAbs();
  }
  Vector importance = uniform_importance(rng, spec.n);

  const int m = std::max(1, spec.concepts);
  ConceptTable ct;
  for (int u = 0; u < m; ++u) ct.names.push_back("c_" + std::to_string(u));
  ct.weights = Vector::Ones(m);
  for (int i = 0; i < spec.n; ++i) ct.hard_labels.push_back({i % m});

  // Scenes are contiguous chunks of the item range; no outliers.
  SegmentAnnotation ann;
  const int k = std::max(1, spec.clusters);
  const int chunk = (spec.n + k - 1) / k;
  for (int c = 0; c < k; ++c) {
    std::vector<int> members;
    for (int i = c * chunk; i < std::min(spec.n, (c + 1) * chunk); ++i)
      members.push_back(i);
    if (members.empty()) break;
    ann.segments.push_back({"scene_" + std::to_string(c), SegmentKind::scene,
                            members});
    ann.segments.push_back({"cluster_" + std::to_string(c), SegmentKind::cluster,
                            std::move(members)});
  }

  SyntheticData data;
  finish_ground(data.ground, std::move(visual), std::move(colors),
                std::move(importance), std::move(ct));
  data.annotations = std::move(ann);
  return data;
}

SyntheticData make_concept_grid(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  const int d = spec.dims;
  const int m = std::max(1, spec.concepts);
  Matrix visual(spec.n, d), colors(spec.n, d);
  std::vector<std::vector<int>> groups(m);
  for (int i = 0; i < spec.n; ++i) {
    int u = i % m;
    Vector g = gaussian_vector(rng, d);
    Vector base = Vector::Zero(d);
    base[u % d] = 1.0;
    visual.row(i) = base + 0.05 * g;
    Vector h = gaussian_vector(rng, d);
    colors.row(i) = base.cwiseAbs() + 0.1 * h.cwiseAbs();
    groups[u].push_back(i);
  }
  Vector importance = uniform_importance(rng, spec.n);

  ConceptTable ct;
  for (int u = 0; u < m; ++u) ct.names.push_back("c_" + std::to_string(u));
  ct.weights = Vector::Ones(m);
  for (int i = 0; i < spec.n; ++i) ct.hard_labels.push_back({i % m});

  SegmentAnnotation ann;
  for (int u = 0; u < m; ++u) {
    if (groups[u].empty()) continue;
    ann.segments.push_back({"scene_" + std::to_string(u), SegmentKind::scene,
                            groups[u]});
    ann.segments.push_back({"cluster_" + std::to_string(u), SegmentKind::cluster,
                            std::move(groups[u])});
  }

  SyntheticData data;
  finish_ground(data.ground, std::move(visual), std::move(colors),
                std::move(importance), std::move(ct));
  data.annotations = std::move(ann);
  return data;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 10) throw Error("synthetic scenarios need n >= 10");
  if (spec.dims < 2) throw Error("synthetic scenarios need dims >= 2");
  switch (spec.scenario) {
    case Scenario::clustered_with_outliers: return make_clustered(spec);
    case Scenario::uniform: return make_uniform(spec);
    case Scenario::concept_grid: return make_concept_grid(spec);
  }
  throw Error("unknown scenario");
}

void write_synthetic(const SyntheticSpec& spec,
                     const std::filesystem::path& dir) {
  SyntheticData data = generate_synthetic(spec);
  std::filesystem::create_directories(dir);

  write_matrix_binary(dir / "features_visual.bin",
                      data.ground.modality("visual").values);
  write_matrix_binary(dir / "features_colors.bin",
                      data.ground.modality("colors").values);
  write_scalar_column(dir / "importance.csv", *data.ground.importance);

  const ConceptTable& ct = *data.ground.concepts;
  json concepts = json::array();
  for (int u = 0; u < ct.concept_count(); ++u)
    concepts.push_back({{"name", ct.names[u]}, {"weight", ct.weights[u]}});
  json items = json::array();
  for (const auto& labels : ct.hard_labels) {
    json row = json::array();
    for (int u : labels) row.push_back(ct.names[u]);
    items.push_back(row);
  }
  json concepts_doc{{"version", 1}, {"concepts", concepts}, {"items", items}};
  std::ofstream cf(dir / "concepts.json");
  if (!cf) throw Error("cannot write " + (dir / "concepts.json").string());
  cf << concepts_doc.dump(2) << "\n";
  cf.close();

  write_annotations(data.annotations, dir / "annotations.json");

  json manifest{
      {"version", 1},
      {"features",
       json::array({{{"name", "visual"},
                     {"kind", "embedding"},
                     {"path", "features_visual.bin"}},
                    {{"name", "colors"},
                     {"kind", "histogram"},
                     {"path", "features_colors.bin"}}})},
      {"importance", "importance.csv"},
      {"concepts", "concepts.json"},
  };
  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw Error("cannot write " + (dir / "manifest.json").string());
  mf << manifest.dump(2) << "\n";
}

}  // namespace submod
