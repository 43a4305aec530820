#include "submod/ground_set.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "submod/matrix_io.hpp"

namespace submod {

using nlohmann::json;

namespace {

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": invalid JSON (" + e.what() + ")");
  }
  return j;
}

void check_rows(int expected, int got, const std::string& what) {
  if (expected != got)
    throw Error("row-count mismatch: " + what + " has " + std::to_string(got) +
                " rows, expected " + std::to_string(expected));
}

std::vector<int> labels_from_probability_row(const Matrix& probs, int row,
                                             double threshold) {
  std::vector<int> out;
  for (int u = 0; u < probs.cols(); ++u)
    if (probs(row, u) >= threshold) out.push_back(u);
  return out;
}

}  // namespace

int ConceptTable::concept_id(const std::string& name) const {
  for (int u = 0; u < concept_count(); ++u)
    if (names[u] == name) return u;
  return -1;
}

bool GroundSet::has_modality(const std::string& name) const {
  for (const auto& [mname, _] : modalities)
    if (mname == name) return true;
  return false;
}

const FeatureMatrix& GroundSet::modality(const std::string& name) const {
  for (const auto& [mname, fm] : modalities)
    if (mname == name) return fm;
  throw Error("unknown modality: " + name);
}

std::vector<std::string> GroundSet::modality_names() const {
  std::vector<std::string> out;
  for (const auto& [mname, _] : modalities) out.push_back(mname);
  return out;
}

GroundSet GroundSet::subset(const std::vector<int>& keep) const {
  if (keep.empty()) throw Error("cannot take an empty ground set subset");
  for (int i : keep)
    if (i < 0 || i >= n) throw Error("subset index out of range");
  GroundSet out;
  out.n = static_cast<int>(keep.size());
  out.costs.resize(out.n);
  out.item_ids.reserve(keep.size());
  for (int r = 0; r < out.n; ++r) {
    out.item_ids.push_back(item_ids[keep[r]]);
    out.costs[r] = costs[keep[r]];
  }
  for (const auto& [mname, fm] : modalities) {
    FeatureMatrix sub;
    sub.kind = fm.kind;
    sub.values.resize(out.n, fm.values.cols());
    for (int r = 0; r < out.n; ++r) sub.values.row(r) = fm.values.row(keep[r]);
    out.modalities.emplace_back(mname, std::move(sub));
  }
  if (concepts) {
    ConceptTable ct;
    ct.names = concepts->names;
    ct.weights = concepts->weights;
    ct.threshold = concepts->threshold;
    for (int r = 0; r < out.n; ++r)
      ct.hard_labels.push_back(concepts->hard_labels[keep[r]]);
    if (concepts->probabilities) {
      Matrix p(out.n, concepts->probabilities->cols());
      for (int r = 0; r < out.n; ++r)
        p.row(r) = concepts->probabilities->row(keep[r]);
      ct.probabilities = std::move(p);
    }
    out.concepts = std::move(ct);
  }
  if (importance) {
    Vector imp(out.n);
    for (int r = 0; r < out.n; ++r) imp[r] = (*importance)[keep[r]];
    out.importance = std::move(imp);
  }
  if (precomputed_kernel) {
    if (!precomputed_kernel->is_sparse()) {
      Matrix sub(out.n, out.n);
      for (int a = 0; a < out.n; ++a)
        for (int b = 0; b < out.n; ++b)
          sub(a, b) = precomputed_kernel->at(keep[a], keep[b]);
      out.precomputed_kernel = std::make_shared<SimilarityKernel>(
          SimilarityKernel::from_dense(std::move(sub)));
    } else {
      std::vector<int> pos(n, -1);
      for (int r = 0; r < out.n; ++r) pos[keep[r]] = r;
      std::vector<SimilarityKernel::SparseRow> rows(out.n);
      for (int r = 0; r < out.n; ++r)
        for (const auto& [j, s] : precomputed_kernel->sparse_rows()[keep[r]])
          if (pos[j] >= 0) rows[r].emplace_back(pos[j], s);
      out.precomputed_kernel = std::make_shared<SimilarityKernel>(
          SimilarityKernel::from_sparse(out.n, std::move(rows)));
    }
  }
  return out;
}

ConceptTable concept_table_from_json_file(const std::filesystem::path& path) {
  json j = parse_json_file(path);
  ConceptTable ct;
  if (!j.contains("concepts") || !j["concepts"].is_array() || j["concepts"].empty())
    throw Error(path.string() + ": concept table needs a nonempty \"concepts\" array");
  ct.weights.resize(j["concepts"].size());
  int u = 0;
  for (const auto& c : j["concepts"]) {
    ct.names.push_back(c.at("name").get<std::string>());
    double w = c.value("weight", 1.0);
    if (w < 0) throw Error(path.string() + ": negative concept weight");
    ct.weights[u++] = w;
  }
  std::set<std::string> unique(ct.names.begin(), ct.names.end());
  if (unique.size() != ct.names.size())
    throw Error(path.string() + ": duplicate concept names");
  if (j.contains("items")) {
    for (const auto& item : j["items"]) {
      std::vector<int> labels;
      for (const auto& name : item) {
        int id = ct.concept_id(name.get<std::string>());
        if (id < 0)
          throw Error(path.string() + ": unknown concept \"" +
                      name.get<std::string>() + "\" in items");
        labels.push_back(id);
      }
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
      ct.hard_labels.push_back(std::move(labels));
    }
  }
  return ct;
}

GroundSet load_ground_set(const std::filesystem::path& manifest_path) {
  json manifest = parse_json_file(manifest_path);
  auto base = manifest_path.parent_path();
  auto resolve = [&](const std::string& rel) { return base / rel; };

  GroundSet gs;
  int n = -1;
  auto take_n = [&](int rows, const std::string& what) {
    if (n < 0)
      n = rows;
    else
      check_rows(n, rows, what);
  };

  // features
  if (manifest.contains("features")) {
    for (const auto& f : manifest["features"]) {
      FeatureMatrix fm;
      std::string name = f.at("name").get<std::string>();
      std::string kind = f.value("kind", "embedding");
      if (kind == "embedding")
        fm.kind = FeatureMatrix::Kind::embedding;
      else if (kind == "histogram")
        fm.kind = FeatureMatrix::Kind::histogram;
      else
        throw Error("feature \"" + name + "\": unknown kind \"" + kind + "\"");
      fm.values = read_matrix(resolve(f.at("path").get<std::string>()));
      if (!fm.values.allFinite())
        throw Error("feature \"" + name + "\": non-finite values");
      if (fm.kind == FeatureMatrix::Kind::histogram && fm.values.minCoeff() < 0)
        throw Error("feature \"" + name + "\": histogram values must be >= 0");
      take_n(fm.rows(), "feature \"" + name + "\"");
      if (gs.has_modality(name)) throw Error("duplicate modality name: " + name);
      gs.modalities.emplace_back(name, std::move(fm));
    }
  }

  // precomputed kernel
  if (manifest.contains("kernel")) {
    Matrix k = read_matrix(resolve(manifest["kernel"].get<std::string>()));
    take_n(static_cast<int>(k.rows()), "kernel");
    gs.precomputed_kernel = std::make_shared<SimilarityKernel>(
        SimilarityKernel::from_dense(std::move(k)));
  }

  // costs
  if (manifest.contains("costs")) {
    gs.costs = read_scalar_column(resolve(manifest["costs"].get<std::string>()));
    take_n(static_cast<int>(gs.costs.size()), "costs");
  }

  // importance
  if (manifest.contains("importance")) {
    Vector imp = read_scalar_column(resolve(manifest["importance"].get<std::string>()));
    take_n(static_cast<int>(imp.size()), "importance");
    if (!imp.allFinite() || imp.minCoeff() < 0)
      throw Error("importance scores must be finite and nonnegative");
    gs.importance = std::move(imp);
  }

  // concepts: hard labels and/or probabilities
  std::optional<ConceptTable> ct;
  if (manifest.contains("concepts"))
    ct = concept_table_from_json_file(resolve(manifest["concepts"].get<std::string>()));
  if (manifest.contains("concept_probabilities")) {
    if (!ct)
      throw Error("concept_probabilities given without a concept list; "
                  "add a \"concepts\" file naming them");
    Matrix probs = read_matrix(resolve(manifest["concept_probabilities"].get<std::string>()));
    if (probs.cols() != ct->concept_count())
      throw Error("concept probability matrix has " + std::to_string(probs.cols()) +
                  " columns for " + std::to_string(ct->concept_count()) + " concepts");
    if (!probs.allFinite() || probs.minCoeff() < 0 || probs.maxCoeff() > 1)
      throw Error("concept probabilities must lie in [0,1]");
    take_n(static_cast<int>(probs.rows()), "concept probabilities");
    ct->threshold = manifest.value("concept_threshold", 0.5);
    if (ct->hard_labels.empty()) {
      for (int i = 0; i < probs.rows(); ++i)
        ct->hard_labels.push_back(
            labels_from_probability_row(probs, i, ct->threshold));
    } else {
      check_rows(static_cast<int>(probs.rows()),
                 static_cast<int>(ct->hard_labels.size()), "concept items");
      for (int i = 0; i < probs.rows(); ++i)
        if (ct->hard_labels[i] != labels_from_probability_row(probs, i, ct->threshold))
          throw Error("concept hard labels disagree with probabilities at "
                      "threshold for item " + std::to_string(i));
    }
    ct->probabilities = std::move(probs);
  }
  if (ct) {
    if (ct->hard_labels.empty())
      throw Error("concept table has neither item labels nor probabilities");
    take_n(ct->item_count(), "concept items");
    gs.concepts = std::move(ct);
  }

  if (n < 0) throw Error(manifest_path.string() + ": manifest references no data");
  if (n < 1) throw Error("ground set must contain at least one item");
  gs.n = n;

  // item ids: inline list, file, or positional defaults
  if (manifest.contains("item_ids")) {
    const auto& ids = manifest["item_ids"];
    if (ids.is_array()) {
      for (const auto& v : ids) gs.item_ids.push_back(v.get<std::string>());
    } else {
      std::ifstream in(resolve(ids.get<std::string>()));
      if (!in) throw Error("missing file: " + resolve(ids.get<std::string>()).string());
      std::string line;
      while (std::getline(in, line))
        if (!line.empty()) gs.item_ids.push_back(line);
    }
    check_rows(n, static_cast<int>(gs.item_ids.size()), "item_ids");
  } else {
    for (int i = 0; i < n; ++i) gs.item_ids.push_back(std::to_string(i));
  }

  if (gs.costs.size() == 0) gs.costs = Vector::Ones(n);
  if (!gs.costs.allFinite() || gs.costs.minCoeff() <= 0)
    throw Error("costs must be finite and strictly positive");

  return gs;
}

namespace {

struct ModalityPrep {
  const FeatureMatrix* fm = nullptr;
  double weight = 0.0;
  Matrix prepared;        // normalized (embedding) or centered (histogram) rows
  Vector hist_norms;      // histogram only
};

std::vector<ModalityPrep> prepare_modalities(const GroundSet& gs,
                                             const std::vector<std::string>& names,
                                             const std::vector<double>& weights) {
  if (names.empty()) throw Error("build_kernel needs at least one modality");
  if (names.size() != weights.size())
    throw Error("build_kernel: weights length must match modality names");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0 || !std::isfinite(w)) throw Error("build_kernel: weights must be nonnegative");
    total += w;
  }
  if (total <= 0) throw Error("build_kernel: at least one weight must be positive");

  std::vector<ModalityPrep> preps;
  for (std::size_t m = 0; m < names.size(); ++m) {
    ModalityPrep prep;
    prep.fm = &gs.modality(names[m]);
    prep.weight = weights[m] / total;
    if (prep.fm->kind == FeatureMatrix::Kind::embedding) {
      prep.prepared = prep.fm->values;
      for (int i = 0; i < gs.n; ++i) {
        double norm = prep.prepared.row(i).norm();
        if (norm == 0.0)
          throw Error("zero-norm feature row in modality \"" + names[m] +
                      "\" for item " + gs.item_ids[i]);
        prep.prepared.row(i) /= norm;
      }
    } else {
      // Center each histogram across its bins; zero norm marks zero variance.
      const Matrix& h = prep.fm->values;
      prep.prepared.resize(h.rows(), h.cols());
      prep.hist_norms.resize(h.rows());
      for (int i = 0; i < gs.n; ++i) {
        double mean = h.row(i).mean();
        prep.prepared.row(i) = h.row(i).array() - mean;
        prep.hist_norms[i] = prep.prepared.row(i).norm();
      }
    }
    preps.push_back(std::move(prep));
  }
  return preps;
}

// Row i of the combined similarity matrix.  Each modality contributes a
// [0,1]-scaled score: (cosine+1)/2 for embeddings, (Pearson+1)/2 for
// histograms.  Degenerate (zero-variance) histograms score 1 against an
// identical histogram and 1/2 against anything else.
void fill_similarity_row(const GroundSet& gs, const std::vector<ModalityPrep>& preps,
                         int i, Vector& row, Vector& scratch) {
  row.setZero();
  for (const auto& prep : preps) {
    if (prep.fm->kind == FeatureMatrix::Kind::embedding) {
      scratch.noalias() = prep.prepared * prep.prepared.row(i).transpose();
      row.array() += prep.weight * 0.5 * (scratch.array() + 1.0);
    } else {
      scratch.noalias() = prep.prepared * prep.prepared.row(i).transpose();
      for (int j = 0; j < gs.n; ++j) {
        double contrib;
        if (prep.hist_norms[i] == 0.0 || prep.hist_norms[j] == 0.0)
          contrib = prep.fm->values.row(i) == prep.fm->values.row(j) ? 1.0 : 0.5;
        else
          contrib = 0.5 * (scratch[j] / (prep.hist_norms[i] * prep.hist_norms[j]) + 1.0);
        row[j] += prep.weight * contrib;
      }
    }
  }
  for (int j = 0; j < gs.n; ++j) row[j] = std::clamp(row[j], 0.0, 1.0);
  row[i] = 1.0;
}

}  // namespace

SimilarityKernel build_kernel(const GroundSet& gs,
                              const std::vector<std::string>& modality_names,
                              const std::vector<double>& weights,
                              std::optional<int> sparsify_k) {
  if (modality_names.empty()) {
    if (gs.precomputed_kernel) return *gs.precomputed_kernel;
    throw Error("build_kernel needs at least one modality");
  }
  auto preps = prepare_modalities(gs, modality_names, weights);

  Matrix sim(gs.n, gs.n);
  parallel_for(0, gs.n, [&](int i) {
    Vector row(gs.n), scratch(gs.n);
    fill_similarity_row(gs, preps, i, row, scratch);
    sim.col(i) = row;  // symmetric by construction, so store as column
  });
  // Guard against asymmetry from floating-point non-commutativity: none is
  // expected (entry (i,j) and (j,i) run the same arithmetic), but normalize
  // anyway so downstream validation never trips.
  sim = sim.cwiseMax(sim.transpose().eval());

  if (!sparsify_k) return SimilarityKernel::from_dense(std::move(sim));

  int k = *sparsify_k;
  if (k < 1) throw Error("sparsify_k must be >= 1");
  // Keep the k most similar neighbours of every row, then symmetrize by
  // union so the result is a valid undirected graph.
  std::vector<std::vector<int>> kept(gs.n);
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < gs.n; ++i) {
    order.clear();
    for (int j = 0; j < gs.n; ++j)
      if (j != i) order.emplace_back(-sim(i, j), j);
    int take = std::min<int>(k, static_cast<int>(order.size()));
    std::partial_sort(order.begin(), order.begin() + take, order.end());
    for (int t = 0; t < take; ++t) {
      kept[i].push_back(order[t].second);
      kept[order[t].second].push_back(i);
    }
  }
  std::vector<SimilarityKernel::SparseRow> rows(gs.n);
  for (int i = 0; i < gs.n; ++i) {
    auto& js = kept[i];
    js.push_back(i);
    std::sort(js.begin(), js.end());
    js.erase(std::unique(js.begin(), js.end()), js.end());
    for (int j : js) rows[i].emplace_back(j, sim(i, j));
  }
  return SimilarityKernel::from_sparse(gs.n, std::move(rows));
}

std::vector<int> filter_by_query(const GroundSet& gs,
                                 const std::string& concept_name) {
  if (!gs.concepts) throw Error("query filtering needs concept annotations");
  int id = gs.concepts->concept_id(concept_name);
  if (id < 0) throw Error("unknown concept: " + concept_name);
  std::vector<int> keep;
  for (int i = 0; i < gs.n; ++i) {
    const auto& labels = gs.concepts->hard_labels[i];
    if (std::binary_search(labels.begin(), labels.end(), id)) keep.push_back(i);
  }
  if (keep.empty()) throw Error("empty query ground set");
  return keep;
}

std::vector<int> filter_by_query(const GroundSet& gs,
                                 const std::filesystem::path& relevance_path,
                                 double threshold) {
  Vector rel = read_scalar_column(relevance_path);
  check_rows(gs.n, static_cast<int>(rel.size()), "relevance scores");
  std::vector<int> keep;
  for (int i = 0; i < gs.n; ++i)
    if (rel[i] >= threshold) keep.push_back(i);
  if (keep.empty()) throw Error("empty query ground set");
  return keep;
}

}  // namespace submod
