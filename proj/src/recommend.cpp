#include "rekom/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rekom/error.hpp"

namespace rekom {

void check_consistent(const LineageGraph& graph, const FeatureTable& features, const EmbeddingMatrix& embedding) {
  std::vector<std::string> missing;
  auto note = [&](const std::string& what) {
    if (missing.size() < 5) missing.push_back(what);
  };
  for (const auto& node : graph.nodes()) {
    if (!features.find(node.id)) note(node.id + " (no feature row)");
    if (!embedding.find(node.id)) note(node.id + " (no embedding row)");
  }
  if (features.size() != graph.node_count()) {
    for (const auto& row : features.rows()) {
      if (!graph.find(row.id)) note(row.id + " (feature row for unknown node)");
    }
  }
  if (embedding.rows() != graph.node_count()) {
    for (const auto& id : embedding.ids()) {
      if (!graph.find(id)) note(id + " (embedding row for unknown node)");
    }
  }
  if (!missing.empty()) {
    std::string msg = "inconsistent artifacts:";
    for (const auto& m : missing) msg += " " + m + ";";
    throw DataError(msg);
  }
}

std::vector<RecommendationRow> build_recommendations(const LineageGraph& graph, const FeatureTable& features,
                                                     const EmbeddingMatrix& embedding, std::string_view source) {
  const NodeIndex src = graph.index_of(source);
  if (features.size() != graph.node_count() || embedding.rows() != graph.node_count()) {
    check_consistent(graph, features, embedding);
  }

  // Fast path: both tables are aligned with graph order when produced by this library.
  std::vector<const FeatureRow*> feature_of(graph.node_count());
  std::vector<std::size_t> embedding_row(graph.node_count());
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    const auto& id = graph.node(i).id;
    const auto& rows = features.rows();
    feature_of[i] = rows[i].id == id ? &rows[i] : features.find(id);
    if (embedding.ids()[i] == id) {
      embedding_row[i] = i;
    } else if (auto r = embedding.find(id)) {
      embedding_row[i] = *r;
    } else {
      feature_of[i] = nullptr;
    }
    if (!feature_of[i]) check_consistent(graph, features, embedding);
  }

  const auto hops = bfs_hops(graph, src);
  const auto z = embedding.row(embedding_row[src]);
  const auto source_community = feature_of[src]->community;

  std::vector<RecommendationRow> rows;
  rows.reserve(graph.node_count() - 1);
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    if (i == src) continue;
    const auto& f = *feature_of[i];
    RecommendationRow row;
    row.source = graph.node(src).id;
    row.destination = graph.node(i).id;
    row.probability = sigmoid(z.dot(embedding.row(embedding_row[i])));
    row.dest_asset_type = graph.node(i).asset_type;
    row.dest_degree = f.degree;
    row.dest_centrality = f.centrality;
    row.dest_community = f.community;
    row.same_community = f.community == source_community;
    row.hop_distance = hops[i];
    row.existing_edge = hops[i] == 1;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const RecommendationRow& a, const RecommendationRow& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.destination < b.destination;
  });
  return rows;
}

void SampleSpec::validate() const {
  if (bins < 1) throw ValidationError("bins must be >= 1");
  if (per_bin < 1) throw ValidationError("per_bin must be >= 1");
}

int probability_bin(double probability, int bins) {
  const double scaled = std::floor(std::clamp(probability, 0.0, 1.0) * bins);
  return std::min(bins - 1, static_cast<int>(scaled));
}

std::vector<RecommendationRow> stratified_sample(std::span<const RecommendationRow> rows, const SampleSpec& spec) {
  spec.validate();
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(spec.bins));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    members[static_cast<std::size_t>(probability_bin(rows[i].probability, spec.bins))].push_back(i);
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<RecommendationRow> out;
  const auto quota = static_cast<std::size_t>(spec.per_bin);
  for (auto& bin : members) {
    const std::size_t take = std::min(quota, bin.size());
    // Partial Fisher-Yates: the first `take` slots become a uniform draw without replacement.
    for (std::size_t k = 0; k < take; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, bin.size() - 1);
      std::swap(bin[k], bin[pick(rng)]);
      out.push_back(rows[bin[k]]);
    }
  }
  std::sort(out.begin(), out.end(), [](const RecommendationRow& a, const RecommendationRow& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.destination < b.destination;
  });
  return out;
}

}  // namespace rekom
