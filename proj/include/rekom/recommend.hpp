#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rekom/embedding.hpp"
#include "rekom/features.hpp"
#include "rekom/graph.hpp"

namespace rekom {

/// One candidate destination for a source, with its graph context.
struct RecommendationRow {
  std::string source;
  std::string destination;
  double probability = 0.0;
  AssetType dest_asset_type;
  std::size_t dest_degree = 0;
  double dest_centrality = 0.0;
  std::uint32_t dest_community = 0;
  bool same_community = false;
  std::int32_t hop_distance = HopDistance::kUnreachable;  // -1 when unreachable
  bool existing_edge = false;
};

/// Throws DataError naming the first ids on which graph, features and embedding disagree.
void check_consistent(const LineageGraph& graph, const FeatureTable& features, const EmbeddingMatrix& embedding);

/**
 * One row per destination other than `source`, ordered like score_all().
 * Hop distances come from a single breadth-first search from the source.
 * Throws NotFound for an unknown source.
 */
std::vector<RecommendationRow> build_recommendations(const LineageGraph& graph, const FeatureTable& features,
                                                     const EmbeddingMatrix& embedding, std::string_view source);

struct SampleSpec {
  int bins = 10;
  int per_bin = 50;
  std::uint64_t seed = 0;

  /// Throws ValidationError unless bins >= 1 and per_bin >= 1.
  void validate() const;
};

/// Equal-width bin over [0, 1] holding `probability`; 1.0 falls in the last bin.
int probability_bin(double probability, int bins);

/**
 * Draws min(per_bin, bin size) rows without replacement from each non-empty
 * probability bin. The result is sorted by descending probability, then
 * ascending destination id.
 */
std::vector<RecommendationRow> stratified_sample(std::span<const RecommendationRow> rows, const SampleSpec& spec);

}  // namespace rekom
