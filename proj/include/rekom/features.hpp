#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rekom/graph.hpp"
#include "rekom/matrix.hpp"

namespace rekom {

/// Per-node vectors below are indexed by NodeIndex, i.e. ordered by node id.
std::vector<std::size_t> compute_degree(const LineageGraph& graph);

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-8;  // on the L1 change between iterates
  int max_iter = 200;
};

struct CentralityResult {
  std::vector<double> scores;
  int iterations = 0;
  bool converged = false;  // false: `scores` is the last iterate
};

/// PageRank over the undirected view with uniform teleport; isolated nodes
/// redistribute their mass uniformly. Throws DataError on an empty graph.
CentralityResult compute_centrality(const LineageGraph& graph, const PageRankOptions& options = {});

/**
 * Label propagation community detection.
 *
 * Nodes are visited in sorted-id order permuted once by a shuffle seeded with
 * `seed`. Each visit adopts the label with the largest total edge weight among
 * the node's neighbours, breaking ties towards the lowest label. An edge weighs
 * 1 + (number of triangles through it), so bridges between dense groups carry
 * less pull than edges inside them. Stops at a fixed point or after 100 sweeps;
 * labels are compacted to 0..C-1 in order of first appearance by node id.
 */
std::vector<std::uint32_t> compute_communities(const LineageGraph& graph, std::uint64_t seed);

/// Number of triangles through each edge of `graph.edges()`.
std::vector<std::uint32_t> edge_triangle_counts(const LineageGraph& graph);

class HopDistance {
 public:
  static constexpr std::int32_t kUnreachable = -1;

  constexpr HopDistance() = default;
  constexpr explicit HopDistance(std::int32_t hops) : hops_(hops) {}
  static constexpr HopDistance unreachable() { return HopDistance{}; }

  constexpr bool reachable() const { return hops_ != kUnreachable; }
  /// Throws std::bad_optional_access when unreachable.
  constexpr std::int32_t value() const {
    if (!reachable()) throw std::bad_optional_access();
    return hops_;
  }
  /// Tabular encoding: hop count, or -1 when unreachable.
  constexpr std::int32_t encoded() const { return hops_; }

  friend constexpr bool operator==(HopDistance, HopDistance) = default;

 private:
  std::int32_t hops_ = kUnreachable;
};

/// Breadth-first hop counts from `source` to every node (-1 when unreachable).
std::vector<std::int32_t> bfs_hops(const LineageGraph& graph, NodeIndex source);

/// Throws NotFound for unknown ids.
HopDistance shortest_path_hops(const LineageGraph& graph, std::string_view u, std::string_view v);

struct FeatureRow {
  std::string id;
  int asset_ordinal = 0;
  std::size_t degree = 0;
  double centrality = 0.0;
  std::uint32_t community = 0;
};

/// Derived features, one row per node, sorted by id.
class FeatureTable {
 public:
  FeatureTable() = default;
  /// Sorts rows by id. Throws DataError on duplicate ids.
  explicit FeatureTable(std::vector<FeatureRow> rows);

  std::span<const FeatureRow> rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const FeatureRow* find(std::string_view id) const;

 private:
  std::vector<FeatureRow> rows_;
};

struct DeriveOptions {
  PageRankOptions pagerank;
  std::uint64_t community_seed = 0;
};

/// Runs degree, centrality and community detection and assembles the table.
/// `centrality_converged`, when given, receives PageRank's convergence flag.
FeatureTable derive_features(const LineageGraph& graph, const DeriveOptions& options = {},
                             bool* centrality_converged = nullptr);

/// Header `id,asset_type,degree,centrality,community`.
void write_features_csv(std::ostream& out, const LineageGraph& graph, const FeatureTable& table);
/// Asset types are resolved against `registry`.
FeatureTable read_features_csv(std::istream& in,
                               const AssetTypeRegistry& registry = AssetTypeRegistry::defaults());

struct FeatureMatrix {
  Matrix values;                 // N x (K + 3)
  std::vector<std::string> ids;  // row order (sorted ids)
};

/**
 * Per-node model input:
 *   one-hot(asset type, K) | log(1 + degree) | centrality * N | |community| / N
 * Throws DataError naming the first node without a feature row.
 */
FeatureMatrix build_feature_matrix(const LineageGraph& graph, const FeatureTable& features);

}  // namespace rekom
