#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rekom {

using NodeIndex = std::uint32_t;

struct AssetType {
  std::string name;
  int ordinal = 0;

  friend bool operator==(const AssetType&, const AssetType&) = default;
};

/// The configured set of asset types. Ordinals are 0..K-1 in declaration order.
class AssetTypeRegistry {
 public:
  /// Throws ValidationError on an empty list or duplicate names.
  explicit AssetTypeRegistry(std::vector<std::string> names);

  /// user, database, table, workflow, workbook, curated-source
  static const AssetTypeRegistry& defaults();

  std::optional<AssetType> find(std::string_view name) const;
  const AssetType& at(int ordinal) const { return types_.at(static_cast<std::size_t>(ordinal)); }
  std::size_t size() const noexcept { return types_.size(); }
  std::span<const AssetType> types() const noexcept { return types_; }

 private:
  std::vector<AssetType> types_;
};

struct NodeRecord {
  std::string id;
  AssetType asset_type;
  std::string label;
  std::map<std::string, std::string> meta;
  std::string meta_json;  // verbatim source text of `meta`
};

struct EdgeRecord {
  std::string src;
  std::string dst;
  std::string relation;
};

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/**
 * Immutable typed lineage graph.
 *
 * Nodes are stored sorted by id, so a NodeIndex doubles as the id's rank in
 * sorted order and every per-node vector in the library is ordered by id.
 * Edges are undirected for all derived computation; the original direction and
 * relation label are kept for display.
 */
class LineageGraph {
 public:
  struct Edge {
    NodeIndex src;
    NodeIndex dst;
    std::string relation;
  };

  LineageGraph() = default;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t duplicate_edges_merged() const noexcept { return duplicates_; }

  const NodeRecord& node(NodeIndex i) const { return nodes_[i]; }
  std::span<const NodeRecord> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::optional<NodeIndex> find(std::string_view id) const;
  /// Throws NotFound.
  NodeIndex index_of(std::string_view id) const;

  /// Undirected neighbours, sorted ascending (equivalently by id).
  std::span<const NodeIndex> adjacent(NodeIndex i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeIndex i) const { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(NodeIndex a, NodeIndex b) const;

  const AssetTypeRegistry& asset_types() const { return *registry_; }

 private:
  friend class GraphBuilder;

  const AssetTypeRegistry* registry_ = &AssetTypeRegistry::defaults();
  std::vector<NodeRecord> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> adjacency_;
  std::unordered_map<std::string, NodeIndex, StringHash, std::equal_to<>> index_;
  std::size_t duplicates_ = 0;
};

/// Collects nodes and edges, validates them, and produces a LineageGraph.
class GraphBuilder {
 public:
  /// The registry must outlive every graph built from it.
  explicit GraphBuilder(const AssetTypeRegistry& registry = AssetTypeRegistry::defaults())
      : registry_(&registry) {}

  /// `line` is used only in error messages. Throws DataError on duplicate id or unknown type.
  GraphBuilder& add_node(std::string id, std::string_view asset_type, std::string label = {},
                         std::string meta_json = "{}", std::size_t line = 0);
  /// Endpoints are resolved in build(). Self-loops are rejected immediately.
  GraphBuilder& add_edge(std::string src, std::string dst, std::string relation = "lineage",
                         std::size_t line = 0);

  LineageGraph build() &&;

 private:
  struct PendingEdge {
    EdgeRecord edge;
    std::size_t line;
  };
  const AssetTypeRegistry* registry_;
  std::vector<NodeRecord> nodes_;
  std::vector<PendingEdge> edges_;
  std::vector<std::size_t> node_lines_;
};

/// Parses `id,asset_type,label,meta_json` and `src,dst,relation` streams.
LineageGraph ingest_graph(std::istream& nodes, std::istream& edges,
                          const AssetTypeRegistry& registry = AssetTypeRegistry::defaults());

/// Loads `nodes.csv` and `edges.csv` from a directory.
LineageGraph load_graph_dir(const std::filesystem::path& dir,
                            const AssetTypeRegistry& registry = AssetTypeRegistry::defaults());

/// Sorted neighbour ids. Throws NotFound.
std::vector<std::string> neighbors(const LineageGraph& graph, std::string_view id);

/// Throws NotFound.
const NodeRecord& get_node(const LineageGraph& graph, std::string_view id);

void write_nodes_csv(std::ostream& out, std::span<const NodeRecord> nodes);
void write_edges_csv(std::ostream& out, std::span<const EdgeRecord> edges);

}  // namespace rekom
