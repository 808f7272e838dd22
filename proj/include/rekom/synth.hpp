#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rekom/graph.hpp"

namespace rekom {

/// Mean number of `relation` edges each `src_type` node emits towards `dst_type` nodes.
struct LineageRule {
  std::string src_type;
  std::string dst_type;
  std::string relation;
  double mean_fanout = 0.0;
};

/// Knobs for the desk-scale synthetic lineage catalog.
struct SynthConfig {
  std::map<std::string, int> counts;  // nodes per asset type
  std::vector<LineageRule> lineage;
  double owns_per_user = 1.0;   // user -> workbook/table "owns"
  double views_per_user = 4.0;  // user -> workbook/table "views"
  double popularity_sigma = 1.0;  // log-normal spread of per-node activity
  std::uint64_t seed = 0;

  /// About 2,000 nodes across the six default types.
  static SynthConfig defaults();
  /// Same densities with every node count multiplied by `factor` (rounded up).
  SynthConfig scaled(double factor) const;
  /// Throws ValidationError on negative counts/fan-outs, unknown types, rules outside
  /// the allowed schema, or zero total nodes.
  void validate(const AssetTypeRegistry& registry = AssetTypeRegistry::defaults()) const;
};

/// (source type, destination type) pairs an edge may connect.
const std::vector<std::pair<std::string, std::string>>& allowed_edge_schema();

struct SynthGraph {
  std::vector<NodeRecord> nodes;  // grouped by type in registry order
  std::vector<EdgeRecord> edges;  // no duplicates, no self-loops
};

/**
 * Generates a typed lineage graph. Every node draws one log-normal popularity
 * weight that scales both how many edges it emits (Poisson around the rule's
 * mean) and how likely it is to be picked as a target, under every rule it
 * takes part in. Busy assets are busy across relations, as in real catalogs.
 * Deterministic per seed.
 */
SynthGraph generate_graph(const SynthConfig& config,
                          const AssetTypeRegistry& registry = AssetTypeRegistry::defaults());

}  // namespace rekom
