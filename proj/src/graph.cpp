#include "rekom/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "rekom/csv.hpp"
#include "rekom/error.hpp"

namespace rekom {

AssetTypeRegistry::AssetTypeRegistry(std::vector<std::string> names) {
  if (names.empty()) throw ValidationError("asset type set must not be empty");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw ValidationError("asset type name must not be empty");
    if (!seen.insert(names[i]).second) throw ValidationError("duplicate asset type: " + names[i]);
    types_.push_back({std::move(names[i]), static_cast<int>(i)});
  }
}

const AssetTypeRegistry& AssetTypeRegistry::defaults() {
  static const AssetTypeRegistry registry(
      {"user", "database", "table", "workflow", "workbook", "curated-source"});
  return registry;
}

std::optional<AssetType> AssetTypeRegistry::find(std::string_view name) const {
  for (const auto& t : types_) {
    if (t.name == name) return t;
  }
  return std::nullopt;
}

std::optional<NodeIndex> LineageGraph::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex LineageGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw NotFound("unknown node id: " + std::string(id));
}

bool LineageGraph::has_edge(NodeIndex a, NodeIndex b) const {
  if (degree(a) > degree(b)) std::swap(a, b);
  auto nbrs = adjacent(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

namespace {

std::map<std::string, std::string> parse_meta(const std::string& text, std::size_t line) {
  std::map<std::string, std::string> meta;
  if (text.empty()) return meta;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("meta_json is not valid JSON: ") + e.what(), line);
  }
  if (!j.is_object()) throw DataError("meta_json must be a JSON object", line);
  for (auto it = j.begin(); it != j.end(); ++it) {
    meta[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
  }
  return meta;
}

}  // namespace

GraphBuilder& GraphBuilder::add_node(std::string id, std::string_view asset_type, std::string label,
                                     std::string meta_json, std::size_t line) {
  if (id.empty()) throw DataError("empty node id", line);
  auto type = registry_->find(asset_type);
  if (!type) throw DataError("unknown asset type `" + std::string(asset_type) + "` for node " + id, line);
  NodeRecord rec;
  rec.meta = parse_meta(meta_json, line);
  rec.id = std::move(id);
  rec.asset_type = *type;
  rec.label = std::move(label);
  rec.meta_json = std::move(meta_json);
  nodes_.push_back(std::move(rec));
  node_lines_.push_back(line);
  return *this;
}

GraphBuilder& GraphBuilder::add_edge(std::string src, std::string dst, std::string relation,
                                     std::size_t line) {
  if (src == dst) throw DataError("self-loop on node " + src, line);
  edges_.push_back({{std::move(src), std::move(dst), std::move(relation)}, line});
  return *this;
}

LineageGraph GraphBuilder::build() && {
  LineageGraph g;
  g.registry_ = registry_;

  std::vector<std::size_t> order(nodes_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes_[a].id < nodes_[b].id; });
  g.nodes_.reserve(nodes_.size());
  g.index_.reserve(nodes_.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& rec = nodes_[order[k]];
    if (k > 0 && g.nodes_.back().id == rec.id) {
      throw DataError("duplicate node id: " + rec.id, node_lines_[order[k]]);
    }
    g.index_.emplace(rec.id, static_cast<NodeIndex>(k));
    g.nodes_.push_back(std::move(rec));
  }

  // Resolve endpoints and drop undirected duplicates, keeping the first occurrence.
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size());
  g.edges_.reserve(edges_.size());
  for (auto& pending : edges_) {
    auto s = g.find(pending.edge.src);
    if (!s) throw DataError("edge references unknown node id: " + pending.edge.src, pending.line);
    auto d = g.find(pending.edge.dst);
    if (!d) throw DataError("edge references unknown node id: " + pending.edge.dst, pending.line);
    const std::uint64_t key = (std::uint64_t{std::min(*s, *d)} << 32) | std::max(*s, *d);
    if (!seen.insert(key).second) {
      ++g.duplicates_;
      continue;
    }
    g.edges_.push_back({*s, *d, std::move(pending.edge.relation)});
  }

  const std::size_t n = g.nodes_.size();
  g.offsets_.assign(n + 1, 0);
  for (const auto& e : g.edges_) {
    ++g.offsets_[e.src + 1];
    ++g.offsets_[e.dst + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adjacency_[cursor[e.src]++] = e.dst;
    g.adjacency_[cursor[e.dst]++] = e.src;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }

  nodes_.clear();
  edges_.clear();
  return g;
}

LineageGraph ingest_graph(std::istream& nodes, std::istream& edges, const AssetTypeRegistry& registry) {
  GraphBuilder builder(registry);

  static constexpr std::string_view kNodeHeader[] = {"id", "asset_type", "label", "meta_json"};
  static constexpr std::string_view kEdgeHeader[] = {"src", "dst", "relation"};

  csv::Reader node_reader(nodes);
  csv::Record rec;
  // An entirely empty stream is an empty graph.
  if (nodes.peek() != std::char_traits<char>::eof()) {
    csv::expect_header(node_reader, kNodeHeader, "nodes file");
    while (node_reader.next(rec)) {
      if (rec.fields.size() != 4) {
        throw DataError("expected 4 fields, got " + std::to_string(rec.fields.size()), rec.line);
      }
      builder.add_node(std::move(rec.fields[0]), rec.fields[1], std::move(rec.fields[2]),
                       std::move(rec.fields[3]), rec.line);
    }
  }

  csv::Reader edge_reader(edges);
  if (edges.peek() != std::char_traits<char>::eof()) {
    csv::expect_header(edge_reader, kEdgeHeader, "edges file");
    while (edge_reader.next(rec)) {
      if (rec.fields.size() != 3) {
        throw DataError("expected 3 fields, got " + std::to_string(rec.fields.size()), rec.line);
      }
      builder.add_edge(std::move(rec.fields[0]), std::move(rec.fields[1]), std::move(rec.fields[2]),
                       rec.line);
    }
  }
  return std::move(builder).build();
}

LineageGraph load_graph_dir(const std::filesystem::path& dir, const AssetTypeRegistry& registry) {
  const auto nodes_path = dir / "nodes.csv";
  const auto edges_path = dir / "edges.csv";
  std::ifstream nodes(nodes_path, std::ios::binary);
  if (!nodes) throw DataError("cannot open " + nodes_path.string());
  std::ifstream edges(edges_path, std::ios::binary);
  if (!edges) throw DataError("cannot open " + edges_path.string());
  try {
    return ingest_graph(nodes, edges, registry);
  } catch (const DataError& e) {
    // Name the file alongside the line number.
    throw DataError(std::string(e.what()) + " (in " + dir.string() + ")");
  }
}

std::vector<std::string> neighbors(const LineageGraph& graph, std::string_view id) {
  std::vector<std::string> out;
  for (NodeIndex j : graph.adjacent(graph.index_of(id))) out.push_back(graph.node(j).id);
  return out;
}

const NodeRecord& get_node(const LineageGraph& graph, std::string_view id) {
  return graph.node(graph.index_of(id));
}

void write_nodes_csv(std::ostream& out, std::span<const NodeRecord> nodes) {
  csv::write_row(out, {"id", "asset_type", "label", "meta_json"});
  for (const auto& n : nodes) csv::write_row(out, {n.id, n.asset_type.name, n.label, n.meta_json});
}

void write_edges_csv(std::ostream& out, std::span<const EdgeRecord> edges) {
  csv::write_row(out, {"src", "dst", "relation"});
  for (const auto& e : edges) csv::write_row(out, {e.src, e.dst, e.relation});
}

}  // namespace rekom
