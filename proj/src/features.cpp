#include "rekom/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rekom/csv.hpp"
#include "rekom/error.hpp"
#include "rekom/format.hpp"

namespace rekom {

std::vector<std::size_t> compute_degree(const LineageGraph& graph) {
  std::vector<std::size_t> degree(graph.node_count());
  for (NodeIndex i = 0; i < degree.size(); ++i) degree[i] = graph.degree(i);
  return degree;
}

CentralityResult compute_centrality(const LineageGraph& graph, const PageRankOptions& options) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw DataError("centrality of an empty graph is undefined");

  const double d = options.damping;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n), next(n), share(n);

  CentralityResult result;
  for (int it = 1; it <= options.max_iter; ++it) {
    double dangling = 0.0;
    for (NodeIndex i = 0; i < n; ++i) {
      const auto deg = graph.degree(i);
      if (deg == 0) {
        dangling += rank[i];
        share[i] = 0.0;
      } else {
        share[i] = rank[i] / static_cast<double>(deg);
      }
    }
    const double base = (1.0 - d) * inv_n + d * dangling * inv_n;
    double change = 0.0;
    for (NodeIndex i = 0; i < n; ++i) {
      double sum = 0.0;
      for (NodeIndex j : graph.adjacent(i)) sum += share[j];
      next[i] = base + d * sum;
      change += std::abs(next[i] - rank[i]);
    }
    rank.swap(next);
    result.iterations = it;
    if (change < options.tol) {
      result.converged = true;
      break;
    }
  }

  const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
  for (double& r : rank) r /= total;
  result.scores = std::move(rank);
  return result;
}

namespace {

std::uint32_t common_neighbours(const LineageGraph& graph, NodeIndex a, NodeIndex b) {
  auto small = graph.adjacent(a);
  auto large = graph.adjacent(b);
  if (small.size() > large.size()) std::swap(small, large);
  std::uint32_t count = 0;
  auto lo = large.begin();
  for (NodeIndex x : small) {
    lo = std::lower_bound(lo, large.end(), x);
    if (lo == large.end()) break;
    if (*lo == x) ++count;
  }
  return count;
}

}  // namespace

std::vector<std::uint32_t> edge_triangle_counts(const LineageGraph& graph) {
  std::vector<std::uint32_t> counts;
  counts.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) counts.push_back(common_neighbours(graph, e.src, e.dst));
  return counts;
}

std::vector<std::uint32_t> compute_communities(const LineageGraph& graph, std::uint64_t seed) {
  const std::size_t n = graph.node_count();
  if (n == 0) return {};

  // Edge weights aligned with the adjacency layout of each node.
  std::vector<std::vector<std::uint32_t>> weight(n);
  for (NodeIndex v = 0; v < n; ++v) weight[v].assign(graph.degree(v), 0);
  for (NodeIndex v = 0; v < n; ++v) {
    auto adj = graph.adjacent(v);
    for (std::size_t p = 0; p < adj.size(); ++p) {
      const NodeIndex u = adj[p];
      if (u < v) continue;
      const std::uint32_t w = 1 + common_neighbours(graph, v, u);
      weight[v][p] = w;
      auto back = graph.adjacent(u);
      const auto q = std::lower_bound(back.begin(), back.end(), v) - back.begin();
      weight[u][static_cast<std::size_t>(q)] = w;
    }
  }

  std::vector<NodeIndex> order(n);
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::uint32_t> label(n);
  std::iota(label.begin(), label.end(), 0u);

  std::vector<std::uint64_t> tally(n, 0);
  std::vector<std::uint32_t> touched;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool changed = false;
    for (NodeIndex v : order) {
      auto adj = graph.adjacent(v);
      if (adj.empty()) continue;
      touched.clear();
      for (std::size_t p = 0; p < adj.size(); ++p) {
        const auto l = label[adj[p]];
        if (tally[l] == 0) touched.push_back(l);
        tally[l] += weight[v][p];
      }
      std::uint32_t best = touched.front();
      for (auto l : touched) {
        if (tally[l] > tally[best] || (tally[l] == tally[best] && l < best)) best = l;
      }
      for (auto l : touched) tally[l] = 0;
      if (best != label[v]) {
        label[v] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }

  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> compact(n, kUnset);
  std::uint32_t next = 0;
  for (auto& l : label) {
    if (compact[l] == kUnset) compact[l] = next++;
    l = compact[l];
  }
  return label;
}

std::vector<std::int32_t> bfs_hops(const LineageGraph& graph, NodeIndex source) {
  std::vector<std::int32_t> dist(graph.node_count(), HopDistance::kUnreachable);
  std::vector<NodeIndex> frontier{source};
  dist[source] = 0;
  std::size_t head = 0;
  while (head < frontier.size()) {
    const NodeIndex v = frontier[head++];
    for (NodeIndex u : graph.adjacent(v)) {
      if (dist[u] == HopDistance::kUnreachable) {
        dist[u] = dist[v] + 1;
        frontier.push_back(u);
      }
    }
  }
  return dist;
}

HopDistance shortest_path_hops(const LineageGraph& graph, std::string_view u, std::string_view v) {
  const NodeIndex a = graph.index_of(u);
  const NodeIndex b = graph.index_of(v);
  if (a == b) return HopDistance(0);
  const auto dist = bfs_hops(graph, a);
  return HopDistance(dist[b]);
}

FeatureTable::FeatureTable(std::vector<FeatureRow> rows) : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].id == rows_[i - 1].id) throw DataError("duplicate feature row for node " + rows_[i].id);
  }
}

const FeatureRow* FeatureTable::find(std::string_view id) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), id,
                             [](const FeatureRow& r, std::string_view key) { return r.id < key; });
  if (it == rows_.end() || it->id != id) return nullptr;
  return &*it;
}

FeatureTable derive_features(const LineageGraph& graph, const DeriveOptions& options,
                             bool* centrality_converged) {
  const auto degree = compute_degree(graph);
  const auto centrality = compute_centrality(graph, options.pagerank);
  if (centrality_converged) *centrality_converged = centrality.converged;
  const auto community = compute_communities(graph, options.community_seed);
  std::vector<FeatureRow> rows(graph.node_count());
  for (NodeIndex i = 0; i < rows.size(); ++i) {
    const auto& node = graph.node(i);
    rows[i] = {node.id, node.asset_type.ordinal, degree[i], centrality.scores[i], community[i]};
  }
  return FeatureTable(std::move(rows));
}

void write_features_csv(std::ostream& out, const LineageGraph& graph, const FeatureTable& table) {
  csv::write_row(out, {"id", "asset_type", "degree", "centrality", "community"});
  for (const auto& row : table.rows()) {
    csv::write_row(out, {row.id, graph.asset_types().at(row.asset_ordinal).name, std::to_string(row.degree),
                         format_double(row.centrality), std::to_string(row.community)});
  }
}

FeatureTable read_features_csv(std::istream& in, const AssetTypeRegistry& registry) {
  static constexpr std::string_view kHeader[] = {"id", "asset_type", "degree", "centrality", "community"};
  csv::Reader reader(in);
  csv::expect_header(reader, kHeader, "features file");
  std::vector<FeatureRow> rows;
  csv::Record rec;
  while (reader.next(rec)) {
    if (rec.fields.size() != 5) throw DataError("expected 5 fields", rec.line);
    auto type = registry.find(rec.fields[1]);
    if (!type) throw DataError("unknown asset type `" + rec.fields[1] + "`", rec.line);
    auto degree = parse_number<std::size_t>(rec.fields[2]);
    auto centrality = parse_number<double>(rec.fields[3]);
    auto community = parse_number<std::uint32_t>(rec.fields[4]);
    if (!degree || !centrality || !community) throw DataError("malformed numeric field", rec.line);
    rows.push_back({std::move(rec.fields[0]), type->ordinal, *degree, *centrality, *community});
  }
  return FeatureTable(std::move(rows));
}

FeatureMatrix build_feature_matrix(const LineageGraph& graph, const FeatureTable& features) {
  const std::size_t n = graph.node_count();
  const std::size_t k = graph.asset_types().size();

  std::vector<const FeatureRow*> rows(n);
  std::uint32_t max_community = 0;
  for (NodeIndex i = 0; i < n; ++i) {
    rows[i] = features.find(graph.node(i).id);
    if (!rows[i]) throw DataError("no feature row for node " + graph.node(i).id);
    if (rows[i]->asset_ordinal < 0 || static_cast<std::size_t>(rows[i]->asset_ordinal) >= k) {
      throw DataError("asset type ordinal out of range for node " + graph.node(i).id);
    }
    max_community = std::max(max_community, rows[i]->community);
  }
  std::vector<std::size_t> community_size(n == 0 ? 0 : max_community + 1, 0);
  for (const auto* r : rows) ++community_size[r->community];

  FeatureMatrix out;
  out.values = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k + 3));
  out.ids.reserve(n);
  const double dn = static_cast<double>(n);
  for (NodeIndex i = 0; i < n; ++i) {
    const auto& r = *rows[i];
    const auto row = static_cast<Eigen::Index>(i);
    const auto base = static_cast<Eigen::Index>(k);
    out.values(row, r.asset_ordinal) = 1.0;
    out.values(row, base) = std::log1p(static_cast<double>(r.degree));
    out.values(row, base + 1) = r.centrality * dn;
    out.values(row, base + 2) = static_cast<double>(community_size[r.community]) / dn;
    out.ids.push_back(r.id);
  }
  return out;
}

}  // namespace rekom
