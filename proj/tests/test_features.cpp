#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rekom/error.hpp"
#include "rekom/features.hpp"

using namespace rekom;
using namespace rekom::testing;

TEST(Degree, IsolatedTriangleAndPath) {
  EXPECT_EQ(compute_degree(make_graph(1, {})), (std::vector<std::size_t>{0}));
  EXPECT_EQ(compute_degree(make_graph(3, clique_edges(0, 3))), (std::vector<std::size_t>{2, 2, 2}));
  // Oracle: count endpoint occurrences in the edge list.
  const auto edges = path_edges(3);
  std::vector<std::size_t> expected(3, 0);
  for (auto [u, v] : edges) ++expected[u], ++expected[v];
  EXPECT_EQ(compute_degree(make_graph(3, edges)), expected);
  EXPECT_EQ(expected, (std::vector<std::size_t>{1, 2, 1}));
}

TEST(Centrality, SingleNodeAndPair) {
  auto one = compute_centrality(make_graph(1, {}));
  EXPECT_DOUBLE_EQ(one.scores[0], 1.0);
  auto two = compute_centrality(make_graph(2, {{0, 1}}));
  EXPECT_NEAR(two.scores[0], 0.5, 1e-12);
  EXPECT_NEAR(two.scores[1], 0.5, 1e-12);
}

TEST(Centrality, PathMatchesLinearSolveOracle) {
  const auto edges = path_edges(3);
  const auto oracle = pagerank_linear_solve(3, edges, 0.85);
  const auto result = compute_centrality(make_graph(3, edges));
  ASSERT_TRUE(result.converged);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(result.scores[i], oracle[i], 1e-5);
  EXPECT_NEAR(result.scores[0], 0.25676, 1e-5);
  EXPECT_NEAR(result.scores[1], 0.48649, 1e-5);
}

TEST(Centrality, EmptyGraphIsAnError) { EXPECT_THROW(compute_centrality(make_graph(0, {})), DataError); }

TEST(Centrality, NonConvergenceReturnsLastIterateWithFlag) {
  auto r = compute_centrality(make_graph(4, path_edges(4)), {0.85, 1e-300, 3});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 1.0, 1e-12);
}

TEST(Centrality, SumsToOneAndPositiveOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 15);
    auto g = make_graph(n, random_edges(n, 0.2, rng));
    auto r = compute_centrality(g);
    EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 1.0, 1e-8);
    for (double s : r.scores) EXPECT_GT(s, 0.0);
  }
}

TEST(Communities, EmptyAndClique) {
  EXPECT_TRUE(compute_communities(make_graph(0, {}), 1).empty());
  auto labels = compute_communities(make_graph(5, clique_edges(0, 5)), 1);
  EXPECT_EQ(labels, (std::vector<std::uint32_t>(5, 0)));
}

TEST(Communities, TwoTrianglesMatchBruteForceModularity) {
  const auto edges = two_triangles();
  const auto oracle = max_modularity_partition(6, edges);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto labels = compute_communities(make_graph(6, edges), seed);
    EXPECT_TRUE(same_partition(labels, oracle)) << "seed " << seed;
    EXPECT_EQ(*std::max_element(labels.begin(), labels.end()), 1u);
  }
}

TEST(Communities, LabelsAreContiguous) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    const auto labels = compute_communities(make_graph(n, random_edges(n, 0.15, rng)), trial);
    std::set<std::uint32_t> distinct(labels.begin(), labels.end());
    EXPECT_EQ(*distinct.rbegin() + 1, distinct.size());
  }
}

TEST(Communities, InvariantUnderIdRelabeling) {
  // Three 4-cliques chained by single bridges, plus an isolated node.
  EdgeList edges = clique_edges(0, 4);
  for (auto e : clique_edges(4, 4)) edges.push_back(e);
  for (auto e : clique_edges(8, 4)) edges.push_back(e);
  edges.emplace_back(3, 4);
  edges.emplace_back(7, 8);
  const int n = 13;
  const auto reference = compute_communities(make_graph(n, edges), 3);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EdgeList relabeled;
    for (auto [u, v] : edges) relabeled.emplace_back(perm[u], perm[v]);
    const auto labels = compute_communities(make_graph(n, relabeled), trial);
    std::vector<std::uint32_t> pulled_back(n);
    for (int i = 0; i < n; ++i) pulled_back[i] = labels[perm[i]];
    EXPECT_TRUE(same_partition(pulled_back, reference)) << "trial " << trial;
  }
}

TEST(Communities, TriangleCountsPerEdge) {
  auto g = make_graph(6, two_triangles());
  const auto counts = edge_triangle_counts(g);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto& e = g.edges()[k];
    const bool bridge = (e.src == 2 && e.dst == 3) || (e.src == 3 && e.dst == 2);
    EXPECT_EQ(counts[k], bridge ? 0u : 1u);
  }
}

TEST(Hops, TrivialCases) {
  auto g = make_graph(6, path_edges(4));
  EXPECT_EQ(shortest_path_hops(g, node_id(1), node_id(1)), HopDistance(0));
  EXPECT_EQ(shortest_path_hops(g, node_id(1), node_id(2)), HopDistance(1));
  EXPECT_EQ(shortest_path_hops(g, node_id(0), node_id(3)), HopDistance(3));
  EXPECT_FALSE(shortest_path_hops(g, node_id(0), node_id(5)).reachable());
  EXPECT_EQ(shortest_path_hops(g, node_id(0), node_id(5)).encoded(), -1);
  EXPECT_THROW(shortest_path_hops(g, node_id(0), "zzz"), NotFound);
  EXPECT_THROW(shortest_path_hops(g, node_id(0), node_id(5)).value(), std::bad_optional_access);
}

TEST(Hops, MatchesFloydWarshallAndMetricAxioms) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto edges = random_edges(n, 0.25, rng);
    const auto g = make_graph(n, edges);
    const auto oracle = floyd_warshall(n, edges);
    std::vector<std::vector<HopDistance>> d(n, std::vector<HopDistance>(n));
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        d[u][v] = shortest_path_hops(g, node_id(u), node_id(v));
        const auto want = oracle[u][v] == kInf ? HopDistance::unreachable() : HopDistance(oracle[u][v]);
        ASSERT_EQ(d[u][v], want) << "trial " << trial << " pair " << u << "," << v;
        EXPECT_EQ(d[u][v] == HopDistance(0), u == v);
      }
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        EXPECT_EQ(d[a][b], d[b][a]);
        for (int c = 0; c < n; ++c)
          if (d[a][b].reachable() && d[b][c].reachable()) {
            ASSERT_TRUE(d[a][c].reachable());
            EXPECT_LE(d[a][c].value(), d[a][b].value() + d[b][c].value());
          }
      }
  }
}

TEST(FeatureMatrix, SingleUserNodeRow) {
  GraphBuilder b;
  b.add_node("u", "user");
  auto g = std::move(b).build();
  auto m = build_feature_matrix(g, derive_features(g));
  ASSERT_EQ(m.values.rows(), 1);
  ASSERT_EQ(m.values.cols(), 9);
  const std::vector<double> expected{1, 0, 0, 0, 0, 0, 0, 1, 1};
  for (int c = 0; c < 9; ++c) EXPECT_DOUBLE_EQ(m.values(0, c), expected[c]);
}

TEST(FeatureMatrix, TriangleRowsIdentical) {
  auto g = make_graph(3, clique_edges(0, 3));
  auto m = build_feature_matrix(g, derive_features(g));
  EXPECT_EQ(m.values.row(0), m.values.row(1));
  EXPECT_EQ(m.values.row(1), m.values.row(2));
}

TEST(FeatureMatrix, TwoTrianglesCommunityFractionFromCommunities) {
  auto g = make_graph(6, two_triangles());
  const auto table = derive_features(g);
  auto m = build_feature_matrix(g, table);
  // Oracle: recompute |community| / N from the table.
  for (NodeIndex i = 0; i < 6; ++i) {
    int size = 0;
    for (const auto& r : table.rows()) size += r.community == table.rows()[i].community;
    EXPECT_DOUBLE_EQ(m.values(i, 8), size / 6.0);
    EXPECT_DOUBLE_EQ(m.values(i, 8), 0.5);
  }
  // Nodes 0,1 are interchangeable with 4,5 by the mirror automorphism.
  EXPECT_TRUE(m.values.row(0).isApprox(m.values.row(5), 1e-12));
  EXPECT_TRUE(m.values.row(2).isApprox(m.values.row(3), 1e-12));
  EXPECT_EQ(m.values.row(0), m.values.row(1));
}

TEST(FeatureMatrix, CentralityColumnHasMeanOne) {
  auto g = make_graph(7, path_edges(7));
  auto m = build_feature_matrix(g, derive_features(g));
  EXPECT_NEAR(m.values.col(7).mean(), 1.0, 1e-9);
  EXPECT_NEAR(m.values(0, 6), std::log(2.0), 1e-15);
}

TEST(FeatureMatrix, MissingRowNamesTheNode) {
  auto g = make_graph(2, {{0, 1}});
  FeatureTable partial({{node_id(0), 2, 1, 0.5, 0}});
  try {
    build_feature_matrix(g, partial);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(node_id(1)), std::string::npos);
  }
}

TEST(FeaturesCsv, RoundTripsExactly) {
  auto g = make_graph(5, path_edges(5));
  const auto table = derive_features(g);
  std::ostringstream out;
  write_features_csv(out, g, table);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "id,asset_type,degree,centrality,community");
  std::istringstream in(out.str());
  const auto back = read_features_csv(in);
  ASSERT_EQ(back.size(), table.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back.rows()[i].id, table.rows()[i].id);
    EXPECT_EQ(back.rows()[i].centrality, table.rows()[i].centrality);
    EXPECT_EQ(back.rows()[i].community, table.rows()[i].community);
    EXPECT_EQ(back.rows()[i].degree, table.rows()[i].degree);
  }
}
