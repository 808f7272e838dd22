#pragma once

// Independent reference computations and graph fixtures for the test suites.
// Nothing here calls into the algorithm under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rekom/graph.hpp"

namespace rekom::testing {

using EdgeList = std::vector<std::pair<int, int>>;

/// Node ids n0..n{N-1}, zero-padded so sorted id order equals numeric order.
inline std::string node_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%03d", i);
  return buf;
}

inline LineageGraph make_graph(int n, const EdgeList& edges, const std::string& type = "table") {
  GraphBuilder b;
  for (int i = 0; i < n; ++i) b.add_node(node_id(i), type, "Node " + std::to_string(i));
  for (auto [u, v] : edges) b.add_edge(node_id(u), node_id(v));
  return std::move(b).build();
}

inline EdgeList path_edges(int n) {
  EdgeList e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return e;
}

inline EdgeList clique_edges(int first, int size) {
  EdgeList e;
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j) e.emplace_back(first + i, first + j);
  return e;
}

/// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline EdgeList two_triangles() {
  auto e = clique_edges(0, 3);
  auto f = clique_edges(3, 3);
  e.insert(e.end(), f.begin(), f.end());
  e.emplace_back(2, 3);
  return e;
}

/// Two disjoint 5-cliques; nodes 0-4 are tables, 5-9 workbooks.
inline LineageGraph two_cliques() {
  GraphBuilder b;
  for (int i = 0; i < 10; ++i) b.add_node(node_id(i), i < 5 ? "table" : "workbook");
  for (auto [u, v] : clique_edges(0, 5)) b.add_edge(node_id(u), node_id(v));
  for (auto [u, v] : clique_edges(5, 5)) b.add_edge(node_id(u), node_id(v));
  return std::move(b).build();
}

inline EdgeList random_edges(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  EdgeList e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return e;
}

constexpr int kInf = std::numeric_limits<int>::max() / 4;

/// All-pairs hop counts; kInf when disconnected.
inline std::vector<std::vector<int>> floyd_warshall(int n, const EdgeList& edges) {
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [u, v] : edges) d[u][v] = d[v][u] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// PageRank as the solution of (I - d P) x = (1 - d)/N on a graph without isolated nodes,
/// where P[i][j] = 1/deg(j) for each edge.
inline std::vector<double> pagerank_linear_solve(int n, const EdgeList& edges, double damping) {
  std::vector<int> deg(n, 0);
  for (auto [u, v] : edges) ++deg[u], ++deg[v];
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (auto [u, v] : edges) {
    a(u, v) -= damping / deg[v];
    a(v, u) -= damping / deg[u];
  }
  Eigen::VectorXd b = Eigen::VectorXd::Constant(n, (1.0 - damping) / n);
  Eigen::VectorXd x = a.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

inline double modularity(int n, const EdgeList& edges, const std::vector<int>& label) {
  std::vector<int> deg(n, 0);
  for (auto [u, v] : edges) ++deg[u], ++deg[v];
  const double m = static_cast<double>(edges.size());
  double q = 0.0;
  for (auto [u, v] : edges)
    if (label[u] == label[v]) q += 1.0 / m;
  std::vector<double> community_degree(n, 0.0);
  for (int i = 0; i < n; ++i) community_degree[label[i]] += deg[i];
  for (double dc : community_degree) q -= (dc / (2 * m)) * (dc / (2 * m));
  return q;
}

/// Enumerates every set partition (restricted growth strings) and returns the best.
inline std::vector<int> max_modularity_partition(int n, const EdgeList& edges) {
  std::vector<int> label(n, 0), best;
  double best_q = -std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      const double q = modularity(n, edges, label);
      if (q > best_q + 1e-12) best_q = q, best = label;
      return;
    }
    for (int c = 0; c <= used; ++c) {
      label[i] = c;
      self(self, i + 1, std::max(used, c + 1));
    }
  };
  label[0] = 0;
  rec(rec, 1, 1);
  return best;
}

/// True when two labelings induce the same partition.
template <typename A, typename B>
bool same_partition(const std::vector<A>& a, const std::vector<B>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

/// P(score_pos > score_neg) + 0.5 P(tie) by enumerating every pair.
inline double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) rank[idx[k]] = 0.5 * static_cast<double>(i + j - 1);
    i = j;
  }
  return rank;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx == 0 || syy == 0 ? 0.0 : sxy / std::sqrt(sxx * syy);
}

/// Explained-variance shares of the top two principal components via a dense SVD.
inline std::pair<double, double> svd_explained_variance(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
  const Eigen::VectorXd s2 = svd.singularValues().array().square();
  const double total = s2.sum();
  return {s2(0) / total, s2.size() > 1 ? s2(1) / total : 0.0};
}

}  // namespace rekom::testing
