#include "rekom/pipeline.hpp"

#include <fstream>

#include "rekom/artifacts.hpp"
#include "rekom/error.hpp"
#include "rekom/format.hpp"
#include "rekom/projection.hpp"

namespace rekom {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

GenerateSummary run_generate(const SynthConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto graph = generate_graph(config);
  ensure_dir(out_dir);
  {
    auto out = open_out(out_dir / artifact_files::kNodes);
    write_nodes_csv(out, graph.nodes);
  }
  {
    auto out = open_out(out_dir / artifact_files::kEdges);
    write_edges_csv(out, graph.edges);
  }

  GenerateSummary summary;
  summary.nodes = graph.nodes.size();
  summary.edges = graph.edges.size();
  for (const auto& n : graph.nodes) ++summary.nodes_by_type[n.asset_type.name];
  for (const auto& e : graph.edges) ++summary.edges_by_relation[e.relation];

  log << "generated " << summary.nodes << " nodes, " << summary.edges << " edges in " << out_dir.string() << '\n';
  for (const auto& [type, n] : summary.nodes_by_type) log << "  " << type << ": " << n << '\n';
  for (const auto& [rel, n] : summary.edges_by_relation) log << "  " << rel << " edges: " << n << '\n';
  return summary;
}

FeatureTable run_derive(const fs::path& graph_dir, const fs::path& out_dir, const DeriveOptions& options,
                        std::ostream& log) {
  const auto graph = load_graph_dir(graph_dir);
  if (graph.node_count() == 0) throw DataError("graph in " + graph_dir.string() + " is empty");
  if (graph.duplicate_edges_merged() > 0) {
    log << "warning: merged " << graph.duplicate_edges_merged() << " duplicate edges\n";
  }
  log << "ingested " << graph.node_count() << " nodes, " << graph.edge_count() << " edges\n";

  bool converged = false;
  auto table = derive_features(graph, options, &converged);
  if (!converged) {
    log << "warning: PageRank did not converge within " << options.pagerank.max_iter << " iterations\n";
  }

  ensure_dir(out_dir);
  auto out = open_out(out_dir / artifact_files::kFeatures);
  write_features_csv(out, graph, table);

  std::uint32_t communities = 0;
  for (const auto& r : table.rows()) communities = std::max(communities, r.community + 1);
  log << "wrote " << (out_dir / artifact_files::kFeatures).string() << " (" << communities << " communities)\n";
  return table;
}

TrainSummary run_train(const fs::path& graph_dir, const fs::path& features_csv, const fs::path& out_dir,
                       const TrainConfig& config, std::ostream& log) {
  config.validate();
  const auto graph = load_graph_dir(graph_dir);
  if (graph.node_count() == 0) throw DataError("graph in " + graph_dir.string() + " is empty");
  std::ifstream in(features_csv, std::ios::binary);
  if (!in) throw DataError("cannot open " + features_csv.string());
  const auto features = read_features_csv(in, graph.asset_types());
  const auto matrix = build_feature_matrix(graph, features);

  log << "training on " << graph.node_count() << " nodes, " << graph.edge_count() << " edges, "
      << matrix.values.cols() << " features\n";
  const auto result = train(graph, matrix, config);

  ensure_dir(out_dir);
  save_embedding(out_dir / artifact_files::kEmbedding, result.embedding);
  {
    auto out = open_out(out_dir / artifact_files::kTrainingLog);
    write_training_log(out, result.log);
  }
  {
    auto out = open_out(out_dir / artifact_files::kProjection);
    if (result.embedding.rows() >= 2) {
      write_projection_csv(out, project(result.embedding));
    } else {
      // A single node projects to the origin.
      Projection2D single{{result.embedding.ids().begin(), result.embedding.ids().end()}, {}, "pca", {0.0, 0.0}};
      single.coords.assign(single.ids.size(), {0.0, 0.0});
      write_projection_csv(out, single);
    }
  }

  TrainSummary summary;
  summary.final_val_auc = result.final_val_auc;
  summary.epochs = result.log.size();
  summary.model_version = fingerprint_file(out_dir / artifact_files::kEmbedding);
  log << "final validation AUC: " << format_double(summary.final_val_auc) << '\n';
  log << "model version: " << summary.model_version << '\n';
  return summary;
}

}  // namespace rekom
