#pragma once

// Pipeline stages behind the `rekom` subcommands.

#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>

#include "rekom/features.hpp"
#include "rekom/gnn.hpp"
#include "rekom/synth.hpp"

namespace rekom {

struct GenerateSummary {
  std::map<std::string, std::size_t> nodes_by_type;
  std::map<std::string, std::size_t> edges_by_relation;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

/// Writes nodes.csv and edges.csv into `out_dir` (created if needed) and prints a summary.
GenerateSummary run_generate(const SynthConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Ingests `graph_dir`, derives features and writes `out_dir/features.csv`.
/// Throws DataError on an empty graph.
FeatureTable run_derive(const std::filesystem::path& graph_dir, const std::filesystem::path& out_dir,
                        const DeriveOptions& options, std::ostream& log);

struct TrainSummary {
  double final_val_auc = 0.0;
  std::size_t epochs = 0;
  std::string model_version;
};

/// Trains on `graph_dir` + `features_csv`, then writes embedding.bin,
/// training_log.csv and projection.csv into `out_dir`.
TrainSummary run_train(const std::filesystem::path& graph_dir, const std::filesystem::path& features_csv,
                       const std::filesystem::path& out_dir, const TrainConfig& config, std::ostream& log);

}  // namespace rekom
