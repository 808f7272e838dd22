#pragma once

#include <filesystem>
#include <string>

#include "rekom/embedding.hpp"
#include "rekom/features.hpp"
#include "rekom/graph.hpp"
#include "rekom/projection.hpp"

namespace rekom {

/// File names inside an artifacts directory.
namespace artifact_files {
inline constexpr const char* kNodes = "nodes.csv";
inline constexpr const char* kEdges = "edges.csv";
inline constexpr const char* kFeatures = "features.csv";
inline constexpr const char* kEmbedding = "embedding.bin";
inline constexpr const char* kTrainingLog = "training_log.csv";
inline constexpr const char* kProjection = "projection.csv";
inline constexpr const char* kAnnotations = "annotations.jsonl";
}  // namespace artifact_files

/// Everything the service reads, loaded once and never mutated.
struct Artifacts {
  LineageGraph graph;
  FeatureTable features;
  EmbeddingMatrix embedding;
  Projection2D projection;
  std::string model_version;  // fingerprint of embedding.bin

  /// Throws DataError naming the first missing file, or describing an inconsistency.
  static Artifacts load(const std::filesystem::path& dir);
};

/// "emb-" + 16 hex digits of the FNV-1a hash of the file's bytes.
std::string fingerprint_file(const std::filesystem::path& path);

}  // namespace rekom
