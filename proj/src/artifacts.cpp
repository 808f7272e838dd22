#include "rekom/artifacts.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "rekom/error.hpp"
#include "rekom/recommend.hpp"

namespace rekom {

std::string fingerprint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return std::string("emb-") + hex;
}

Artifacts Artifacts::load(const std::filesystem::path& dir) {
  using namespace artifact_files;
  for (const char* name : {kNodes, kEdges, kFeatures, kEmbedding, kProjection}) {
    if (!std::filesystem::is_regular_file(dir / name)) {
      throw DataError(std::string("missing artifact ") + name + " in " + dir.string());
    }
  }
  Artifacts a;
  a.graph = load_graph_dir(dir);
  {
    std::ifstream in(dir / kFeatures, std::ios::binary);
    a.features = read_features_csv(in, a.graph.asset_types());
  }
  a.embedding = load_embedding(dir / kEmbedding);
  {
    std::ifstream in(dir / kProjection, std::ios::binary);
    a.projection = read_projection_csv(in);
  }
  a.model_version = fingerprint_file(dir / kEmbedding);

  check_consistent(a.graph, a.features, a.embedding);
  if (a.projection.ids.size() != a.graph.node_count()) {
    throw DataError("projection.csv has " + std::to_string(a.projection.ids.size()) + " rows, graph has " +
                    std::to_string(a.graph.node_count()) + " nodes");
  }
  for (const auto& id : a.projection.ids) {
    if (!a.graph.find(id)) throw DataError("projection.csv names unknown node " + id);
  }
  return a;
}

}  // namespace rekom
