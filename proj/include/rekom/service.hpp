#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "rekom/annotations.hpp"
#include "rekom/artifacts.hpp"

namespace rekom {

struct ServiceOptions {
  std::filesystem::path ui_dir;  // static frontend served at `/` when set
};

/**
 * HTTP/JSON API over a loaded artifact set.
 *
 *   GET  /api/meta
 *   GET  /api/nodes/{id}
 *   GET  /api/nodes/{id}/recommendations?bins=&per_bin=&seed=
 *   GET  /api/projection?ids=a,b,c
 *   POST /api/annotations            GET /api/annotations?source=
 *   GET  /api/annotations/export     POST /api/annotations/import
 *
 * Errors are `{"error": "..."}` with 400 (bad input), 404 (unknown id) or 500.
 */
class RecommendationService {
 public:
  RecommendationService(std::shared_ptr<const Artifacts> artifacts, std::shared_ptr<AnnotationStore> store,
                        ServiceOptions options = {});
  ~RecommendationService();

  RecommendationService(const RecommendationService&) = delete;
  RecommendationService& operator=(const RecommendationService&) = delete;

  /// Binds without serving. Port 0 picks a free port. Throws Error when the port is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void serve();
  void stop();
  bool running() const;
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rekom
