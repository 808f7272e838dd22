#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace rekom {

/// An expert's quality judgement on one recommendation.
struct Annotation {
  std::string source;
  std::string destination;
  int stars = 0;  // 1..5
  std::string note;
  std::string model_version;
  std::string updated_at;  // ISO-8601 UTC

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct ImportReport {
  struct Rejection {
    std::size_t line;
    std::string reason;
  };
  std::size_t imported = 0;
  std::vector<Rejection> rejected;
};

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp();

/**
 * Last-write-wins annotation store keyed by (source, destination, model_version).
 *
 * With a journal path, every accepted write is appended as one JSON line and
 * flushed to disk before annotate() returns; opening the store replays the
 * journal and rewrites it compacted. All members are safe to call concurrently;
 * writes are serialised in arrival order.
 */
class AnnotationStore {
 public:
  using Clock = std::function<std::string()>;

  /// In-memory store.
  explicit AnnotationStore(Clock clock = utc_timestamp);
  /// Durable store backed by `journal` (created when absent). Throws DataError on a corrupt journal.
  explicit AnnotationStore(std::filesystem::path journal, Clock clock = utc_timestamp);
  ~AnnotationStore();

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  /// Upserts. Fills `updated_at` from the clock when empty. Throws ValidationError.
  Annotation annotate(Annotation annotation);

  std::optional<Annotation> find(const std::string& source, const std::string& destination,
                                 const std::string& model_version) const;
  /// Sorted by (source, destination, model_version); all sources when `source` is empty.
  std::vector<Annotation> list(const std::string& source = {}) const;
  std::size_t size() const;

  /// Header `source,destination,stars,note,model_version,updated_at`.
  void export_csv(std::ostream& out) const;
  /// Applies every valid row; malformed rows are reported with their line.
  /// Throws DataError when the header is missing or wrong.
  ImportReport import_csv(std::istream& in);

 private:
  using Key = std::tuple<std::string, std::string, std::string>;

  void validate(const Annotation& a) const;
  void append_journal(const Annotation& a);
  void upsert_locked(Annotation a);

  Clock clock_;
  mutable std::mutex mutex_;
  std::map<Key, Annotation> entries_;
  std::optional<std::filesystem::path> journal_path_;
  std::FILE* journal_ = nullptr;
};

}  // namespace rekom
