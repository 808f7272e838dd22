#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rekom/graph.hpp"
#include "rekom/matrix.hpp"

namespace rekom {

/// N x M learned node embedding plus the id of each row.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Throws DataError when ids and rows disagree, ids repeat, or an entry is not finite.
  EmbeddingMatrix(Matrix values, std::vector<std::string> ids);

  const Matrix& values() const noexcept { return values_; }
  std::span<const std::string> ids() const noexcept { return ids_; }
  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws NotFound.
  std::size_t row_of(std::string_view id) const;
  auto row(std::size_t r) const { return values_.row(static_cast<Eigen::Index>(r)); }

 private:
  Matrix values_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
};

struct LinkScore {
  std::string source;
  std::string destination;
  double probability = 0.0;
};

/// Logistic function; saturates to exactly 0 or 1 only at extreme inputs.
double sigmoid(double x);

/// sigmoid(z_u . z_v). Throws NotFound.
LinkScore score_pair(const EmbeddingMatrix& embedding, std::string_view u, std::string_view v);

/// Scores `source` against `candidates` (every other node when omitted).
/// Sorted by descending probability, then ascending destination id.
std::vector<LinkScore> score_all(const EmbeddingMatrix& embedding, std::string_view source,
                                 std::optional<std::span<const std::string>> candidates = std::nullopt);

/// Area under the ROC curve via the Mann-Whitney rank statistic; ties count 1/2.
/// Throws ValidationError when either side is empty.
double auc_from_scores(std::span<const double> positives, std::span<const double> negatives);

using IdPair = std::pair<std::string, std::string>;

/// AUC of the decoder separating `positive_edges` from `negative_pairs`.
double evaluate_auc(const EmbeddingMatrix& embedding, std::span<const IdPair> positive_edges,
                    std::span<const IdPair> negative_pairs);

/**
 * Binary layout, little-endian:
 *   "REKM" | u32 version (1) | u64 N | u64 M | N*M f64 row-major |
 *   N x (u64 byte length, UTF-8 id bytes)
 */
void write_embedding(std::ostream& out, const EmbeddingMatrix& embedding);
EmbeddingMatrix read_embedding(std::istream& in);
void save_embedding(const std::filesystem::path& path, const EmbeddingMatrix& embedding);
EmbeddingMatrix load_embedding(const std::filesystem::path& path);

}  // namespace rekom
