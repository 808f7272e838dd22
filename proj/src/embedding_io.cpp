#include "rekom/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "rekom/error.hpp"

namespace rekom {

EmbeddingMatrix::EmbeddingMatrix(Matrix values, std::vector<std::string> ids)
    : values_(std::move(values)), ids_(std::move(ids)) {
  if (static_cast<std::size_t>(values_.rows()) != ids_.size()) {
    throw DataError("embedding has " + std::to_string(values_.rows()) + " rows but " +
                    std::to_string(ids_.size()) + " ids");
  }
  if (!values_.allFinite()) throw DataError("embedding contains non-finite values");
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], r).second) throw DataError("duplicate embedding id: " + ids_[r]);
  }
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingMatrix::row_of(std::string_view id) const {
  if (auto r = find(id)) return *r;
  throw NotFound("node id not in embedding: " + std::string(id));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LinkScore score_pair(const EmbeddingMatrix& embedding, std::string_view u, std::string_view v) {
  const auto a = embedding.row_of(u);
  const auto b = embedding.row_of(v);
  return {std::string(u), std::string(v), sigmoid(embedding.row(a).dot(embedding.row(b)))};
}

std::vector<LinkScore> score_all(const EmbeddingMatrix& embedding, std::string_view source,
                                 std::optional<std::span<const std::string>> candidates) {
  const auto src = embedding.row_of(source);
  const auto z = embedding.row(src);
  std::vector<LinkScore> out;
  auto push = [&](std::size_t r) {
    out.push_back({std::string(source), embedding.ids()[r], sigmoid(z.dot(embedding.row(r)))});
  };
  if (candidates) {
    out.reserve(candidates->size());
    for (const auto& id : *candidates) push(embedding.row_of(id));
  } else {
    out.reserve(embedding.rows());
    for (std::size_t r = 0; r < embedding.rows(); ++r) {
      if (r != src) push(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const LinkScore& a, const LinkScore& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.destination < b.destination;
  });
  return out;
}

double auc_from_scores(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw ValidationError("AUC needs at least one positive and one negative");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });

  // Sum of (1-based, tie-averaged) ranks of the positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < all.size() && all[j].score == all[i].score) {
      pos_in_group += all[j].positive ? 1 : 0;
      ++j;
    }
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += mean_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double p = static_cast<double>(positives.size());
  const double n = static_cast<double>(negatives.size());
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double evaluate_auc(const EmbeddingMatrix& embedding, std::span<const IdPair> positive_edges,
                    std::span<const IdPair> negative_pairs) {
  if (positive_edges.empty() || negative_pairs.empty()) {
    throw ValidationError("AUC needs non-empty positive and negative lists");
  }
  auto scores = [&](std::span<const IdPair> pairs) {
    std::vector<double> s;
    s.reserve(pairs.size());
    for (const auto& [u, v] : pairs) s.push_back(score_pair(embedding, u, v).probability);
    return s;
  };
  return auc_from_scores(scores(positive_edges), scores(negative_pairs));
}

namespace {

constexpr char kMagic[4] = {'R', 'E', 'K', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DataError(std::string("embedding file truncated while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_embedding(std::ostream& out, const EmbeddingMatrix& embedding) {
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, embedding.rows());
  put_le<std::uint64_t>(out, embedding.dims());
  const Matrix& v = embedding.values();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) put_le<double>(out, v(r, c));
  }
  for (const auto& id : embedding.ids()) {
    put_le<std::uint64_t>(out, id.size());
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
}

EmbeddingMatrix read_embedding(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw DataError("not an embedding file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kVersion) throw DataError("unsupported embedding version " + std::to_string(version));
  const auto n = get_le<std::uint64_t>(in, "N");
  const auto m = get_le<std::uint64_t>(in, "M");
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (n >= kLimit || m >= kLimit) throw DataError("embedding dimensions out of range");
  Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) values(r, c) = get_le<double>(in, "values");
  }
  std::vector<std::string> ids(n);
  for (auto& id : ids) {
    const auto len = get_le<std::uint64_t>(in, "id length");
    if (len > (1u << 20)) throw DataError("embedding id length out of range");
    id.resize(len);
    if (!in.read(id.data(), static_cast<std::streamsize>(len))) throw DataError("embedding file truncated in ids");
  }
  return EmbeddingMatrix(std::move(values), std::move(ids));
}

void save_embedding(const std::filesystem::path& path, const EmbeddingMatrix& embedding) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_embedding(out, embedding);
  if (!out) throw DataError("write failed: " + path.string());
}

EmbeddingMatrix load_embedding(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_embedding(in);
}

}  // namespace rekom
