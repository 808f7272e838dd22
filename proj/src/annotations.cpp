#include "rekom/annotations.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include <unistd.h>

#include <json.hpp>

#include "rekom/csv.hpp"
#include "rekom/error.hpp"
#include "rekom/format.hpp"

namespace rekom {

namespace {

nlohmann::json to_json(const Annotation& a) {
  return {{"source", a.source},   {"destination", a.destination},     {"stars", a.stars},
          {"note", a.note},       {"model_version", a.model_version}, {"updated_at", a.updated_at}};
}

Annotation from_json(const nlohmann::json& j) {
  Annotation a;
  a.source = j.at("source").get<std::string>();
  a.destination = j.at("destination").get<std::string>();
  a.stars = j.at("stars").get<int>();
  a.note = j.value("note", "");
  a.model_version = j.value("model_version", "");
  a.updated_at = j.value("updated_at", "");
  return a;
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AnnotationStore::AnnotationStore(Clock clock) : clock_(std::move(clock)) {}

AnnotationStore::AnnotationStore(std::filesystem::path journal, Clock clock)
    : clock_(std::move(clock)), journal_path_(std::move(journal)) {
  {
    std::ifstream in(*journal_path_);
    std::string line;
    std::size_t lineno = 0;
    while (in && std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        auto a = from_json(nlohmann::json::parse(line));
        validate(a);
        entries_[{a.source, a.destination, a.model_version}] = std::move(a);
      } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt annotation journal " + journal_path_->string() + ": " + e.what(), lineno);
      } catch (const ValidationError& e) {
        throw DataError("corrupt annotation journal " + journal_path_->string() + ": " + e.what(), lineno);
      }
    }
  }

  // Compact: rewrite the live entries, then swap the file in atomically.
  auto tmp = *journal_path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    for (const auto& [key, a] : entries_) out << to_json(a).dump() << '\n';
    out.flush();
    if (!out) throw DataError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, *journal_path_);

  journal_ = std::fopen(journal_path_->c_str(), "a");
  if (!journal_) throw DataError("cannot open annotation journal " + journal_path_->string());
}

AnnotationStore::~AnnotationStore() {
  if (journal_) std::fclose(journal_);
}

void AnnotationStore::validate(const Annotation& a) const {
  if (a.source.empty() || a.destination.empty()) throw ValidationError("source and destination are required");
  if (a.stars < 1 || a.stars > 5) {
    throw ValidationError("stars must be between 1 and 5, got " + std::to_string(a.stars));
  }
}

void AnnotationStore::append_journal(const Annotation& a) {
  if (!journal_) return;
  const std::string line = to_json(a).dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), journal_) != line.size() || std::fflush(journal_) != 0 ||
      ::fsync(::fileno(journal_)) != 0) {
    throw Error("failed to persist annotation to " + journal_path_->string());
  }
}

void AnnotationStore::upsert_locked(Annotation a) {
  append_journal(a);
  Key key{a.source, a.destination, a.model_version};
  entries_[std::move(key)] = std::move(a);
}

Annotation AnnotationStore::annotate(Annotation annotation) {
  validate(annotation);
  if (annotation.updated_at.empty()) annotation.updated_at = clock_();
  std::lock_guard lock(mutex_);
  upsert_locked(annotation);
  return annotation;
}

std::optional<Annotation> AnnotationStore::find(const std::string& source, const std::string& destination,
                                                const std::string& model_version) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find({source, destination, model_version});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<Annotation> AnnotationStore::list(const std::string& source) const {
  std::lock_guard lock(mutex_);
  std::vector<Annotation> out;
  auto it = source.empty() ? entries_.begin() : entries_.lower_bound({source, "", ""});
  for (; it != entries_.end(); ++it) {
    if (!source.empty() && std::get<0>(it->first) != source) break;
    out.push_back(it->second);
  }
  return out;
}

std::size_t AnnotationStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

namespace {
constexpr std::string_view kHeader[] = {"source", "destination", "stars", "note", "model_version", "updated_at"};
}

void AnnotationStore::export_csv(std::ostream& out) const {
  const auto all = list();
  csv::write_row(out, {"source", "destination", "stars", "note", "model_version", "updated_at"});
  for (const auto& a : all) {
    csv::write_row(out, {a.source, a.destination, std::to_string(a.stars), a.note, a.model_version, a.updated_at});
  }
}

ImportReport AnnotationStore::import_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, kHeader, "annotation import");
  ImportReport report;
  csv::Record rec;
  for (;;) {
    try {
      if (!reader.next(rec)) break;
    } catch (const DataError& e) {
      report.rejected.push_back({e.line(), e.what()});
      break;
    }
    auto reject = [&](std::string reason) { report.rejected.push_back({rec.line, std::move(reason)}); };
    if (rec.fields.size() != 6) {
      reject("expected 6 fields, got " + std::to_string(rec.fields.size()));
      continue;
    }
    auto stars = parse_number<int>(rec.fields[2]);
    if (!stars) {
      reject("stars is not an integer: `" + rec.fields[2] + "`");
      continue;
    }
    Annotation a{rec.fields[0], rec.fields[1], *stars, rec.fields[3], rec.fields[4], rec.fields[5]};
    try {
      annotate(std::move(a));
      ++report.imported;
    } catch (const ValidationError& e) {
      reject(e.what());
    }
  }
  return report;
}

}  // namespace rekom
