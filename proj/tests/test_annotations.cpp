#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "rekom/annotations.hpp"
#include "rekom/error.hpp"
#include "temp_dir.hpp"

using namespace rekom;
using rekom::testing::TempDir;

namespace {

AnnotationStore::Clock fixed_clock(std::string value = "2024-05-01T12:00:00Z") {
  return [value] { return value; };
}

std::string export_of(const AnnotationStore& s) {
  std::ostringstream out;
  s.export_csv(out);
  return out.str();
}

const std::string kHeader = "source,destination,stars,note,model_version,updated_at\n";

}  // namespace

TEST(AnnotationStore, StoreAndReadBack) {
  AnnotationStore s(fixed_clock());
  const auto stored = s.annotate({"user-1", "wb-3", 1, "", "emb-1", ""});
  EXPECT_EQ(stored.updated_at, "2024-05-01T12:00:00Z");
  EXPECT_EQ(s.find("user-1", "wb-3", "emb-1"), stored);
  EXPECT_FALSE(s.find("user-1", "wb-3", "emb-2").has_value());
}

TEST(AnnotationStore, LaterWriteWins) {
  AnnotationStore s(fixed_clock());
  s.annotate({"user-1", "wb-3", 1, "bad", "emb-1", ""});
  s.annotate({"user-1", "wb-3", 4, "better", "emb-1", ""});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.find("user-1", "wb-3", "emb-1")->stars, 4);
  EXPECT_EQ(s.find("user-1", "wb-3", "emb-1")->note, "better");
}

TEST(AnnotationStore, ModelVersionsAreSeparateKeys) {
  AnnotationStore s(fixed_clock());
  s.annotate({"a", "b", 2, "", "v1", ""});
  s.annotate({"a", "b", 5, "", "v2", ""});
  EXPECT_EQ(s.size(), 2u);
}

TEST(AnnotationStore, StarBounds) {
  AnnotationStore s(fixed_clock());
  EXPECT_THROW(s.annotate({"a", "b", 0, "", "v", ""}), ValidationError);
  EXPECT_THROW(s.annotate({"a", "b", 6, "", "v", ""}), ValidationError);
  EXPECT_THROW(s.annotate({"", "b", 3, "", "v", ""}), ValidationError);
  EXPECT_NO_THROW(s.annotate({"a", "b", 1, "", "v", ""}));
  EXPECT_NO_THROW(s.annotate({"a", "c", 5, "", "v", ""}));
  EXPECT_EQ(s.size(), 2u);
}

TEST(AnnotationStore, ListFiltersBySourceInKeyOrder) {
  AnnotationStore s(fixed_clock());
  s.annotate({"b", "z", 3, "", "v", ""});
  s.annotate({"a", "y", 3, "", "v", ""});
  s.annotate({"b", "a", 3, "", "v", ""});
  s.annotate({"bb", "a", 3, "", "v", ""});
  const auto b = s.list("b");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].destination, "a");
  EXPECT_EQ(b[1].destination, "z");
  EXPECT_EQ(s.list().size(), 4u);
  EXPECT_TRUE(s.list("nobody").empty());
}

TEST(AnnotationExport, EmptyStoreIsHeaderOnly) {
  AnnotationStore s;
  EXPECT_EQ(export_of(s), kHeader);
}

TEST(AnnotationExport, QuotesAwkwardNotes) {
  AnnotationStore s(fixed_clock());
  s.annotate({"user-1", "wb-3", 2, "stale, but \"close\"", "emb-1", ""});
  EXPECT_EQ(export_of(s), kHeader + "user-1,wb-3,2,\"stale, but \"\"close\"\"\",emb-1,2024-05-01T12:00:00Z\n");

  AnnotationStore t;
  std::istringstream in(export_of(s));
  const auto report = t.import_csv(in);
  EXPECT_EQ(report.imported, 1u);
  EXPECT_EQ(t.find("user-1", "wb-3", "emb-1"), s.find("user-1", "wb-3", "emb-1"));
}

TEST(AnnotationExport, ExportImportExportIsByteIdentical) {
  AnnotationStore s(fixed_clock());
  s.annotate({"user-2", "tbl-9", 5, "line one\nline two", "emb-1", ""});
  s.annotate({"user-1", "wb-3", 1, "", "emb-1", "2023-01-02T03:04:05Z"});
  s.annotate({"db-4", "tbl-1", 3, "ok", "emb-2", ""});
  const auto first = export_of(s);

  AnnotationStore t(fixed_clock("1999-01-01T00:00:00Z"));
  std::istringstream in(first);
  const auto report = t.import_csv(in);
  EXPECT_EQ(report.imported, 3u);
  EXPECT_TRUE(report.rejected.empty());
  EXPECT_EQ(export_of(t), first);
  EXPECT_EQ(t.list(), s.list());
}

TEST(AnnotationImport, BadRowsAreReportedAndTheRestApplied) {
  AnnotationStore s(fixed_clock());
  std::istringstream in(kHeader +
                        "a,b,4,,v,\n"
                        "a,c,9,,v,\n"
                        "a,d,three,,v,\n"
                        "a,e,2\n"
                        "a,f,1,fine,v,2024-01-01T00:00:00Z\n");
  const auto report = s.import_csv(in);
  EXPECT_EQ(report.imported, 2u);
  ASSERT_EQ(report.rejected.size(), 3u);
  EXPECT_EQ(report.rejected[0].line, 3u);
  EXPECT_NE(report.rejected[0].reason.find("stars"), std::string::npos);
  EXPECT_EQ(report.rejected[1].line, 4u);
  EXPECT_EQ(report.rejected[2].line, 5u);
  EXPECT_TRUE(s.find("a", "b", "v").has_value());
  EXPECT_EQ(s.find("a", "f", "v")->updated_at, "2024-01-01T00:00:00Z");
  EXPECT_FALSE(s.find("a", "c", "v").has_value());
}

TEST(AnnotationImport, HeaderOnlyImportsNothing) {
  AnnotationStore s;
  std::istringstream in(kHeader);
  const auto report = s.import_csv(in);
  EXPECT_EQ(report.imported, 0u);
  EXPECT_TRUE(report.rejected.empty());
}

TEST(AnnotationImport, MissingOrWrongHeaderIsRejected) {
  AnnotationStore s;
  std::istringstream empty("");
  EXPECT_THROW(s.import_csv(empty), DataError);
  std::istringstream wrong("a,b,4,,v,\n");
  EXPECT_THROW(s.import_csv(wrong), DataError);
  EXPECT_EQ(s.size(), 0u);
}

TEST(AnnotationJournal, SurvivesReopenAndCompacts) {
  TempDir dir;
  const auto journal = dir.path() / "annotations.jsonl";
  {
    AnnotationStore s(journal, fixed_clock());
    s.annotate({"a", "b", 1, "first", "v", ""});
    s.annotate({"a", "b", 4, "second", "v", ""});
    s.annotate({"a", "c", 2, "", "v", ""});
  }
  auto count_lines = [&] {
    std::ifstream in(journal);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) n += !line.empty();
    return n;
  };
  EXPECT_EQ(count_lines(), 3);
  {
    AnnotationStore s(journal, fixed_clock());
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.find("a", "b", "v")->stars, 4);
    EXPECT_EQ(s.find("a", "b", "v")->note, "second");
  }
  EXPECT_EQ(count_lines(), 2);
}

TEST(AnnotationJournal, WritesAreOnDiskBeforeAnnotateReturns) {
  TempDir dir;
  const auto journal = dir.path() / "annotations.jsonl";
  AnnotationStore s(journal, fixed_clock());
  s.annotate({"a", "b", 3, "", "v", ""});
  std::filesystem::copy_file(journal, dir.path() / "snapshot.jsonl");
  AnnotationStore snapshot(dir.path() / "snapshot.jsonl");
  EXPECT_EQ(snapshot.size(), 1u);
}

TEST(AnnotationJournal, CorruptJournalNamesTheLine) {
  TempDir dir;
  const auto journal = dir.path() / "annotations.jsonl";
  {
    std::ofstream out(journal);
    out << R"({"source":"a","destination":"b","stars":3})" << '\n' << "{not json\n";
  }
  try {
    AnnotationStore s(journal);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(AnnotationStore, ConcurrentWritersAllLand) {
  AnnotationStore s(fixed_clock());
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&s, t] {
      for (int i = 0; i < 100; ++i) s.annotate({"s" + std::to_string(t), "d" + std::to_string(i), 1 + i % 5, "", "v", ""});
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(s.size(), 400u);
}
