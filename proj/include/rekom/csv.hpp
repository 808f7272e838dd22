#pragma once

// Minimal RFC-4180 reader/writer used by every tabular artifact.

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rekom::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the record starts
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record. Returns false at end of input.
  /// Blank lines are skipped. Throws DataError on an unterminated quote.
  bool next(Record& record);

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, std::span<const std::string> fields);
void write_row(std::ostream& out, std::initializer_list<std::string_view> fields);

/// Reads the header record and throws DataError unless it equals `expected`.
void expect_header(Reader& reader, std::span<const std::string_view> expected, std::string_view what);

}  // namespace rekom::csv
