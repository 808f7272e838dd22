#include "rekom/csv.hpp"

#include <streambuf>

#include "rekom/error.hpp"

namespace rekom::csv {

bool Reader::next(Record& record) {
  std::streambuf* buf = in_.rdbuf();
  using traits = std::streambuf::traits_type;

  for (;;) {
    record.fields.clear();
    record.line = line_;

    int c = buf->sgetc();
    if (c == traits::eof()) return false;

    std::string field;
    bool in_quotes = false;
    bool any_content = false;
    bool done = false;
    while (!done) {
      c = buf->sbumpc();
      if (c == traits::eof()) {
        if (in_quotes) throw DataError("unterminated quoted field", record.line);
        break;
      }
      const char ch = traits::to_char_type(c);
      if (in_quotes) {
        if (ch == '"') {
          if (buf->sgetc() == '"') {
            buf->sbumpc();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      switch (ch) {
        case '"':
          in_quotes = true;
          any_content = true;
          break;
        case ',':
          record.fields.push_back(std::move(field));
          field.clear();
          any_content = true;
          break;
        case '\r':
          if (buf->sgetc() == '\n') buf->sbumpc();
          ++line_;
          done = true;
          break;
        case '\n':
          ++line_;
          done = true;
          break;
        default:
          field.push_back(ch);
          any_content = true;
      }
    }
    if (!any_content && field.empty()) {
      // blank line
      if (c == traits::eof()) return false;
      continue;
    }
    record.fields.push_back(std::move(field));
    return true;
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << escape(fields[i]);
  }
  out.put('\n');
}

void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    if (!first) out.put(',');
    first = false;
    out << escape(f);
  }
  out.put('\n');
}

void expect_header(Reader& reader, std::span<const std::string_view> expected, std::string_view what) {
  Record header;
  std::string want;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) want += ',';
    want += expected[i];
  }
  if (!reader.next(header)) {
    throw DataError(std::string(what) + ": missing header `" + want + "`", 1);
  }
  bool ok = header.fields.size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = header.fields[i] == expected[i];
  if (!ok) throw DataError(std::string(what) + ": expected header `" + want + "`", header.line);
}

}  // namespace rekom::csv
