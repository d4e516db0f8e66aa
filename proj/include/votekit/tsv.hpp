/**
 * Copyright 2026 The votekit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOTEKIT_TSV_HPP_
#define VOTEKIT_TSV_HPP_

// Shared TSV plumbing: escaping, line splitting, number formatting and
// atomic file output. Every file format in the toolkit goes through here.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "votekit/error.hpp"

namespace votekit::tsv {

/// Escapes backslash, tab, newline and carriage return so a field stays on one line.
inline std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

/// Inverse of escape(). Unknown escape sequences are kept verbatim.
inline std::string unescape(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const char c = field[i];
    if (c != '\\' || i + 1 == field.size()) {
      out += c;
      continue;
    }
    switch (field[i + 1]) {
      case '\\': out += '\\'; ++i; break;
      case 't': out += '\t'; ++i; break;
      case 'n': out += '\n'; ++i; break;
      case 'r': out += '\r'; ++i; break;
      default: out += c;
    }
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = '\t') {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Shortest decimal form that parses back to the identical double (at most 17 significant digits).
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Fixed-precision rendering for human-facing reports.
inline std::string format_fixed(double value, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

/// Parses a complete decimal literal. Returns false on trailing junk or overflow.
inline bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;  // from_chars rejects a leading plus
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

struct Row {
  std::size_t line = 0;  // 1-based, counting the header as line 1
  std::vector<std::string> fields;
};

struct Document {
  std::string source;
  std::vector<std::string> header;
  std::vector<Row> rows;
};

/// Parses TSV text. A single trailing newline is allowed; blank lines elsewhere are rows with one
/// empty field and get rejected by the column check. CR before LF is stripped.
inline Document parse(std::string_view text, std::string source, std::size_t expected_columns) {
  Document doc;
  doc.source = std::move(source);
  if (text.empty()) throw ParseError(doc.source, 1, "missing header row");
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto parts = split(line);
    if (parts.size() != expected_columns) {
      throw ParseError(doc.source, line_no,
                       "expected " + std::to_string(expected_columns) + " tab-separated columns, found " +
                           std::to_string(parts.size()));
    }
    if (line_no == 1) {
      for (auto p : parts) doc.header.emplace_back(p);
      continue;
    }
    Row row;
    row.line = line_no;
    row.fields.reserve(parts.size());
    for (auto p : parts) row.fields.emplace_back(p);
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

inline void require_header(const Document& doc, const std::vector<std::string>& expected) {
  if (doc.header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "<TAB>" : "") + expected[i];
    throw ParseError(doc.source, 1, "unexpected header, want '" + want + "'");
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return buf.str();
}

/// Reads the header line only, used to sniff optional columns.
inline std::vector<std::string> read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  for (auto p : split(line)) out.emplace_back(p);
  return out;
}

/// Writes to a sibling temp file, then renames over the destination.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

}  // namespace votekit::tsv

#endif  // VOTEKIT_TSV_HPP_
