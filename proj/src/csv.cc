// Copyright 2026 The synthaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synthaudit/csv.h"

#include <boost/tokenizer.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <istream>

#include "synthaudit/errors.h"

namespace synthaudit::csv {
namespace {

std::vector<std::string> SplitLine(const std::string& line,
                                   std::string_view source, size_t line_no) {
  // Backslash escapes are disabled so Windows paths and emoticons pass
  // through; quotes are doubled per RFC 4180.
  using Separator = boost::escaped_list_separator<char>;
  std::string normalized;
  normalized.reserve(line.size());
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (in_quotes && i + 1 < line.size() && line[i + 1] == '"') {
        normalized += '\x01';
        ++i;
        continue;
      }
      in_quotes = !in_quotes;
    }
    normalized += c;
  }
  if (in_quotes) {
    throw DataError(std::string(source) + ": unterminated quote on line " +
                    std::to_string(line_no));
  }
  std::vector<std::string> fields;
  try {
    boost::tokenizer<Separator> tok(normalized, Separator('\0', ',', '"'));
    for (std::string field : tok) {
      for (char& ch : field) {
        if (ch == '\x01') ch = '"';
      }
      fields.push_back(std::move(field));
    }
  } catch (const boost::escaped_list_error& e) {
    throw DataError(std::string(source) + ": malformed field on line " +
                    std::to_string(line_no) + ": " + e.what());
  }
  return fields;
}

}  // namespace

Table Read(std::istream& in, std::string_view source) {
  Table table;
  std::string line;
  size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = SplitLine(line, source, line_no);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(std::string(source) + ": line " +
                      std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
    table.lines.push_back(line_no);
  }
  if (!have_header) {
    throw DataError(std::string(source) + ": missing CSV header");
  }
  return table;
}

std::string Escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double ParseDouble(std::string_view text, std::string_view what) {
  const std::string s(text);
  const char* begin = s.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\t')) ++end;
  if (end == begin || *end != '\0' || errno == ERANGE ||
      !std::isfinite(value)) {
    throw DataError("invalid number '" + s + "' for " + std::string(what));
  }
  return value;
}

}  // namespace synthaudit::csv
