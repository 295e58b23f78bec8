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

#ifndef SYNTHAUDIT_CSV_H_
#define SYNTHAUDIT_CSV_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace synthaudit::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for error messages.
  std::vector<size_t> lines;
};

// Parses comma-separated text with double-quoted fields. Fields may not span
// lines. Blank lines are skipped; every row must match the header width.
// Throws DataError naming `source` and the line on malformed input.
Table Read(std::istream& in, std::string_view source);

// Quotes a field when it contains a comma, quote or line break.
std::string Escape(std::string_view field);

// Parses a decimal number, throwing DataError mentioning `what` on failure.
double ParseDouble(std::string_view text, std::string_view what);

}  // namespace synthaudit::csv

#endif  // SYNTHAUDIT_CSV_H_
