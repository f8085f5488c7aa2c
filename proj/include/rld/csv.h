// Copyright 2026 The RLD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal comma-separated text helpers. No quoting: every field the
// library writes is a number or a bare identifier.

#ifndef RLD_CSV_H_
#define RLD_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace rld::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name, or -1.
  int column(std::string_view name) const;
};

// Splits on newlines and commas, trims whitespace, skips blank lines. The
// first non-blank line is the header. Throws ParseError on ragged rows.
Table Parse(const std::string& text);

// Shortest round-trip decimal for a double ("%.17g").
std::string FormatDouble(double value);

// Strict number parse; throws ParseError naming `what` on failure.
double ParseDouble(const std::string& field, const std::string& what);

std::string JoinRow(const std::vector<std::string>& fields);

}  // namespace rld::csv

#endif  // RLD_CSV_H_
