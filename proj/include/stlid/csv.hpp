// Copyright 2026 The stlid Authors
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

#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace stlid::csv {

/// Shortest decimal text that reads back to the same double (at least 9 and
/// at most 17 significant digits).
std::string format_double(double value);

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

/// Strict whole-field parses; return false on any trailing garbage.
bool parse_double(std::string_view field, double& out);
bool parse_int(std::string_view field, std::int64_t& out);

/// Line-oriented CSV reader that tracks line numbers and checks the header.
class Reader {
 public:
  Reader(const std::string& path, std::string_view expected_header);

  /// Next non-empty row split on commas; false at end of file.
  bool next(std::vector<std::string_view>& fields);
  std::size_t line() const { return line_no_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const;

  double field_double(const std::vector<std::string_view>& fields,
                      std::size_t column, std::string_view name) const;
  std::int64_t field_int(const std::vector<std::string_view>& fields,
                         std::size_t column, std::string_view name) const;

 private:
  std::string path_;
  std::ifstream in_;
  std::string current_;
  std::size_t line_no_ = 0;
};

std::ofstream open_output(const std::string& path);

/// Known file schemas, by name: points, series, truth, scores, events,
/// report, baselines.
const std::vector<std::string>& schema_names();
std::string schema_header(const std::string& schema);

/// Checks a file against a schema: exact header, column count, and per
/// column type. Returns an empty string on success, otherwise a message
/// naming the first offending line.
std::string validate_schema(const std::string& path, const std::string& schema);

}  // namespace stlid::csv
