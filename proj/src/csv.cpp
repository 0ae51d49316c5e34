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

#include "stlid/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "stlid/error.hpp"

namespace stlid::csv {

std::string format_double(double value) {
  char buf[32];
  for (int precision = 9; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = line.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(begin)));
      break;
    }
    out.push_back(trim(line.substr(begin, pos - begin)));
    begin = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (*first == '+') ++first;
  // "nan" and "inf" parse; finiteness is the caller's concern.
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view field, std::int64_t& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

Reader::Reader(const std::string& path, std::string_view expected_header)
    : path_(path), in_(path) {
  if (!in_) throw IoError("cannot open " + path);
  std::string header;
  while (std::getline(in_, header)) {
    ++line_no_;
    if (!trim(header).empty()) break;
  }
  auto got = split(header);
  auto want = split(expected_header);
  bool ok = got.size() == want.size();
  for (std::size_t i = 0; ok && i < got.size(); ++i) ok = got[i] == want[i];
  if (!ok) fail("expected header '" + std::string(expected_header) + "'");
}

bool Reader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, current_)) {
    ++line_no_;
    if (trim(current_).empty()) continue;
    fields = split(current_);
    return true;
  }
  return false;
}

void Reader::fail(const std::string& msg) const {
  throw ParseError(path_, line_no_, msg);
}

double Reader::field_double(const std::vector<std::string_view>& fields,
                            std::size_t column, std::string_view name) const {
  double v = 0.0;
  if (column >= fields.size() || !parse_double(fields[column], v))
    fail("column '" + std::string(name) + "' is not a number");
  return v;
}

std::int64_t Reader::field_int(const std::vector<std::string_view>& fields,
                               std::size_t column,
                               std::string_view name) const {
  std::int64_t v = 0;
  if (column >= fields.size() || !parse_int(fields[column], v))
    fail("column '" + std::string(name) + "' is not an integer");
  return v;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

namespace {

// Column types: i = integer, f = finite decimal, s = free text,
// o = finite decimal or empty (undefined).
struct Schema {
  std::string header;
  std::string types;
};

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> table = {
      {"points", {"id,x,y", "iff"}},
      {"series", {"id,t,displacement", "iif"}},
      {"truth", {"label,xmin,ymin,xmax,ymax,tof", "sffffi"}},
      {"scores", {"t,point_id,s_lid,fused_s_lid,t_lid,st_lid", "iiffff"}},
      {"events", {"detection_step,point_id,x,y,st_lid", "iifff"}},
      {"report",
       {"method,region,precision,correct,total,lead_time_steps,"
        "lead_time_minutes,median_step_seconds,max_step_seconds",
        "ssoiiifff"}},
      {"baselines", {"method,t,point_id,likelihood,high_risk", "siifi"}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& schema_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, _] : schemas()) v.push_back(name);
    return v;
  }();
  return names;
}

std::string schema_header(const std::string& schema) {
  const auto it = schemas().find(schema);
  if (it == schemas().end()) throw ConfigError("unknown schema '" + schema + "'");
  return it->second.header;
}

std::string validate_schema(const std::string& path,
                            const std::string& schema) {
  const auto it = schemas().find(schema);
  if (it == schemas().end()) throw ConfigError("unknown schema '" + schema + "'");
  const auto& types = it->second.types;
  try {
    Reader reader(path, it->second.header);
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
      if (fields.size() != types.size())
        reader.fail("expected " + std::to_string(types.size()) +
                    " columns, got " + std::to_string(fields.size()));
      for (std::size_t c = 0; c < types.size(); ++c) {
        double d = 0.0;
        std::int64_t i = 0;
        bool ok = true;
        switch (types[c]) {
          case 'i': ok = parse_int(fields[c], i); break;
          case 'f': ok = parse_double(fields[c], d) && std::isfinite(d); break;
          case 'o':
            ok = fields[c].empty() ||
                 (parse_double(fields[c], d) && std::isfinite(d));
            break;
          default: break;
        }
        if (!ok) reader.fail("bad value in column " + std::to_string(c + 1));
      }
    }
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace stlid::csv
