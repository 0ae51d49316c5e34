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


#include "stlid/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stlid/error.hpp"

namespace stlid {

using nlohmann::json;

namespace {

json coord_json(const Coord& c) { return json::array({c.x, c.y}); }

Coord coord_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json event_json(const DetectionEvent& e) {
  return {{"detection_step", e.detection_step},
          {"location", coord_json(e.location)},
          {"point_id", e.point_id},
          {"st_lid", e.st_lid}};
}

DetectionEvent event_from(const json& j) {
  return {j.at("detection_step").get<Step>(), coord_from(j.at("location")),
          j.at("point_id").get<PointId>(), j.at("st_lid").get<double>()};
}

}  // namespace

std::string state_to_json(const MonitorState& state) {
  const auto& cp = state.checkpoint;
  json stats = json::array();
  for (const auto& s : cp.t_stats) stats.push_back({s.count, s.mean, s.m2});

  const auto& d = cp.detection;
  json history = json::array();
  for (const auto& r : d.history) {
    json rec = {{"step", r.step}, {"coord", coord_json(r.coord)}, {"value", r.value},
                {"hits", r.hits}};
    rec["point_id"] = r.point_id ? json(*r.point_id) : json(nullptr);
    history.push_back(std::move(rec));
  }
  json detection = {{"candidate", d.candidate ? coord_json(*d.candidate) : json(nullptr)},
                    {"candidate_id", d.candidate_id},
                    {"consecutive_hits", d.consecutive_hits},
                    {"history", std::move(history)},
                    {"event", d.event ? event_json(*d.event) : json(nullptr)}};

  const json doc = {{"format", "stlid-monitor-state"},
                    {"version", 1},
                    {"fingerprint", state.fingerprint},
                    {"next_step", cp.next_step},
                    {"prev_column", cp.prev_column},
                    {"prev_slid", cp.prev_slid},
                    {"t_stats", std::move(stats)},
                    {"detection", std::move(detection)}};
  return doc.dump();
}

MonitorState state_from_json(const std::string& text, const std::string& source) {
  try {
    const auto doc = json::parse(text);
    if (doc.at("format") != "stlid-monitor-state" || doc.at("version") != 1)
      throw ParseError(source, 1, "not a version 1 monitor state");
    MonitorState state;
    state.fingerprint = doc.at("fingerprint").get<std::string>();
    auto& cp = state.checkpoint;
    cp.next_step = doc.at("next_step").get<Step>();
    cp.prev_column = doc.at("prev_column").get<std::vector<double>>();
    cp.prev_slid = doc.at("prev_slid").get<std::vector<double>>();
    for (const auto& s : doc.at("t_stats"))
      cp.t_stats.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()});

    const auto& d = doc.at("detection");
    auto& det = cp.detection;
    if (!d.at("candidate").is_null()) det.candidate = coord_from(d.at("candidate"));
    det.candidate_id = d.at("candidate_id").get<PointId>();
    det.consecutive_hits = d.at("consecutive_hits").get<std::size_t>();
    for (const auto& r : d.at("history")) {
      ArgmaxRecord rec;
      rec.step = r.at("step").get<Step>();
      if (!r.at("point_id").is_null()) rec.point_id = r.at("point_id").get<PointId>();
      rec.coord = coord_from(r.at("coord"));
      rec.value = r.at("value").get<double>();
      rec.hits = r.at("hits").get<std::size_t>();
      det.history.push_back(rec);
    }
    if (!d.at("event").is_null()) det.event = event_from(d.at("event"));
    return state;
  } catch (const json::exception& e) {
    throw ParseError(source, 1, std::string("malformed monitor state: ") + e.what());
  }
}

void save_state(const MonitorState& state, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << state_to_json(state) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path + ": " + ec.message());
}

MonitorState load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return state_from_json(buf.str(), path);
}

}  // namespace stlid
