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


#include "stlid/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "stlid/csv.hpp"
#include "stlid/error.hpp"

namespace stlid {

void RunConfig::validate() const {
  pipeline.validate();
  dbscan.validate();
  lof.validate();
  edq.validate();
  if (!(step_interval > 0.0) || !std::isfinite(step_interval))
    throw ConfigError("data.step_interval must be positive");
}

namespace {

struct Entry {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError(key + ": invalid value '" + value + "' (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!csv::parse_double(v, out) || !std::isfinite(out)) bad_value(key, v, "a number");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  if (!csv::parse_int(v, out)) bad_value(key, v, "an integer");
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const auto out = to_int(key, v);
  if (out < 0) bad_value(key, v, "a non-negative integer");
  return static_cast<std::size_t>(out);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto field : csv::split(v)) out.push_back(to_double(key, std::string(field)));
  return out;
}

Rect to_rect(const std::string& key, const std::string& v) {
  const auto x = to_list(key, v);
  if (x.size() != 4) bad_value(key, v, "xmin,ymin,xmax,ymax");
  return {x[0], x[1], x[2], x[3]};
}

std::string str(double v) { return csv::format_double(v); }
std::string str(bool v) { return v ? "true" : "false"; }
std::string str(std::size_t v) { return std::to_string(v); }
std::string str(std::int64_t v) { return std::to_string(v); }
std::string str(const Rect& r) {
  return str(r.xmin) + "," + str(r.ymin) + "," + str(r.xmax) + "," + str(r.ymax);
}

#define STLID_FIELD(KEY, MEMBER, PARSE)                                    \
  Entry {                                                                  \
    KEY, [](const RunConfig& c) { return str(c.MEMBER); },                 \
        [](RunConfig& c, const std::string& v) { c.MEMBER = PARSE(KEY, v); } \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      STLID_FIELD("lid.s", pipeline.lid.s, to_count),
      {"lid.zero_distance",
       [](const RunConfig& c) {
         return std::string(c.pipeline.lid.zero_distance == ZeroDistancePolicy::kDrop ? "drop"
                                                                                     : "floor");
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "drop") c.pipeline.lid.zero_distance = ZeroDistancePolicy::kDrop;
         else if (v == "floor") c.pipeline.lid.zero_distance = ZeroDistancePolicy::kFloor;
         else bad_value("lid.zero_distance", v, "drop or floor");
       }},
      STLID_FIELD("lid.epsilon_floor", pipeline.lid.epsilon_floor, to_double),
      {"lid.sentinel",
       [](const RunConfig& c) {
         return std::string(c.pipeline.lid.sentinel == SentinelPolicy::kMaxFinite ? "max_finite"
                                                                                  : "fixed");
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "max_finite") c.pipeline.lid.sentinel = SentinelPolicy::kMaxFinite;
         else if (v == "fixed") c.pipeline.lid.sentinel = SentinelPolicy::kFixed;
         else bad_value("lid.sentinel", v, "max_finite or fixed");
       }},
      STLID_FIELD("lid.sentinel_value", pipeline.lid.sentinel_value, to_double),
      STLID_FIELD("lid.t_window", pipeline.lid.t_window, to_count),

      STLID_FIELD("fusion.enabled", pipeline.fusion.enabled, to_bool),
      STLID_FIELD("fusion.k", pipeline.fusion.k, to_count),
      STLID_FIELD("fusion.k_obs", pipeline.fusion.k_obs, to_count),
      {"fusion.bandwidth",
       [](const RunConfig& c) {
         return std::string(c.pipeline.fusion.bandwidth == BandwidthPolicy::kMedianDistance
                                ? "median"
                                : "fixed");
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "median") c.pipeline.fusion.bandwidth = BandwidthPolicy::kMedianDistance;
         else if (v == "fixed") c.pipeline.fusion.bandwidth = BandwidthPolicy::kFixed;
         else bad_value("fusion.bandwidth", v, "median or fixed");
       }},
      STLID_FIELD("fusion.sigma", pipeline.fusion.sigma, to_double),
      {"fusion.weight_distance",
       [](const RunConfig& c) {
         return std::string(c.pipeline.fusion.weight_distance == WeightDistance::kPhysical
                                ? "physical"
                                : "kinematic");
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "physical") c.pipeline.fusion.weight_distance = WeightDistance::kPhysical;
         else if (v == "kinematic") c.pipeline.fusion.weight_distance = WeightDistance::kKinematic;
         else bad_value("fusion.weight_distance", v, "physical or kinematic");
       }},
      STLID_FIELD("fusion.variance_floor", pipeline.fusion.variance_floor.base, to_double),
      STLID_FIELD("fusion.variance_floor_relative", pipeline.fusion.variance_floor.relative,
                  to_bool),

      STLID_FIELD("detection.n", pipeline.detection.n, to_count),
      STLID_FIELD("detection.epsilon", pipeline.detection.epsilon, to_double),
      STLID_FIELD("detection.threshold", pipeline.detection.threshold, to_double),
      {"detection.normalization",
       [](const RunConfig& c) {
         return std::string(c.pipeline.detection.normalization == Normalization::kZScore
                                ? "zscore"
                                : "raw");
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "zscore") c.pipeline.detection.normalization = Normalization::kZScore;
         else if (v == "raw") c.pipeline.detection.normalization = Normalization::kRaw;
         else bad_value("detection.normalization", v, "zscore or raw");
       }},

      STLID_FIELD("baseline.dbscan_eps", dbscan.eps, to_double),
      STLID_FIELD("baseline.dbscan_min_pts", dbscan.min_pts, to_count),
      STLID_FIELD("baseline.lof_k", lof.k, to_count),
      STLID_FIELD("baseline.lof_cutoff", lof.cutoff, to_double),
      {"baseline.edq_levels",
       [](const RunConfig& c) {
         std::string out;
         for (const double q : c.edq.levels) out += (out.empty() ? "" : ",") + str(q);
         return out;
       },
       [](RunConfig& c, const std::string& v) { c.edq.levels = to_list("baseline.edq_levels", v); }},

      STLID_FIELD("metrics.slack", slack, to_count),
      {"run.parallel", [](const RunConfig& c) { return std::to_string(c.pipeline.threads); },
       [](RunConfig& c, const std::string& v) {
         const auto n = to_int("run.parallel", v);
         if (n < 0 || n > 4096) bad_value("run.parallel", v, "0 (all cores) or a worker count");
         c.pipeline.threads = static_cast<int>(n);
       }},
      STLID_FIELD("data.step_interval", step_interval, to_double),

      STLID_FIELD("scenario.nx", scenario.nx, to_count),
      STLID_FIELD("scenario.ny", scenario.ny, to_count),
      STLID_FIELD("scenario.spacing", scenario.spacing, to_double),
      STLID_FIELD("scenario.num_steps", scenario.num_steps, to_count),
      STLID_FIELD("scenario.step_interval", scenario.step_interval, to_double),
      STLID_FIELD("scenario.start_step", scenario.start_step, to_int),
      STLID_FIELD("scenario.noise_sd", scenario.noise_sd, to_double),
      STLID_FIELD("scenario.drift", scenario.drift, to_double),
      STLID_FIELD("scenario.has_region", scenario.has_region, to_bool),
      STLID_FIELD("scenario.region", scenario.region, to_rect),
      {"scenario.label", [](const RunConfig& c) { return c.scenario.label; },
       [](RunConfig& c, const std::string& v) {
         if (v.empty() || v.find_first_of(",\"\n") != std::string::npos)
           bad_value("scenario.label", v, "a non-empty label without commas or quotes");
         c.scenario.label = v;
       }},
      STLID_FIELD("scenario.time_of_failure", scenario.time_of_failure, to_int),
      STLID_FIELD("scenario.creep_rate", scenario.creep_rate, to_double),
      STLID_FIELD("scenario.onset_step", scenario.onset_step, to_int),
      STLID_FIELD("scenario.exponent", scenario.exponent, to_double),
      STLID_FIELD("scenario.transient_amplitude", scenario.transient_amplitude, to_double),
      STLID_FIELD("scenario.transient_timescale", scenario.transient_timescale, to_double),
      STLID_FIELD("scenario.bowl_width", scenario.bowl_width, to_double),
      STLID_FIELD("scenario.edge_amplitude", scenario.edge_amplitude, to_double),
      STLID_FIELD("scenario.amplitude_jitter", scenario.amplitude_jitter, to_double),
      STLID_FIELD("scenario.has_steady_zone", scenario.has_steady_zone, to_bool),
      STLID_FIELD("scenario.steady_zone", scenario.steady_zone, to_rect),
      STLID_FIELD("scenario.steady_zone_rate", scenario.steady_zone_rate, to_double),
      {"scenario.seed", [](const RunConfig& c) { return std::to_string(c.scenario.seed); },
       [](RunConfig& c, const std::string& v) {
         c.scenario.seed = static_cast<std::uint64_t>(to_count("scenario.seed", v));
       }},
  };
  return table;
}

#undef STLID_FIELD

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (e.key == key) {
      e.set(config, std::string(csv::trim(value)));
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not key=value");
  apply_setting(config, std::string(csv::trim(std::string_view(assignment).substr(0, eq))),
                assignment.substr(eq + 1));
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = csv::trim(line);
    if (body.empty()) continue;
    try {
      apply_override(config, std::string(body));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string format_config(const RunConfig& config) {
  std::ostringstream os;
  for (const auto& e : entries()) os << e.key << " = " << e.get(config) << '\n';
  return os.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(e.key);
  return out;
}

}  // namespace stlid
