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


#include "stlid/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>

#include "stlid/csv.hpp"
#include "stlid/error.hpp"

namespace stlid {

PrecisionResult precision(std::span<const Coord> detected, const GroundTruth& truth) {
  PrecisionResult r;
  r.total = detected.size();
  for (const auto& c : detected)
    if (truth.inside_any(c)) ++r.correct;
  if (r.total > 0)
    r.value = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

LeadTime lead_time(std::span<const TopSet> history, const FailureRegion& region,
                   double step_interval_minutes, std::size_t slack) {
  std::map<Step, const TopSet*> by_step;
  for (const auto& s : history)
    if (s.step <= region.time_of_failure) by_step[s.step] = &s;
  const auto ok = [&](Step t) {
    const auto it = by_step.find(t);
    if (it == by_step.end() || it->second->points.empty()) return false;
    return std::all_of(it->second->points.begin(), it->second->points.end(),
                       [&](const Coord& c) { return region.rect.contains(c); });
  };

  LeadTime lt;
  if (by_step.empty()) return lt;
  const Step first = by_step.begin()->first;
  std::size_t misses = 0;
  for (Step t = region.time_of_failure; t >= first; --t) {
    if (ok(t)) {
      lt.detection_step = t;
    } else if (++misses > slack) {
      break;
    }
  }
  if (lt.detection_step) {
    lt.steps = region.time_of_failure - *lt.detection_step;
    lt.minutes = static_cast<double>(lt.steps) * step_interval_minutes;
  }
  return lt;
}

std::string format_lead_time(std::int64_t steps, double minutes) {
  if (steps == 0) return "0";
  const double hours = minutes / 60.0;
  char buf[64];
  if (hours < 24.0)
    std::snprintf(buf, sizeof buf, "%lld (%.1f hrs)", static_cast<long long>(steps), hours);
  else
    std::snprintf(buf, sizeof buf, "%lld (%.1f days)", static_cast<long long>(steps),
                  hours / 24.0);
  return buf;
}

void BenchmarkConfig::validate() const {
  pipeline.validate();
  dbscan.validate();
  lof.validate();
  edq.validate();
  for (const auto& m : methods) {
    if (std::find(std::begin(kBenchmarkMethods), std::end(kBenchmarkMethods), m) ==
        std::end(kBenchmarkMethods)) {
      std::string valid;
      for (const char* name : kBenchmarkMethods) valid += std::string(valid.empty() ? "" : ", ") + name;
      throw ConfigError("unknown method '" + m + "' (valid: " + valid + ")");
    }
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct MethodTrack {
  std::string name;
  std::vector<TopSet> history;
  std::vector<double> step_seconds;
  // Detections at each region's time of failure, by region index.
  std::map<std::size_t, std::vector<Coord>> at_failure;
  std::size_t events = 0;
};

std::vector<Coord> coords_of(std::span<const std::size_t> indices, std::span<const Coord> coords) {
  std::vector<Coord> out;
  out.reserve(indices.size());
  for (const auto i : indices) out.push_back(coords[i]);
  return out;
}

std::vector<Coord> high_risk_coords(const BaselineResult& r, std::span<const Coord> coords) {
  std::vector<Coord> out;
  for (std::size_t i = 0; i < r.high_risk.size(); ++i)
    if (r.high_risk[i]) out.push_back(coords[i]);
  return out;
}

std::pair<double, double> median_max(std::vector<double> v) {
  if (v.empty()) return {0.0, 0.0};
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return {median, v.back()};
}

}  // namespace

std::vector<EvaluationReport> benchmark(const MonitoringDataset& dataset,
                                        const GroundTruth& truth,
                                        const BenchmarkConfig& config) {
  config.validate();
  truth.validate(dataset);
  std::vector<std::string> names = config.methods;
  if (names.empty()) names.assign(std::begin(kBenchmarkMethods), std::end(kBenchmarkMethods));
  const auto wants = [&](const char* m) {
    return std::find(names.begin(), names.end(), m) != names.end();
  };

  const auto coords = dataset.coords();
  const auto ids = dataset.ids();
  Step last = dataset.end_step() - 1;
  if (!truth.regions.empty()) {
    last = dataset.start_step();
    for (const auto& r : truth.regions) last = std::max(last, r.time_of_failure);
  }
  const auto failing_at = [&](Step t) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < truth.regions.size(); ++r)
      if (truth.regions[r].time_of_failure == t) out.push_back(r);
    return out;
  };

  std::map<std::string, MethodTrack> tracks;
  for (const auto& n : names) tracks[n].name = n;
  const int threads = config.pipeline.threads;

  // Every step-wise method shares one pass over the data.
  std::optional<Pipeline> pipeline;
  if (wants("stlid")) pipeline.emplace(dataset.points(), config.pipeline, dataset.start_step());
  for (Step t = dataset.start_step(); t <= last; ++t) {
    const auto regions_now = failing_at(t);
    const auto record = [&](MethodTrack& track, std::vector<Coord> top,
                            const std::vector<Coord>& detected) {
      track.history.push_back({t, std::move(top)});
      for (const auto r : regions_now) track.at_failure[r] = detected;
    };

    if (pipeline) {
      auto& track = tracks["stlid"];
      const auto col = dataset.column(t);
      const auto start = Clock::now();
      const auto& scores = pipeline->advance(col);
      std::vector<std::size_t> detected;
      if (scores.has_st())
        detected = detected_points(pipeline->detection(), scores.st, coords,
                                   pipeline->config().detection, scores.excluded);
      if (t > dataset.start_step()) track.step_seconds.push_back(seconds_since(start));
      if (scores.event) ++track.events;
      const auto pts = coords_of(detected, coords);
      record(track, pts, pts);
    }
    if (t == dataset.start_step()) continue;  // no velocity yet

    const bool any_samples = wants("dbscan") || wants("lof") || wants("slid");
    std::vector<KinematicSample> samples;
    if (any_samples) samples = samples_at(dataset, t);

    const auto run_baseline = [&](const char* name, auto&& fn) {
      if (!wants(name)) return;
      auto& track = tracks[name];
      const auto start = Clock::now();
      std::optional<BaselineResult> r;
      try {
        r = fn();
      } catch (const DegenerateError&) {
        // No separation at this step: nothing is reported.
      }
      track.step_seconds.push_back(seconds_since(start));
      if (r && config.on_result) {
        r->method = name;
        r->step = t;
        config.on_result(*r);
      }
      if (r)
        record(track, coords_of(r->top, coords), high_risk_coords(*r, coords));
      else
        record(track, {}, {});
    };

    run_baseline("kmeans", [&] { return kmeans2(dataset.column(t), ids); });
    run_baseline("dbscan", [&] { return dbscan(samples, ids, config.dbscan); });
    run_baseline("lof", [&] { return lof(samples, ids, config.lof); });
    run_baseline("slid", [&] {
      const auto field = s_lid_all(dataset, t, config.pipeline.lid, threads);
      return raw_slid_baseline(field.values, ids);
    });
  }

  // EDQ selects whole series, so it is evaluated once per time of failure.
  if (wants("edq")) {
    auto& track = tracks["edq"];
    for (std::size_t r = 0; r < truth.regions.size(); ++r) {
      const Step tof = truth.regions[r].time_of_failure;
      const auto start = Clock::now();
      const auto res = edq_select(dataset, tof, config.edq, threads);
      track.step_seconds.push_back(seconds_since(start));
      if (config.on_result) config.on_result(res);
      track.history.push_back({tof, coords_of(res.top, coords)});
    }
  }

  std::vector<EvaluationReport> reports;
  for (const auto& name : names) {
    const auto& track = tracks[name];
    const auto [median, max] = median_max(track.step_seconds);
    const auto base = [&](const std::string& region) {
      EvaluationReport rep;
      rep.method = name;
      rep.region = region;
      rep.median_step_seconds = median;
      rep.max_step_seconds = max;
      rep.events = track.events;
      return rep;
    };
    if (truth.regions.empty()) {
      reports.push_back(base("none"));
      continue;
    }
    for (std::size_t r = 0; r < truth.regions.size(); ++r) {
      const auto& region = truth.regions[r];
      auto rep = base(region.label);
      if (name != "edq") {
        const auto it = track.at_failure.find(r);
        if (it != track.at_failure.end()) rep.precision = precision(it->second, truth);
        rep.lead = lead_time(track.history, region, dataset.step_interval(), config.slack);
      } else {
        std::vector<TopSet> one;
        for (const auto& s : track.history)
          if (s.step == region.time_of_failure) one.push_back(s);
        rep.lead = lead_time(one, region, dataset.step_interval(), config.slack);
      }
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

void write_report_csv(const std::vector<EvaluationReport>& reports, const std::string& path) {
  auto out = csv::open_output(path);
  out << csv::schema_header("report") << '\n';
  for (const auto& r : reports) {
    out << r.method << ',' << r.region << ','
        << (r.precision.value ? csv::format_double(*r.precision.value) : "") << ','
        << r.precision.correct << ',' << r.precision.total << ',' << r.lead.steps << ','
        << csv::format_double(r.lead.minutes) << ','
        << csv::format_double(r.median_step_seconds) << ','
        << csv::format_double(r.max_step_seconds) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

namespace {

std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line.append(width[c] - row[c].size(), ' ');
    }
    os << line << '\n';
  }
  return os.str();
}

}  // namespace

std::string format_report_table(const std::vector<EvaluationReport>& reports) {
  std::vector<std::string> methods, regions;
  for (const auto& r : reports) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    if (std::find(regions.begin(), regions.end(), r.region) == regions.end())
      regions.push_back(r.region);
  }
  const auto find = [&](const std::string& m, const std::string& g) -> const EvaluationReport* {
    for (const auto& r : reports)
      if (r.method == m && r.region == g) return &r;
    return nullptr;
  };

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"region", "metric"};
  header.insert(header.end(), methods.begin(), methods.end());
  rows.push_back(header);
  for (const auto& g : regions) {
    std::vector<std::string> prec{g, "Prec."}, lead{"", "lead"};
    for (const auto& m : methods) {
      const auto* r = find(m, g);
      if (r && r->precision.value) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", *r->precision.value);
        prec.push_back(buf);
      } else {
        prec.push_back("N.A.");
      }
      lead.push_back(r ? format_lead_time(r->lead.steps, r->lead.minutes) : "-");
    }
    rows.push_back(prec);
    rows.push_back(lead);
  }

  std::vector<std::vector<std::string>> timing{{"method", "median_s", "max_s", "events"}};
  for (const auto& m : methods) {
    const EvaluationReport* r = nullptr;
    for (const auto& x : reports)
      if (x.method == m) { r = &x; break; }
    char med[32], mx[32];
    std::snprintf(med, sizeof med, "%.6f", r->median_step_seconds);
    std::snprintf(mx, sizeof mx, "%.6f", r->max_step_seconds);
    timing.push_back({m, med, mx, m == "stlid" ? std::to_string(r->events) : "-"});
  }
  return render(rows) + "\n" + render(timing);
}

}  // namespace stlid
