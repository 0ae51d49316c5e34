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


#include "stlid/stlid.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stlid/checkpoint.hpp"
#include "stlid/config.hpp"
#include "stlid/csv.hpp"
#include "stlid/data.hpp"
#include "stlid/error.hpp"
#include "stlid/metrics.hpp"
#include "stlid/pipeline.hpp"

struct stlid_config {
  stlid::RunConfig value;
};

struct stlid_dataset {
  stlid::MonitoringDataset value;
};

struct stlid_truth {
  stlid::GroundTruth value;
};

struct stlid_run {
  std::vector<stlid::DetectionEvent> events;
  std::vector<stlid::RegionLeadTime> lead_times;
};

struct stlid_monitor {
  const stlid::MonitoringDataset* dataset;
  std::string fingerprint;
  stlid::Pipeline pipeline;
};

struct stlid_report {
  std::vector<stlid::EvaluationReport> rows;
};

namespace {

thread_local std::string last_error;

stlid_status fail(stlid_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

stlid_status status_of(stlid::ErrorKind kind) {
  switch (kind) {
    case stlid::ErrorKind::kParse: return STLID_ERR_PARSE;
    case stlid::ErrorKind::kConsistency: return STLID_ERR_CONSISTENCY;
    case stlid::ErrorKind::kData: return STLID_ERR_DATA;
    case stlid::ErrorKind::kConfig: return STLID_ERR_CONFIG;
    case stlid::ErrorKind::kPrecondition: return STLID_ERR_PRECONDITION;
    case stlid::ErrorKind::kDegenerate: return STLID_ERR_DEGENERATE;
    case stlid::ErrorKind::kIo: return STLID_ERR_IO;
  }
  return STLID_ERR_INTERNAL;
}

template <class F>
stlid_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return STLID_OK;
  } catch (const stlid::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(STLID_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(STLID_ERR_INTERNAL, e.what());
  }
}

#define STLID_REQUIRE(COND)                                              \
  do {                                                                   \
    if (!(COND)) return fail(STLID_ERR_ARGUMENT, "invalid argument: " #COND); \
  } while (0)

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

stlid_event to_c(const stlid::DetectionEvent& e) {
  return {e.detection_step, e.point_id, e.location.x, e.location.y, e.st_lid};
}

void write_events(const std::vector<stlid::DetectionEvent>& events, const std::string& path) {
  namespace csv = stlid::csv;
  auto out = csv::open_output(path);
  out << csv::schema_header("events") << '\n';
  for (const auto& e : events)
    out << e.detection_step << ',' << e.point_id << ',' << csv::format_double(e.location.x)
        << ',' << csv::format_double(e.location.y) << ',' << csv::format_double(e.st_lid)
        << '\n';
  if (!out) throw stlid::IoError("failed writing " + path);
}

void write_scores(std::ostream& out, const stlid::StepScores& s,
                  std::span<const stlid::PointId> ids) {
  namespace csv = stlid::csv;
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << s.step << ',' << ids[i] << ',' << csv::format_double(s.s_lid[i]) << ','
        << csv::format_double(s.fused[i]) << ',' << csv::format_double(s.t_lid[i]) << ','
        << csv::format_double(s.st.values[i]) << '\n';
}

// Identifies the dataset and every setting that changes pipeline output.
std::string fingerprint(const stlid::MonitoringDataset& ds, const stlid::RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 1099511628211ULL;
  };
  for (const auto& p : ds.points()) {
    mix(&p.id, sizeof p.id);
    mix(&p.coord, sizeof p.coord);
  }
  mix(ds.matrix().data(), ds.matrix().size() * sizeof(double));
  std::ostringstream os;
  os << "points=" << ds.num_points() << ";steps=" << ds.num_steps()
     << ";start=" << ds.start_step() << ";data=" << std::hex << h << std::dec;
  std::istringstream lines(stlid::format_config(cfg));
  std::string line;
  while (std::getline(lines, line)) {
    const bool relevant = line.rfind("lid.", 0) == 0 || line.rfind("fusion.", 0) == 0 ||
                          line.rfind("detection.", 0) == 0;
    if (relevant) os << ';' << line;
  }
  return os.str();
}

}  // namespace

extern "C" {

const char* stlid_version(void) { return "0.1.0"; }

const char* stlid_last_error(void) { return last_error.c_str(); }

const char* stlid_status_name(stlid_status status) {
  switch (status) {
    case STLID_OK: return "ok";
    case STLID_ERR_ARGUMENT: return "argument error";
    case STLID_ERR_PARSE: return "parse error";
    case STLID_ERR_CONSISTENCY: return "consistency error";
    case STLID_ERR_DATA: return "data error";
    case STLID_ERR_CONFIG: return "config error";
    case STLID_ERR_PRECONDITION: return "precondition error";
    case STLID_ERR_DEGENERATE: return "degenerate input";
    case STLID_ERR_IO: return "i/o error";
    case STLID_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void stlid_string_free(char* s) { std::free(s); }

stlid_status stlid_config_new(stlid_config** out) {
  STLID_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = new stlid_config{}; });
}

void stlid_config_free(stlid_config* config) { delete config; }

stlid_status stlid_config_load_file(stlid_config* config, const char* path) {
  STLID_REQUIRE(config && path);
  return guard([&] { stlid::load_config_file(config->value, path); });
}

stlid_status stlid_config_set(stlid_config* config, const char* key, const char* value) {
  STLID_REQUIRE(config && key && value);
  return guard([&] { stlid::apply_setting(config->value, key, value); });
}

stlid_status stlid_config_get(const stlid_config* config, const char* key, char** out) {
  STLID_REQUIRE(config && key && out);
  *out = nullptr;
  return guard([&] {
    const std::string prefix = std::string(key) + " = ";
    std::istringstream lines(stlid::format_config(config->value));
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind(prefix, 0) == 0) {
        *out = copy_string(line.substr(prefix.size()));
        return;
      }
    }
    throw stlid::ConfigError(std::string("unknown config key '") + key + "'");
  });
}

stlid_status stlid_config_validate(const stlid_config* config) {
  STLID_REQUIRE(config);
  return guard([&] { config->value.validate(); });
}

stlid_status stlid_config_format(const stlid_config* config, char** out) {
  STLID_REQUIRE(config && out);
  *out = nullptr;
  return guard([&] { *out = copy_string(stlid::format_config(config->value)); });
}

stlid_status stlid_dataset_load(const char* points_path, const char* series_path,
                                double step_interval_minutes, stlid_dataset** out) {
  STLID_REQUIRE(points_path && series_path && out);
  *out = nullptr;
  return guard([&] {
    *out = new stlid_dataset{stlid::load_dataset(points_path, series_path, step_interval_minutes)};
  });
}

stlid_status stlid_dataset_save(const stlid_dataset* dataset, const char* points_path,
                                const char* series_path) {
  STLID_REQUIRE(dataset && points_path && series_path);
  return guard([&] { stlid::save_dataset(dataset->value, points_path, series_path); });
}

void stlid_dataset_free(stlid_dataset* dataset) { delete dataset; }

size_t stlid_dataset_num_points(const stlid_dataset* d) { return d ? d->value.num_points() : 0; }
size_t stlid_dataset_num_steps(const stlid_dataset* d) { return d ? d->value.num_steps() : 0; }
int64_t stlid_dataset_start_step(const stlid_dataset* d) { return d ? d->value.start_step() : 0; }
double stlid_dataset_step_interval(const stlid_dataset* d) {
  return d ? d->value.step_interval() : 0.0;
}

stlid_status stlid_truth_load(const char* path, stlid_truth** out) {
  STLID_REQUIRE(path && out);
  *out = nullptr;
  return guard([&] { *out = new stlid_truth{stlid::load_ground_truth(path)}; });
}

stlid_status stlid_truth_save(const stlid_truth* truth, const char* path) {
  STLID_REQUIRE(truth && path);
  return guard([&] { stlid::save_ground_truth(truth->value, path); });
}

void stlid_truth_free(stlid_truth* truth) { delete truth; }

size_t stlid_truth_num_regions(const stlid_truth* t) { return t ? t->value.regions.size() : 0; }

stlid_status stlid_truth_region(const stlid_truth* truth, size_t index, stlid_region* out) {
  STLID_REQUIRE(truth && out && index < truth->value.regions.size());
  const auto& r = truth->value.regions[index];
  *out = {r.label.c_str(), r.rect.xmin, r.rect.ymin, r.rect.xmax, r.rect.ymax,
          r.time_of_failure};
  last_error.clear();
  return STLID_OK;
}

stlid_status stlid_generate(const stlid_config* config, stlid_dataset** dataset,
                            stlid_truth** truth) {
  STLID_REQUIRE(config && dataset && truth);
  *dataset = nullptr;
  *truth = nullptr;
  return guard([&] {
    auto [ds, gt] = stlid::generate_creep_scenario(config->value.scenario);
    auto d = std::make_unique<stlid_dataset>(stlid_dataset{std::move(ds)});
    auto t = std::make_unique<stlid_truth>(stlid_truth{std::move(gt)});
    *dataset = d.release();
    *truth = t.release();
  });
}

stlid_status stlid_detect(const stlid_dataset* dataset, const stlid_config* config,
                          const stlid_detect_options* options, stlid_run** out) {
  STLID_REQUIRE(dataset && config && out);
  *out = nullptr;
  return guard([&] {
    const auto& ds = dataset->value;
    const auto& cfg = config->value;
    cfg.validate();
    const stlid_detect_options defaults{};
    const auto& opt = options ? *options : defaults;
    if (opt.truth) opt.truth->value.validate(ds);

    stlid::RunOptions run_opts;
    const stlid::Step first_scored = ds.start_step() + 3;
    if (opt.has_at_step) {
      if (opt.at_step < first_scored || !ds.has_step(opt.at_step))
        throw stlid::PreconditionError(
            "--at-step must lie in [" + std::to_string(first_scored) + ", " +
            std::to_string(ds.end_step() - 1) +
            "]: st-LID needs a velocity and a fused s-LID step first");
      run_opts.until = opt.at_step;
    }

    std::ofstream scores;
    if (opt.scores_path) {
      scores = stlid::csv::open_output(opt.scores_path);
      scores << stlid::csv::schema_header("scores") << '\n';
      run_opts.on_step = [&](const stlid::StepScores& s, const stlid::Pipeline& p) {
        if (!s.has_st()) return;
        if (opt.has_at_step && s.step != opt.at_step) return;
        write_scores(scores, s, p.ids());
      };
    }

    const auto run = stlid::run_detection(ds, cfg.pipeline,
                                          opt.truth ? &opt.truth->value : nullptr, run_opts);
    if (opt.scores_path) {
      scores.flush();
      if (!scores) throw stlid::IoError(std::string("failed writing ") + opt.scores_path);
    }
    if (opt.events_path) write_events(run.events, opt.events_path);
    *out = new stlid_run{run.events, run.lead_times};
  });
}

void stlid_run_free(stlid_run* run) { delete run; }

size_t stlid_run_num_events(const stlid_run* run) { return run ? run->events.size() : 0; }

stlid_status stlid_run_event(const stlid_run* run, size_t index, stlid_event* out) {
  STLID_REQUIRE(run && out && index < run->events.size());
  *out = to_c(run->events[index]);
  last_error.clear();
  return STLID_OK;
}

size_t stlid_run_num_lead_times(const stlid_run* run) {
  return run ? run->lead_times.size() : 0;
}

stlid_status stlid_run_lead_time(const stlid_run* run, size_t index, stlid_lead_time* out) {
  STLID_REQUIRE(run && out && index < run->lead_times.size());
  const auto& l = run->lead_times[index];
  *out = {l.label.c_str(), l.time_of_failure, l.steps, l.minutes};
  last_error.clear();
  return STLID_OK;
}

stlid_status stlid_monitor_new(const stlid_dataset* dataset, const stlid_config* config,
                               stlid_monitor** out) {
  STLID_REQUIRE(dataset && config && out);
  *out = nullptr;
  return guard([&] {
    config->value.validate();
    const auto& ds = dataset->value;
    *out = new stlid_monitor{&ds, fingerprint(ds, config->value),
                             stlid::Pipeline(ds.points(), config->value.pipeline,
                                             ds.start_step())};
  });
}

stlid_status stlid_monitor_resume(const stlid_dataset* dataset, const stlid_config* config,
                                  const char* state_path, stlid_monitor** out) {
  STLID_REQUIRE(dataset && config && state_path && out);
  *out = nullptr;
  return guard([&] {
    config->value.validate();
    const auto& ds = dataset->value;
    const auto state = stlid::load_state(state_path);
    auto m = std::make_unique<stlid_monitor>(stlid_monitor{
        &ds, fingerprint(ds, config->value),
        stlid::Pipeline(ds.points(), config->value.pipeline, ds.start_step())});
    if (state.fingerprint != m->fingerprint)
      throw stlid::ConsistencyError(std::string(state_path) +
                                    " was written for a different dataset or configuration");
    m->pipeline.restore(state.checkpoint, ds);
    *out = m.release();
  });
}

stlid_status stlid_monitor_step(stlid_monitor* monitor, stlid_step_summary* out) {
  STLID_REQUIRE(monitor && out);
  *out = stlid_step_summary{};
  return guard([&] {
    auto& p = monitor->pipeline;
    const auto& ds = *monitor->dataset;
    if (p.next_step() >= ds.end_step()) {
      out->done = 1;
      out->step = p.next_step();
      return;
    }
    const auto col = ds.column(p.next_step());
    const auto& s = p.advance(col);
    out->step = s.step;
    out->scored = s.has_st() ? 1 : 0;
    if (s.has_st()) {
      const auto& hist = p.detection().history;
      if (!hist.empty() && hist.back().step == s.step && hist.back().point_id) {
        out->has_argmax = 1;
        out->argmax_id = *hist.back().point_id;
        out->argmax_st_lid = hist.back().value;
      }
      out->hits = p.detection().consecutive_hits;
    }
    if (s.event) {
      out->event = 1;
      out->event_info = to_c(*s.event);
    }
  });
}

stlid_status stlid_monitor_save(const stlid_monitor* monitor, const char* state_path) {
  STLID_REQUIRE(monitor && state_path);
  return guard([&] {
    stlid::save_state({monitor->fingerprint, monitor->pipeline.checkpoint()}, state_path);
  });
}

int64_t stlid_monitor_next_step(const stlid_monitor* monitor) {
  return monitor ? monitor->pipeline.next_step() : 0;
}

stlid_status stlid_monitor_write_events(const stlid_monitor* monitor, const char* path) {
  STLID_REQUIRE(monitor && path);
  return guard([&] {
    std::vector<stlid::DetectionEvent> events;
    if (const auto& e = monitor->pipeline.detection().event) events.push_back(*e);
    write_events(events, path);
  });
}

void stlid_monitor_free(stlid_monitor* monitor) { delete monitor; }

stlid_status stlid_benchmark(const stlid_dataset* dataset, const stlid_truth* truth,
                             const stlid_config* config, const char* methods,
                             const char* baselines_path, stlid_report** out) {
  STLID_REQUIRE(dataset && config && out);
  *out = nullptr;
  return guard([&] {
    const auto& cfg = config->value;
    stlid::BenchmarkConfig bc;
    bc.pipeline = cfg.pipeline;
    bc.dbscan = cfg.dbscan;
    bc.lof = cfg.lof;
    bc.edq = cfg.edq;
    bc.slack = cfg.slack;
    if (methods && *methods)
      for (const auto m : stlid::csv::split(methods)) bc.methods.emplace_back(m);
    std::ofstream dump;
    if (baselines_path) {
      namespace csv = stlid::csv;
      dump = csv::open_output(baselines_path);
      dump << csv::schema_header("baselines") << '\n';
      const auto& pts = dataset->value.points();
      bc.on_result = [&](const stlid::BaselineResult& r) {
        for (std::size_t i = 0; i < r.likelihood.size(); ++i)
          dump << r.method << ',' << r.step << ',' << pts[i].id << ','
               << csv::format_double(r.likelihood[i]) << ',' << int{r.high_risk[i]} << '\n';
      };
    }
    const stlid::GroundTruth none;
    *out = new stlid_report{stlid::benchmark(dataset->value, truth ? truth->value : none, bc)};
    if (baselines_path) {
      dump.flush();
      if (!dump) throw stlid::IoError(std::string("failed writing ") + baselines_path);
    }
  });
}

size_t stlid_method_count(void) { return std::size(stlid::kBenchmarkMethods); }

const char* stlid_method_name(size_t index) {
  return index < std::size(stlid::kBenchmarkMethods) ? stlid::kBenchmarkMethods[index] : nullptr;
}

void stlid_report_free(stlid_report* report) { delete report; }

size_t stlid_report_num_rows(const stlid_report* r) { return r ? r->rows.size() : 0; }

stlid_status stlid_report_row_at(const stlid_report* report, size_t index,
                                 stlid_report_row* out) {
  STLID_REQUIRE(report && out && index < report->rows.size());
  const auto& r = report->rows[index];
  *out = {r.method.c_str(),
          r.region.c_str(),
          r.precision.value ? 1 : 0,
          r.precision.value.value_or(0.0),
          r.precision.correct,
          r.precision.total,
          r.lead.steps,
          r.lead.minutes,
          r.median_step_seconds,
          r.max_step_seconds,
          r.events};
  last_error.clear();
  return STLID_OK;
}

stlid_status stlid_report_write_csv(const stlid_report* report, const char* path) {
  STLID_REQUIRE(report && path);
  return guard([&] { stlid::write_report_csv(report->rows, path); });
}

stlid_status stlid_report_table(const stlid_report* report, char** out) {
  STLID_REQUIRE(report && out);
  *out = nullptr;
  return guard([&] { *out = copy_string(stlid::format_report_table(report->rows)); });
}

stlid_status stlid_format_lead_time(int64_t steps, double minutes, char** out) {
  STLID_REQUIRE(out);
  *out = nullptr;
  return guard([&] { *out = copy_string(stlid::format_lead_time(steps, minutes)); });
}

size_t stlid_schema_count(void) { return stlid::csv::schema_names().size(); }

const char* stlid_schema_name(size_t index) {
  const auto& names = stlid::csv::schema_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

stlid_status stlid_validate_file(const char* path, const char* schema) {
  STLID_REQUIRE(path && schema);
  const auto& names = stlid::csv::schema_names();
  if (std::find(names.begin(), names.end(), schema) == names.end())
    return fail(STLID_ERR_ARGUMENT, std::string("unknown schema '") + schema + "'");
  return guard([&] {
    const auto msg = stlid::csv::validate_schema(path, schema);
    if (!msg.empty()) throw stlid::DataError(msg);
  });
}

}  // extern "C"
