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


// Command-line front end. Talks to the library only through stlid.h.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "stlid/stlid.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kConfig = 3, kInterrupted = 130 };

struct Failure {
  int code;
};

int exit_code(stlid_status s) {
  switch (s) {
    case STLID_OK: return kOk;
    case STLID_ERR_ARGUMENT:
    case STLID_ERR_PRECONDITION: return kUsage;
    case STLID_ERR_CONFIG: return kConfig;
    default: return kData;
  }
}

void check(stlid_status s) {
  if (s == STLID_OK) return;
  std::cerr << "stlid: " << stlid_status_name(s) << ": " << stlid_last_error() << '\n';
  throw Failure{exit_code(s)};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<stlid_config, Deleter<stlid_config, stlid_config_free>>;
using Dataset = std::unique_ptr<stlid_dataset, Deleter<stlid_dataset, stlid_dataset_free>>;
using Truth = std::unique_ptr<stlid_truth, Deleter<stlid_truth, stlid_truth_free>>;
using Run = std::unique_ptr<stlid_run, Deleter<stlid_run, stlid_run_free>>;
using Monitor = std::unique_ptr<stlid_monitor, Deleter<stlid_monitor, stlid_monitor_free>>;
using Report = std::unique_ptr<stlid_report, Deleter<stlid_report, stlid_report_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  stlid_string_free(s);
  return out;
}

std::atomic<bool> interrupted{false};
extern "C" void on_signal(int) { interrupted = true; }

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  int parallel = -1;
  bool print_config = false;
};

struct DataArgs {
  std::string dir, points, series, truth;
  double step_interval = 0.0;

  void add(CLI::App* cmd, bool with_truth) {
    cmd->add_option("--data", dir, "Directory holding points.csv, series.csv and truth.csv");
    cmd->add_option("--points", points, "Points CSV (id,x,y)");
    cmd->add_option("--series", series, "Series CSV (id,t,displacement)");
    if (with_truth) cmd->add_option("--truth", truth, "Ground-truth CSV");
    cmd->add_option("--step-interval", step_interval,
                    "Minutes per step (default: data.step_interval)");
  }

  void resolve() {
    namespace fs = std::filesystem;
    if (!dir.empty()) {
      if (points.empty()) points = (fs::path(dir) / "points.csv").string();
      if (series.empty()) series = (fs::path(dir) / "series.csv").string();
      const auto t = fs::path(dir) / "truth.csv";
      if (truth.empty() && fs::exists(t)) truth = t.string();
    }
    if (points.empty() || series.empty()) {
      std::cerr << "stlid: give --data DIR or both --points and --series\n";
      throw Failure{kUsage};
    }
  }

  Dataset load(const stlid_config* cfg) const {
    double interval = step_interval;
    if (interval <= 0.0) interval = std::stod(take(get(cfg, "data.step_interval")));
    stlid_dataset* ds = nullptr;
    check(stlid_dataset_load(points.c_str(), series.c_str(), interval, &ds));
    return Dataset(ds);
  }

  Truth load_truth() const {
    if (truth.empty()) return nullptr;
    stlid_truth* t = nullptr;
    check(stlid_truth_load(truth.c_str(), &t));
    return Truth(t);
  }

  static char* get(const stlid_config* cfg, const char* key) {
    char* out = nullptr;
    check(stlid_config_get(cfg, key, &out));
    return out;
  }
};

Config make_config(const Common& c) {
  stlid_config* raw = nullptr;
  check(stlid_config_new(&raw));
  Config cfg(raw);
  if (!c.config_file.empty()) check(stlid_config_load_file(cfg.get(), c.config_file.c_str()));
  for (const auto& o : c.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      std::cerr << "stlid: --set expects key=value, got '" << o << "'\n";
      throw Failure{kUsage};
    }
    check(stlid_config_set(cfg.get(), o.substr(0, eq).c_str(), o.substr(eq + 1).c_str()));
  }
  if (c.parallel >= 0)
    check(stlid_config_set(cfg.get(), "run.parallel", std::to_string(c.parallel).c_str()));
  check(stlid_config_validate(cfg.get()));
  return cfg;
}

void print_lead_times(const stlid_run* run) {
  for (size_t i = 0; i < stlid_run_num_lead_times(run); ++i) {
    stlid_lead_time lt;
    check(stlid_run_lead_time(run, i, &lt));
    char* text = nullptr;
    check(stlid_format_lead_time(lt.steps, lt.minutes, &text));
    std::cout << "lead_time region=" << lt.label << " tof=" << lt.time_of_failure
              << " steps=" << lt.steps << " lead=\"" << take(text) << "\"\n";
  }
}

void print_event(const stlid_event& e) {
  std::printf("EVENT step=%lld point=%lld x=%.3f y=%.3f st_lid=%.6f\n",
              static_cast<long long>(e.detection_step), static_cast<long long>(e.point_id), e.x,
              e.y, e.st_lid);
}

int cmd_generate(const Config& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "stlid: cannot create " << out_dir << ": " << ec.message() << '\n';
    return kData;
  }
  stlid_dataset* ds_raw = nullptr;
  stlid_truth* truth_raw = nullptr;
  check(stlid_generate(cfg.get(), &ds_raw, &truth_raw));
  Dataset ds(ds_raw);
  Truth truth(truth_raw);
  const auto points = (fs::path(out_dir) / "points.csv").string();
  const auto series = (fs::path(out_dir) / "series.csv").string();
  const auto truth_file = (fs::path(out_dir) / "truth.csv").string();
  check(stlid_dataset_save(ds.get(), points.c_str(), series.c_str()));
  check(stlid_truth_save(truth.get(), truth_file.c_str()));
  std::cout << "wrote " << stlid_dataset_num_points(ds.get()) << " points x "
            << stlid_dataset_num_steps(ds.get()) << " steps, "
            << stlid_truth_num_regions(truth.get()) << " failure region(s) to " << out_dir
            << '\n';
  return kOk;
}

struct DetectArgs {
  std::optional<long long> at_step;
  std::string scores, events;
};

int cmd_detect(const Config& cfg, const DataArgs& data, const DetectArgs& a) {
  const auto ds = data.load(cfg.get());
  const auto truth = data.load_truth();
  stlid_detect_options opt{};
  if (a.at_step) {
    opt.has_at_step = 1;
    opt.at_step = *a.at_step;
  }
  opt.scores_path = a.scores.empty() ? nullptr : a.scores.c_str();
  opt.events_path = a.events.empty() ? nullptr : a.events.c_str();
  opt.truth = truth.get();
  stlid_run* raw = nullptr;
  check(stlid_detect(ds.get(), cfg.get(), &opt, &raw));
  Run run(raw);
  const auto n = stlid_run_num_events(run.get());
  std::cout << "events=" << n << '\n';
  for (size_t i = 0; i < n; ++i) {
    stlid_event e;
    check(stlid_run_event(run.get(), i, &e));
    print_event(e);
  }
  print_lead_times(run.get());
  return kOk;
}

struct MonitorArgs {
  double realtime_factor = 0.0;
  std::string state, events;
  bool resume = false;
  long long checkpoint_every = 100;
  std::optional<long long> stop_after;
  bool quiet = false;
};

int cmd_monitor(const Config& cfg, const DataArgs& data, const MonitorArgs& a) {
  const auto ds = data.load(cfg.get());
  stlid_monitor* raw = nullptr;
  if (a.resume) {
    if (a.state.empty()) {
      std::cerr << "stlid: --resume needs --state\n";
      return kUsage;
    }
    check(stlid_monitor_resume(ds.get(), cfg.get(), a.state.c_str(), &raw));
  } else {
    check(stlid_monitor_new(ds.get(), cfg.get(), &raw));
  }
  Monitor mon(raw);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  const double step_seconds = stlid_dataset_step_interval(ds.get()) * 60.0;
  const auto save = [&] {
    if (!a.state.empty()) check(stlid_monitor_save(mon.get(), a.state.c_str()));
  };
  long long since_save = 0;
  while (true) {
    if (interrupted) {
      save();
      std::cout << "INTERRUPTED next_step=" << stlid_monitor_next_step(mon.get()) << '\n';
      return kInterrupted;
    }
    const auto started = std::chrono::steady_clock::now();
    stlid_step_summary s;
    check(stlid_monitor_step(mon.get(), &s));
    if (s.done) break;
    if (s.scored && !a.quiet) {
      if (s.has_argmax)
        std::printf("step=%lld argmax=%lld st_lid=%.6f hits=%zu\n",
                    static_cast<long long>(s.step), static_cast<long long>(s.argmax_id),
                    s.argmax_st_lid, s.hits);
      else
        std::printf("step=%lld argmax=none hits=%zu\n", static_cast<long long>(s.step), s.hits);
    }
    if (s.event) print_event(s.event_info);
    std::fflush(stdout);
    if (a.checkpoint_every > 0 && ++since_save >= a.checkpoint_every) {
      save();
      since_save = 0;
    }
    if (a.stop_after && s.step >= *a.stop_after) {
      save();
      std::cout << "STOPPED next_step=" << stlid_monitor_next_step(mon.get()) << '\n';
      return kOk;
    }
    if (a.realtime_factor > 0.0) {
      const auto budget = std::chrono::duration<double>(step_seconds / a.realtime_factor);
      std::this_thread::sleep_until(started +
                                    std::chrono::duration_cast<std::chrono::nanoseconds>(budget));
    }
  }
  save();
  if (!a.events.empty()) check(stlid_monitor_write_events(mon.get(), a.events.c_str()));
  std::cout << "DONE next_step=" << stlid_monitor_next_step(mon.get()) << '\n';
  return kOk;
}

struct BenchArgs {
  std::string methods, report, baselines;
};

int cmd_benchmark(const Config& cfg, const DataArgs& data, const BenchArgs& a) {
  std::vector<std::string> valid;
  for (size_t i = 0; i < stlid_method_count(); ++i) valid.emplace_back(stlid_method_name(i));
  std::string list = a.methods == "all" ? "" : a.methods;
  for (size_t begin = 0; !list.empty() && begin <= list.size();) {
    const auto end = std::min(list.find(',', begin), list.size());
    const auto name = list.substr(begin, end - begin);
    if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
      std::string names;
      for (const auto& v : valid) names += (names.empty() ? "" : ", ") + v;
      std::cerr << "stlid: unknown method '" << name << "'; valid: " << names << ", all\n";
      return kUsage;
    }
    begin = end + 1;
  }

  const auto ds = data.load(cfg.get());
  const auto truth = data.load_truth();
  stlid_report* raw = nullptr;
  check(stlid_benchmark(ds.get(), truth.get(), cfg.get(), list.c_str(),
                        a.baselines.empty() ? nullptr : a.baselines.c_str(), &raw));
  Report rep(raw);
  char* table = nullptr;
  check(stlid_report_table(rep.get(), &table));
  std::cout << take(table);
  if (!a.report.empty()) check(stlid_report_write_csv(rep.get(), a.report.c_str()));
  return kOk;
}

int cmd_validate(const std::vector<std::string>& files, const std::string& schema) {
  int rc = kOk;
  for (const auto& f : files) {
    const auto s = stlid_validate_file(f.c_str(), schema.c_str());
    if (s == STLID_OK) {
      std::cout << f << ": ok (" << schema << ")\n";
    } else {
      std::cerr << f << ": " << stlid_last_error() << '\n';
      if (s == STLID_ERR_ARGUMENT) return kUsage;
      rc = kData;
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"st-LID slope failure detection"};
  app.require_subcommand(0, 1);
  Common common;
  app.add_option("-c,--config", common.config_file, "Flat key = value config file");
  app.add_option("--set", common.overrides, "Override one setting (key=value)")->take_all();
  app.add_flag("--print-config", common.print_config,
               "Print the effective configuration and exit");
  app.set_version_flag("--version", std::string(stlid_version()));

  std::string out_dir;
  auto* gen = app.add_subcommand("generate", "Write a synthetic creep scenario");
  gen->add_option("spec", common.config_file, "Scenario spec (scenario.* keys)");
  gen->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  DataArgs data;
  DetectArgs det_args;
  auto* det = app.add_subcommand("detect", "Run st-LID detection over a dataset");
  data.add(det, true);
  det->add_option("--at-step", det_args.at_step, "Stop at this step and dump its scores only");
  det->add_option("--scores", det_args.scores, "Score dump CSV");
  det->add_option("--events", det_args.events, "Event log CSV");
  det->add_option("-j,--parallel", common.parallel, "Worker threads (0 = all cores)");

  MonitorArgs mon_args;
  auto* mon = app.add_subcommand("monitor", "Replay a dataset step by step");
  data.add(mon, false);
  mon->add_option("--realtime-factor", mon_args.realtime_factor,
                  "Replay speed relative to the step interval; 0 runs unthrottled")
      ->check(CLI::NonNegativeNumber);
  mon->add_option("--state", mon_args.state, "State file for checkpoints and resume");
  mon->add_flag("--resume", mon_args.resume, "Continue from --state");
  mon->add_option("--checkpoint-every", mon_args.checkpoint_every,
                  "Save the state every N steps (0 = only at exit)");
  mon->add_option("--stop-after", mon_args.stop_after, "Stop after this step, saving the state");
  mon->add_option("--events", mon_args.events, "Event log CSV written at the end");
  mon->add_flag("-q,--quiet", mon_args.quiet, "Print events only");
  mon->add_option("-j,--parallel", common.parallel, "Worker threads (0 = all cores)");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("benchmark", "Compare detection methods");
  data.add(bench, true);
  bench->add_option("--methods", bench_args.methods,
                    "Comma-separated: kmeans,dbscan,lof,edq,slid,stlid or all")
      ->default_val("all");
  bench->add_option("--report", bench_args.report, "Report CSV");
  bench->add_option("--baselines", bench_args.baselines, "Per-step baseline dump CSV");
  bench->add_option("-j,--parallel", common.parallel, "Worker threads (0 = all cores)");

  std::vector<std::string> files;
  std::string schema;
  auto* val = app.add_subcommand("validate", "Check files against a CSV schema");
  val->add_option("--schema", schema,
                  "points, series, truth, scores, events, report or baselines")
      ->required();
  val->add_option("files", files, "Files to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (val->parsed()) return cmd_validate(files, schema);
    const auto cfg = make_config(common);
    if (common.print_config) {
      char* text = nullptr;
      check(stlid_config_format(cfg.get(), &text));
      std::cout << take(text);
      return kOk;
    }
    if (gen->parsed()) return cmd_generate(cfg, out_dir);
    if (det->parsed() || mon->parsed() || bench->parsed()) data.resolve();
    if (det->parsed()) return cmd_detect(cfg, data, det_args);
    if (mon->parsed()) return cmd_monitor(cfg, data, mon_args);
    if (bench->parsed()) return cmd_benchmark(cfg, data, bench_args);
    std::cout << app.help();
    return kUsage;
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "stlid: " << e.what() << '\n';
    return kData;
  }
}
