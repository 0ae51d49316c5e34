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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlid/baselines.hpp"
#include "stlid/data.hpp"
#include "stlid/pipeline.hpp"

namespace stlid {

struct PrecisionResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  /// Empty when nothing was detected.
  std::optional<double> value;
};

/// Share of detected locations inside any ground-truth rectangle.
PrecisionResult precision(std::span<const Coord> detected, const GroundTruth& truth);

/// Locations a method reports at one step.
struct TopSet {
  Step step = 0;
  std::vector<Coord> points;
};

struct LeadTime {
  /// First step of the consistent run, when there is one.
  std::optional<Step> detection_step;
  std::int64_t steps = 0;
  double minutes = 0.0;
};

/// Scans backward from the region's time of failure for the earliest step
/// from which every later top set is non-empty and inside the region,
/// tolerating up to `slack` failing steps. Steps after the failure are
/// ignored; a missing step counts as failing.
LeadTime lead_time(std::span<const TopSet> history, const FailureRegion& region,
                   double step_interval_minutes, std::size_t slack = 0);

/// "80 (3.3 hrs)" below one day, "1726 (3.0 days)" otherwise.
std::string format_lead_time(std::int64_t steps, double minutes);

struct EvaluationReport {
  std::string method;
  std::string region;  // "none" without ground truth
  PrecisionResult precision;
  LeadTime lead;
  double median_step_seconds = 0.0;
  double max_step_seconds = 0.0;
  /// st-LID only: events over the evaluated range.
  std::size_t events = 0;
};

struct BenchmarkConfig {
  PipelineConfig pipeline;
  DbscanConfig dbscan;
  LofConfig lof;
  EdqConfig edq;
  std::size_t slack = 0;
  /// Subset of kBenchmarkMethods; empty means all.
  std::vector<std::string> methods;
  /// Called with every baseline result as it is produced.
  std::function<void(const BaselineResult&)> on_result;

  void validate() const;
};

inline constexpr const char* kBenchmarkMethods[] = {"kmeans", "dbscan", "lof",
                                                    "edq",    "slid",   "stlid"};

/// Runs the methods over the dataset up to the last time of failure (or the
/// end without ground truth), applies each method's top-set rule and
/// reports one row per method and region. EDQ is evaluated at each time of
/// failure only and has no precision.
std::vector<EvaluationReport> benchmark(const MonitoringDataset& dataset,
                                        const GroundTruth& truth,
                                        const BenchmarkConfig& config);

void write_report_csv(const std::vector<EvaluationReport>& reports, const std::string& path);
/// Aligned plain-text table: one column per method, metric rows per region.
std::string format_report_table(const std::vector<EvaluationReport>& reports);

}  // namespace stlid
