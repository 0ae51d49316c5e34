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
#include <vector>

#include "stlid/data.hpp"
#include "stlid/detection.hpp"
#include "stlid/fusion.hpp"
#include "stlid/lid.hpp"

namespace stlid {

struct PipelineConfig {
  LidConfig lid;
  FusionConfig fusion;
  DetectionConfig detection;
  /// Worker count for the per-point kernels; 0 = all cores.
  int threads = 0;

  void validate() const;
};

/// Everything computed at one step. t_lid, st and the tracker are only
/// populated from the third step with a velocity on (has_st()).
struct StepScores {
  Step step = 0;
  std::vector<double> s_lid;
  std::vector<double> fused;
  std::vector<double> t_lid;
  StLidField st;
  /// Degenerate fused s-LID or t-LID: excluded from the argmax.
  std::vector<std::uint8_t> excluded;
  std::optional<DetectionEvent> event;

  bool has_st() const { return !st.values.empty(); }
};

/// Resumable state of a Pipeline, minus the velocity history (which is
/// rebuilt from the dataset).
struct PipelineCheckpoint {
  Step next_step = 0;
  std::vector<double> prev_column;
  std::vector<double> prev_slid;
  std::vector<RunningStats> t_stats;
  DetectionState detection;
};

/// Streaming st-LID computation over displacement columns fed in step
/// order. Copyable: a copy continues independently from the same state.
class Pipeline {
 public:
  Pipeline(std::vector<MonitoredPoint> points, PipelineConfig config, Step start_step);

  /// Consumes the displacement column of next_step().
  const StepScores& advance(std::span<const double> column);

  Step next_step() const { return next_step_; }
  const StepScores& last() const { return scores_; }
  const DetectionState& detection() const { return state_; }
  const PipelineConfig& config() const { return config_; }
  std::span<const Coord> coords() const { return coords_; }
  std::span<const PointId> ids() const { return ids_; }
  /// Worker count used by later advance() calls.
  void set_threads(int threads) { config_.threads = threads; }

  /// First step at which st-LID values exist.
  Step first_scored_step() const { return start_step_ + 3; }

  PipelineCheckpoint checkpoint() const;
  /// Restores a checkpoint taken on the same site and configuration,
  /// replaying velocities from `dataset`.
  void restore(const PipelineCheckpoint& cp, const MonitoringDataset& dataset);

 private:
  PipelineConfig config_;
  Step start_step_;
  Step next_step_;
  std::vector<Coord> coords_;
  std::vector<PointId> ids_;
  std::optional<SpatialFusion> fusion_;

  std::vector<double> prev_column_;
  std::vector<double> prev_slid_;
  std::vector<std::vector<double>> velocities_;
  std::vector<RunningStats> t_stats_;
  DetectionState state_;
  StepScores scores_;
};

struct RegionLeadTime {
  std::string label;
  Step time_of_failure = 0;
  std::int64_t steps = 0;
  double minutes = 0.0;
};

struct DetectionRun {
  std::vector<StLidField> fields;  // only when requested
  std::vector<DetectionEvent> events;
  DetectionState final_state;
  std::vector<RegionLeadTime> lead_times;
};

struct RunOptions {
  bool keep_fields = false;
  /// Last step to process (inclusive); defaults to the end of the dataset.
  std::optional<Step> until;
  std::function<void(const StepScores&, const Pipeline&)> on_step;
};

/// Streams the whole dataset through a Pipeline in step order.
DetectionRun run_detection(const MonitoringDataset& dataset, const PipelineConfig& config,
                           const GroundTruth* truth = nullptr, const RunOptions& options = {});

/// Lead time of an event against one region: tof - detection step when the
/// event lies in the region no later than tof, otherwise 0.
RegionLeadTime event_lead_time(const std::optional<DetectionEvent>& event,
                               const FailureRegion& region, double step_interval);

}  // namespace stlid
