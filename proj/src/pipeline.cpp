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

#include "stlid/pipeline.hpp"

#include <cmath>

#include "stlid/error.hpp"
#include "stlid/parallel.hpp"

namespace stlid {

void PipelineConfig::validate() const {
  lid.validate();
  fusion.validate();
  detection.validate();
  if (threads < 0) throw ConfigError("run.parallel must be >= 0");
}

Pipeline::Pipeline(std::vector<MonitoredPoint> points, PipelineConfig config, Step start_step)
    : config_(std::move(config)), start_step_(start_step), next_step_(start_step) {
  config_.validate();
  const std::size_t n = points.size();
  if (n <= config_.lid.s)
    throw ConfigError("lid.s = " + std::to_string(config_.lid.s) + " needs more than " +
                      std::to_string(config_.lid.s) + " monitored points, have " +
                      std::to_string(n));
  if (config_.fusion.enabled && n <= config_.fusion.k_obs)
    throw ConfigError("fusion.k_obs exceeds the available neighbours");
  coords_.reserve(n);
  ids_.reserve(n);
  for (const auto& p : points) {
    coords_.push_back(p.coord);
    ids_.push_back(p.id);
  }
  if (config_.fusion.enabled) fusion_.emplace(coords_, config_.fusion);
  if (config_.detection.epsilon == 0.0) config_.detection.epsilon = default_epsilon(coords_);
  velocities_.resize(n);
  t_stats_.resize(n);
}

const StepScores& Pipeline::advance(std::span<const double> column) {
  const std::size_t n = coords_.size();
  if (column.size() != n)
    throw PreconditionError("displacement column has " + std::to_string(column.size()) +
                            " values, expected " + std::to_string(n));
  for (const double x : column)
    if (!std::isfinite(x)) throw DataError("non-finite displacement at step " +
                                           std::to_string(next_step_));
  const Step t = next_step_++;
  scores_ = StepScores{};
  scores_.step = t;
  if (t == start_step_) {
    prev_column_.assign(column.begin(), column.end());
    return scores_;
  }

  const int threads = config_.threads;
  const auto& lid = config_.lid;
  std::vector<KinematicSample> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = {column[i], column[i] - prev_column_[i]};
    auto& hist = velocities_[i];
    hist.push_back(samples[i].velocity);
    // Bounded history: trim in batches so the amortized cost stays O(1).
    if (lid.t_window > 0 && hist.size() > 2 * (lid.t_window + 1))
      hist.erase(hist.begin(), hist.end() - static_cast<std::ptrdiff_t>(lid.t_window + 1));
  }

  const std::size_t k_table =
      std::max(lid.s, config_.fusion.enabled ? config_.fusion.k_obs : std::size_t{0});
  const auto table = kinematic_neighbors(samples, k_table, threads);
  LidField raw = s_lid_from_table(table, lid, threads);

  LidField fused;
  const bool bootstrap = t == start_step_ + 1;
  if (!config_.fusion.enabled || bootstrap) {
    fused = raw;
  } else {
    fused = fusion_->fuse(samples, table, prev_slid_, lid, threads);
  }
  scores_.s_lid = raw.values;
  scores_.fused = fused.values;
  prev_slid_ = std::move(raw.values);
  prev_column_.assign(column.begin(), column.end());

  if (t < first_scored_step()) return scores_;

  LidField temporal;
  temporal.values.assign(n, 0.0);
  temporal.degenerate.assign(n, 0);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> scratch;
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = t_lid_estimate(velocities_[i], lid, scratch);
      temporal.values[i] = r.value;
      temporal.degenerate[i] = r.ok() ? 0 : 1;
    }
  });
  resolve_sentinels(temporal, lid);
  scores_.t_lid = temporal.values;

  scores_.excluded.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    scores_.excluded[i] = (fused.degenerate[i] || temporal.degenerate[i]) ? 1 : 0;

  if (config_.detection.normalization == Normalization::kZScore) {
    const auto zs = zscore(fused.values);
    std::vector<double> zt(n);
    for (std::size_t i = 0; i < n; ++i) {
      t_stats_[i].push(temporal.values[i]);
      zt[i] = t_stats_[i].zscore(temporal.values[i]);
    }
    scores_.st = st_lid_field(zs, zt, t);
  } else {
    scores_.st = st_lid_field(fused.values, temporal.values, t);
  }

  scores_.event = update_detection(state_, scores_.st, coords_, ids_, config_.detection,
                                   scores_.excluded);
  return scores_;
}

PipelineCheckpoint Pipeline::checkpoint() const {
  return {next_step_, prev_column_, prev_slid_, t_stats_, state_};
}

void Pipeline::restore(const PipelineCheckpoint& cp, const MonitoringDataset& dataset) {
  const std::size_t n = coords_.size();
  if (dataset.num_points() != n || dataset.start_step() != start_step_)
    throw ConsistencyError("checkpoint does not belong to this dataset");
  if (cp.next_step < start_step_ || cp.next_step > dataset.end_step())
    throw ConsistencyError("checkpoint step outside the dataset");
  const bool started = cp.next_step > start_step_;
  const bool scored = cp.next_step > start_step_ + 1;
  if ((started && cp.prev_column.size() != n) || (scored && cp.prev_slid.size() != n) ||
      cp.t_stats.size() != n)
    throw ConsistencyError("checkpoint does not match the number of monitored points");
  for (std::size_t i = 0; i < n; ++i)
    if (dataset.points()[i].id != ids_[i])
      throw ConsistencyError("checkpoint point order differs from the dataset");

  next_step_ = cp.next_step;
  prev_column_ = cp.prev_column;
  prev_slid_ = cp.prev_slid;
  t_stats_ = cp.t_stats;
  state_ = cp.detection;
  scores_ = StepScores{};
  const auto& lid = config_.lid;
  for (std::size_t i = 0; i < n; ++i) {
    auto& hist = velocities_[i];
    hist.clear();
    const auto s = dataset.series(i);
    Step first = start_step_ + 1;
    if (lid.t_window > 0) first = std::max(first, next_step_ - static_cast<Step>(lid.t_window + 1));
    for (Step t = first; t < next_step_; ++t) {
      const auto j = static_cast<std::size_t>(t - start_step_);
      hist.push_back(s[j] - s[j - 1]);
    }
  }
}

RegionLeadTime event_lead_time(const std::optional<DetectionEvent>& event,
                               const FailureRegion& region, double step_interval) {
  RegionLeadTime lt{region.label, region.time_of_failure, 0, 0.0};
  if (event && region.rect.contains(event->location) &&
      event->detection_step <= region.time_of_failure) {
    lt.steps = region.time_of_failure - event->detection_step;
    lt.minutes = static_cast<double>(lt.steps) * step_interval;
  }
  return lt;
}

DetectionRun run_detection(const MonitoringDataset& dataset, const PipelineConfig& config,
                           const GroundTruth* truth, const RunOptions& options) {
  Pipeline pipeline(dataset.points(), config, dataset.start_step());
  DetectionRun run;
  Step last = dataset.end_step() - 1;
  if (options.until) last = std::min(last, *options.until);
  for (Step t = dataset.start_step(); t <= last; ++t) {
    const auto col = dataset.column(t);
    const auto& scores = pipeline.advance(col);
    if (scores.event) run.events.push_back(*scores.event);
    if (options.keep_fields && scores.has_st()) run.fields.push_back(scores.st);
    if (options.on_step) options.on_step(scores, pipeline);
  }
  run.final_state = pipeline.detection();
  if (truth) {
    for (const auto& region : truth->regions)
      run.lead_times.push_back(
          event_lead_time(run.final_state.event, region, dataset.step_interval()));
  }
  return run;
}

}  // namespace stlid
