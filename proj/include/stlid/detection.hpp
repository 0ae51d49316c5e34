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
#include <optional>
#include <span>
#include <vector>

#include "stlid/data.hpp"

namespace stlid {

double sigmoid(double x);

enum class Normalization { kRaw, kZScore };

struct DetectionConfig {
  /// Consecutive steps the argmax must persist.
  std::size_t n = 10;
  /// Ball radius in coordinate units; 0 resolves to twice the median
  /// nearest-neighbour spacing of the site.
  double epsilon = 0.0;
  double threshold = 0.5;
  Normalization normalization = Normalization::kZScore;

  void validate() const;
};

/// Twice the median nearest-neighbour spacing of the monitored points.
double default_epsilon(std::span<const Coord> coords);

/// Per-point st-LID probabilities at one step.
struct StLidField {
  Step step = 0;
  std::vector<double> values;
};

/// sigmoid(s) * sigmoid(t) per point for already-normalized score families.
StLidField st_lid_field(std::span<const double> s_scores,
                        std::span<const double> t_scores, Step step = 0);

/// Population z-scores across the span; all zeros when the spread is zero.
std::vector<double> zscore(std::span<const double> values);

/// Welford accumulator for a per-point z-score against its own history.
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x);
  double zscore(double x) const;
};

struct DetectionEvent {
  Step detection_step = 0;
  Coord location;
  PointId point_id = 0;
  double st_lid = 0.0;
};

/// One step of the persistence tracker, kept for replay.
struct ArgmaxRecord {
  Step step = 0;
  std::optional<PointId> point_id;  // empty when every point was excluded
  Coord coord;
  double value = 0.0;
  std::size_t hits = 0;
};

/// Tracker for the n-consecutive-step argmax persistence rule.
struct DetectionState {
  std::optional<Coord> candidate;
  PointId candidate_id = 0;
  std::size_t consecutive_hits = 0;
  std::vector<ArgmaxRecord> history;
  /// First event; later steps keep tracking but never emit another.
  std::optional<DetectionEvent> event;

  /// The detection condition holds at the most recent step.
  bool active(const DetectionConfig& config) const {
    return consecutive_hits >= config.n;
  }
};

/// Index of the highest non-excluded value, lowest id on ties.
std::optional<std::size_t> argmax_point(std::span<const double> values,
                                        std::span<const PointId> ids,
                                        std::span<const std::uint8_t> excluded = {});

/// Advances the tracker by one step. Returns the event when the hit count
/// first reaches n. `config.epsilon` must already be resolved (> 0).
std::optional<DetectionEvent> update_detection(
    DetectionState& state, const StLidField& field, std::span<const Coord> coords,
    std::span<const PointId> ids, const DetectionConfig& config,
    std::span<const std::uint8_t> excluded = {});

/// Points reported by the detector at the current step: when the condition
/// holds, every non-excluded point within epsilon of the candidate whose
/// st-LID reaches the threshold; otherwise empty.
std::vector<std::size_t> detected_points(const DetectionState& state,
                                         const StLidField& field,
                                         std::span<const Coord> coords,
                                         const DetectionConfig& config,
                                         std::span<const std::uint8_t> excluded = {});

}  // namespace stlid
