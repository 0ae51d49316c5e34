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
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stlid {

using PointId = std::int64_t;
using Step = std::int64_t;

struct Coord {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Coord& a, const Coord& b);

struct MonitoredPoint {
  PointId id = 0;
  Coord coord;
};

/// Displacement (mm) paired with the per-step velocity (mm per step).
struct KinematicSample {
  double displacement = 0.0;
  double velocity = 0.0;
};

/// Axis-aligned rectangle in coordinate space, closed on all sides.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool contains(const Coord& c) const {
    return c.x >= xmin && c.x <= xmax && c.y >= ymin && c.y <= ymax;
  }
};

/// Grid of monitored points with one displacement series per point.
///
/// Immutable after construction. Steps are absolute indices in
/// [start_step, start_step + num_steps); row i of the matrix belongs to
/// points()[i].
class MonitoringDataset {
 public:
  MonitoringDataset(std::vector<MonitoredPoint> points,
                    std::vector<double> displacement, std::size_t num_steps,
                    double step_interval_minutes, Step start_step = 0);

  std::size_t num_points() const { return points_.size(); }
  std::size_t num_steps() const { return num_steps_; }
  Step start_step() const { return start_step_; }
  Step end_step() const { return start_step_ + static_cast<Step>(num_steps_); }
  double step_interval() const { return step_interval_; }

  const std::vector<MonitoredPoint>& points() const { return points_; }
  std::vector<Coord> coords() const;
  std::vector<PointId> ids() const;

  bool has_step(Step t) const { return t >= start_step_ && t < end_step(); }
  std::size_t index_of(PointId id) const;

  std::span<const double> series(std::size_t index) const {
    return {displacement_.data() + index * num_steps_, num_steps_};
  }
  double displacement(std::size_t index, Step t) const;

  /// Displacement of every point at step `t`, in point order.
  std::vector<double> column(Step t) const;

  const std::vector<double>& matrix() const { return displacement_; }

 private:
  std::vector<MonitoredPoint> points_;
  std::vector<double> displacement_;
  std::size_t num_steps_;
  double step_interval_;
  Step start_step_;
  std::unordered_map<PointId, std::size_t> index_;
};

double velocity_at(const MonitoringDataset& dataset, PointId point, Step t);
KinematicSample sample_at(const MonitoringDataset& dataset, PointId point,
                          Step t);

/// All points' kinematic samples at step t (t > start_step).
std::vector<KinematicSample> samples_at(const MonitoringDataset& dataset,
                                        Step t);

struct FailureRegion {
  std::string label;
  Rect rect;
  Step time_of_failure = 0;
};

struct GroundTruth {
  std::vector<FailureRegion> regions;

  /// Throws DataError if a region is degenerate or its time of failure lies
  /// outside the dataset.
  void validate(const MonitoringDataset& dataset) const;
  bool inside_any(const Coord& c) const;
};

/// Parameters of the synthetic three-stage creep generator.
///
/// Stable points: drift * (t - start) + N(0, noise_sd). Points inside
/// `region` move along an initial transient, a steady linear trend at
/// `creep_rate` and, from `onset_step`, an accelerating phase whose per-step
/// velocity follows creep_rate * (tau0 / (tof + 1 - t))^exponent with
/// tau0 = tof + 1 - onset_step. Displacement stops at the time of failure.
/// The creep of each in-region point is scaled by a bowl-shaped amplitude
/// edge + (1 - edge) * exp(-r^2 / (2 w^2)), r being the distance to the
/// rectangle centre in half-widths, times a per-point lognormal factor
/// exp(jitter * N(0, 1)).
///
/// An optional steady zone moves at a constant rate with the same bowl
/// profile and never fails; it is not part of the ground truth.
///
/// With zero drift and a non-positive steady-zone rate, every in-region
/// point ends above every outside point when noise_sd stays below a tenth
/// of edge_amplitude * exp(-4 * amplitude_jitter) * creep_displacement(tof).
struct CreepScenarioSpec {
  std::size_t nx = 50;
  std::size_t ny = 40;
  double spacing = 10.0;
  std::size_t num_steps = 2000;
  double step_interval = 2.5;
  Step start_step = 0;
  double noise_sd = 0.1;
  double drift = 0.0;
  bool has_region = true;
  Rect region{200.0, 150.0, 260.0, 210.0};
  std::string label = "C1";
  Step time_of_failure = 1600;
  double creep_rate = 0.1;
  Step onset_step = 1000;
  double exponent = 1.0;
  double transient_amplitude = 2.0;
  double transient_timescale = 50.0;
  double bowl_width = 0.3;
  double edge_amplitude = 0.05;
  double amplitude_jitter = 0.1;
  bool has_steady_zone = true;
  Rect steady_zone{360.0, 260.0, 420.0, 320.0};
  double steady_zone_rate = -0.05;
  std::uint64_t seed = 1;

  void validate() const;
};

std::pair<MonitoringDataset, GroundTruth> generate_creep_scenario(
    const CreepScenarioSpec& spec);

/// Noise-free creep displacement of a unit-amplitude in-region point.
double creep_displacement(const CreepScenarioSpec& spec, Step t);
/// Noise-free per-step creep velocity of a unit-amplitude in-region point.
double creep_velocity(const CreepScenarioSpec& spec, Step t);

// File formats (CSV, see README).
MonitoringDataset load_dataset(const std::string& points_file,
                               const std::string& series_file,
                               double step_interval_minutes = 1.0);
void save_dataset(const MonitoringDataset& dataset,
                  const std::string& points_file,
                  const std::string& series_file);
GroundTruth load_ground_truth(const std::string& path);
void save_ground_truth(const GroundTruth& truth, const std::string& path);

}  // namespace stlid
