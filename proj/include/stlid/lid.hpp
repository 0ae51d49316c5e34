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
#include <vector>

#include "stlid/data.hpp"
#include "stlid/neighbors.hpp"

namespace stlid {

enum class ZeroDistancePolicy { kDrop, kFloor };
/// Value given to points whose neighbourhood is degenerate.
enum class SentinelPolicy { kMaxFinite, kFixed };

struct LidConfig {
  std::size_t s = 100;
  ZeroDistancePolicy zero_distance = ZeroDistancePolicy::kDrop;
  double epsilon_floor = 1e-9;
  SentinelPolicy sentinel = SentinelPolicy::kMaxFinite;
  /// Fixed sentinel, and the fallback when a step has no finite estimate.
  double sentinel_value = 1.0;
  /// Most recent historical records used by t-LID; 0 keeps the full history.
  std::size_t t_window = 0;

  void validate() const;
};

/// Sorted distances from a query to its neighbours, with neighbour
/// identities (point ids or step indices).
struct NeighborDistances {
  std::vector<double> distances;
  std::vector<std::int64_t> ids;

  /// Throws PreconditionError unless sorted ascending, length >= 2,
  /// non-negative and with a positive last entry.
  void validate() const;
};

double kinematic_distance(const KinematicSample& a, const KinematicSample& b);

enum class LidStatus : std::uint8_t { kOk, kAllEqual, kInsufficient };

struct LidResult {
  double value = 0.0;
  LidStatus status = LidStatus::kOk;
  bool ok() const { return status == LidStatus::kOk; }
};

/// Maximum-likelihood LID, -(1/m * sum ln(d_i / d_max))^-1, over the
/// distances that survive the zero-distance policy (m of them). Order of
/// `distances` is irrelevant. Never throws.
LidResult estimate_lid(std::span<const double> distances, const LidConfig& config);

/// Throwing form over a validated neighbour list.
double mle_lid(const NeighborDistances& d, const LidConfig& config = {});

/// sum_i ln(values[i] * scale) for positive values; blocked products with
/// exponent extraction, falling back to std::log for out-of-range blocks.
double log_sum_scaled(std::span<const double> values, double scale);

/// Per-point LID values at one step. Degenerate points carry the resolved
/// sentinel in `values` and are flagged.
struct LidField {
  std::vector<double> values;
  std::vector<std::uint8_t> degenerate;
  double sentinel = 0.0;

  std::size_t size() const { return values.size(); }
  std::size_t degenerate_count() const;
};

/// Replaces degenerate entries with the sentinel chosen by `config`.
void resolve_sentinels(LidField& field, const LidConfig& config);

/// k nearest kinematic neighbours of every sample (self excluded), flattened
/// row-major as n x k, sorted ascending per row.
struct NeighborTable {
  std::size_t k = 0;
  std::vector<double> distances;
  std::vector<std::uint32_t> indices;

  std::span<const double> row(std::size_t i) const {
    return {distances.data() + i * k, k};
  }
  std::span<const std::uint32_t> row_indices(std::size_t i) const {
    return {indices.data() + i * k, k};
  }
};

NeighborTable kinematic_neighbors(std::span<const KinematicSample> samples,
                                  std::size_t k, int threads = 1);

/// s-LID of every sample from the first `s` columns of `table`.
LidField s_lid_from_table(const NeighborTable& table, const LidConfig& config,
                          int threads = 1);

/// s-LID of every monitored point at step t over kinematic neighbours.
LidField s_lid_all(const MonitoringDataset& dataset, Step t,
                   const LidConfig& config, int threads = 1);

/// t-LID of the last velocity in `history` against the earlier records
/// (limited to config.t_window when set). `scratch` is reused storage.
LidResult t_lid_estimate(std::span<const double> history, const LidConfig& config,
                         std::vector<double>& scratch);

/// Throwing form: PreconditionError for fewer than 3 values, DegenerateError
/// when the estimator has no information.
double t_lid(std::span<const double> velocity_history, const LidConfig& config = {});

}  // namespace stlid
