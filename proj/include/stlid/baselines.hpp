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
#include <vector>

#include "stlid/data.hpp"
#include "stlid/lid.hpp"

namespace stlid {

/// One EDQ pick: the representative series for a quantile level.
struct EdqPick {
  double level = 0.0;
  std::size_t index = 0;
};

/// Unified per-step output of a comparison method.
struct BaselineResult {
  std::string method;
  Step step = 0;
  /// Failure likelihood per point in [0, 1].
  std::vector<double> likelihood;
  std::vector<std::uint8_t> high_risk;
  /// Indices used for lead-time tracking, best first (at most 10).
  std::vector<std::size_t> top;
  /// EDQ only: one pick per distinct point, by ascending level.
  std::vector<EdqPick> picks;
};

inline constexpr std::size_t kTopCount = 10;

// K-means with K = 2 on scalar values.

struct KMeansTrace {
  std::vector<double> objective;  // within-cluster SSE after each iteration
  std::size_t iterations = 0;
};

/// Seeds at the minimum and maximum, Lloyd iterations until the centroids
/// move less than 1e-9 or 100 iterations. The cluster with the larger
/// centroid is high risk. Top set: high-risk points nearest its centroid.
BaselineResult kmeans2(std::span<const double> values, std::span<const PointId> ids,
                       KMeansTrace* trace = nullptr);

// DBSCAN over kinematic samples.

struct DbscanConfig {
  /// Neighbourhood radius; 0 picks the 0.95 quantile of the distance to the
  /// min_pts-th nearest other sample.
  double eps = 0.0;
  /// Core threshold, counting the sample itself.
  std::size_t min_pts = 5;

  void validate() const;
};

inline constexpr int kNoise = -1;

/// Cluster labels in index order of discovery; kNoise for noise.
std::vector<int> dbscan_labels(std::span<const KinematicSample> samples, double eps,
                               std::size_t min_pts);

double dbscan_auto_eps(std::span<const KinematicSample> samples, std::size_t min_pts);

/// High risk = noise plus the cluster with the highest mean displacement.
/// Top set: high-risk points nearest that cluster's kinematic centroid.
BaselineResult dbscan(std::span<const KinematicSample> samples,
                      std::span<const PointId> ids, const DbscanConfig& config);

// Local outlier factor over kinematic samples.

struct LofConfig {
  std::size_t k = 20;
  /// Scores above the cutoff are high risk.
  double cutoff = 1.5;

  void validate() const;
};

/// LOF scores with the k-distance neighbourhood including all ties and
/// lrd = 1 / (mean reachability + 1e-10).
std::vector<double> lof_scores(std::span<const KinematicSample> samples, std::size_t k);

/// Likelihood = rank / n of the score. Top set: the 10 highest scores.
BaselineResult lof(std::span<const KinematicSample> samples, std::span<const PointId> ids,
                   const LofConfig& config);

// Empirical dynamic quantiles.

struct EdqConfig {
  std::vector<double> levels = {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};

  void validate() const;
};

/// Per-candidate asymmetric deviation totals over steps [from, to]:
/// above[c] = sum of (y - x_c)^+ and below[c] = sum of (x_c - y)^+ over every
/// series y and step, so the objective at level q is q*above + (1-q)*below.
/// Relative gap below which two EDQ objectives count as tied.
inline constexpr double kEdqTieTolerance = 1e-9;

struct EdqTotals {
  std::vector<double> above;
  std::vector<double> below;
};

EdqTotals edq_totals(const MonitoringDataset& dataset, Step from, Step to, int threads = 1);

/// Exhaustive EDQ selection over every monitored point as candidate, using
/// the series up to and including `until`. Ties go to the lowest id.
BaselineResult edq_select(const MonitoringDataset& dataset, Step until,
                          const EdqConfig& config, int threads = 1);

// Raw s-LID scores rescaled to [0, 1].

/// Min-max rescaling; throws DegenerateError when all values are equal.
std::vector<double> minmax_scale(std::span<const double> values);

/// High risk = scaled score >= 0.5. Top set: the 10 highest scaled scores
/// that reach 0.5.
BaselineResult raw_slid_baseline(std::span<const double> s_lid, std::span<const PointId> ids);

/// Indices ordered by descending score, lowest id first on ties.
std::vector<std::size_t> rank_descending(std::span<const double> scores,
                                         std::span<const PointId> ids);

}  // namespace stlid
