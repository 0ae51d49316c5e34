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

#include "stlid/lid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stlid/error.hpp"
#include "stlid/parallel.hpp"

namespace stlid {

void LidConfig::validate() const {
  if (s < 2) throw ConfigError("lid.s must be >= 2");
  if (!(epsilon_floor > 0.0) || !std::isfinite(epsilon_floor))
    throw ConfigError("lid.epsilon_floor must be positive");
  if (!(sentinel_value > 0.0) || !std::isfinite(sentinel_value))
    throw ConfigError("lid.sentinel_value must be positive");
  if (t_window == 1) throw ConfigError("lid.t_window must be 0 or >= 2");
}

void NeighborDistances::validate() const {
  if (distances.size() < 2)
    throw PreconditionError("neighbour list needs at least 2 distances");
  if (!ids.empty() && ids.size() != distances.size())
    throw PreconditionError("neighbour ids and distances differ in length");
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (!(distances[i] >= 0.0) || !std::isfinite(distances[i]))
      throw PreconditionError("neighbour distances must be finite and >= 0");
    if (i > 0 && distances[i] < distances[i - 1])
      throw PreconditionError("neighbour distances must be sorted ascending");
  }
  if (!(distances.back() > 0.0))
    throw PreconditionError("largest neighbour distance must be positive");
}

double kinematic_distance(const KinematicSample& a, const KinematicSample& b) {
  return std::hypot(a.displacement - b.displacement, a.velocity - b.velocity);
}

double log_sum_scaled(std::span<const double> values, double scale) {
  constexpr std::size_t kBlock = 8;
  constexpr double kLo = 0x1p-900;
  constexpr double kHi = 0x1p900;
  double mantissa = 1.0;
  long exponent = 0;
  double direct = 0.0;
  const std::size_t n = values.size();
  std::size_t i = 0;
  auto absorb = [&](double product, std::size_t begin, std::size_t end) {
    if (product > kLo && product < kHi) {
      int e = 0;
      mantissa = std::frexp(mantissa * product, &e);
      exponent += e;
    } else {
      for (std::size_t j = begin; j < end; ++j) direct += std::log(values[j] * scale);
    }
  };
  for (; i + kBlock <= n; i += kBlock) {
    const double* v = values.data() + i;
    const double a = (v[0] * scale) * (v[1] * scale) * (v[2] * scale) * (v[3] * scale);
    const double b = (v[4] * scale) * (v[5] * scale) * (v[6] * scale) * (v[7] * scale);
    absorb(a * b, i, i + kBlock);
  }
  if (i < n) {
    double p = 1.0;
    for (std::size_t j = i; j < n; ++j) p *= values[j] * scale;
    absorb(p, i, n);
  }
  return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2 + direct;
}

namespace {

LidResult estimate_filtered(std::span<const double> d) {
  const std::size_t m = d.size();
  if (m < 2) return {0.0, LidStatus::kInsufficient};
  const double dmax = *std::max_element(d.begin(), d.end());
  if (std::all_of(d.begin(), d.end(), [&](double x) { return x == dmax; }))
    return {0.0, LidStatus::kAllEqual};
  const double sum = log_sum_scaled(d, 1.0 / dmax);
  if (!(sum < 0.0)) return {0.0, LidStatus::kAllEqual};
  return {-static_cast<double>(m) / sum, LidStatus::kOk};
}

}  // namespace

LidResult estimate_lid(std::span<const double> distances, const LidConfig& config) {
  const bool has_zero = std::any_of(distances.begin(), distances.end(),
                                    [](double x) { return !(x > 0.0); });
  if (!has_zero) return estimate_filtered(distances);
  thread_local std::vector<double> buffer;
  buffer.clear();
  for (const double x : distances) {
    if (x > 0.0) buffer.push_back(x);
    else if (config.zero_distance == ZeroDistancePolicy::kFloor)
      buffer.push_back(config.epsilon_floor);
  }
  return estimate_filtered(buffer);
}

double mle_lid(const NeighborDistances& d, const LidConfig& config) {
  d.validate();
  const auto r = estimate_lid(d.distances, config);
  switch (r.status) {
    case LidStatus::kOk: return r.value;
    case LidStatus::kAllEqual:
      throw DegenerateError(DegenerateError::Reason::kAllEqual,
                            "degenerate neighbourhood: all retained distances are equal");
    case LidStatus::kInsufficient:
      break;
  }
  throw DegenerateError(DegenerateError::Reason::kInsufficient,
                        "fewer than 2 positive neighbour distances");
}

std::size_t LidField::degenerate_count() const {
  return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
}

void resolve_sentinels(LidField& field, const LidConfig& config) {
  double sentinel = config.sentinel_value;
  if (config.sentinel == SentinelPolicy::kMaxFinite) {
    bool any = false;
    double best = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
      if (field.degenerate[i] || !std::isfinite(field.values[i])) continue;
      best = any ? std::max(best, field.values[i]) : field.values[i];
      any = true;
    }
    if (any) sentinel = best;
  }
  field.sentinel = sentinel;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (field.degenerate[i]) field.values[i] = sentinel;
}

NeighborTable kinematic_neighbors(std::span<const KinematicSample> samples,
                                  std::size_t k, int threads) {
  const std::size_t n = samples.size();
  if (n <= k)
    throw ConfigError("need more than " + std::to_string(k) +
                      " monitored points for a " + std::to_string(k) +
                      "-neighbourhood, have " + std::to_string(n));
  std::vector<KdTree<2>::Point> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = {samples[i].displacement, samples[i].velocity};
  const KdTree<2> tree(std::move(pts));

  NeighborTable table;
  table.k = k;
  table.distances.resize(n * k);
  table.indices.resize(n * k);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Neighbor> nn;
    for (std::size_t i = begin; i < end; ++i) {
      tree.knn(tree.point(i), k, static_cast<std::uint32_t>(i), nn);
      for (std::size_t j = 0; j < k; ++j) {
        table.distances[i * k + j] = nn[j].distance;
        table.indices[i * k + j] = nn[j].index;
      }
    }
  });
  return table;
}

LidField s_lid_from_table(const NeighborTable& table, const LidConfig& config,
                          int threads) {
  if (config.s > table.k)
    throw ConfigError("neighbour table holds fewer than lid.s columns");
  const std::size_t n = table.distances.size() / std::max<std::size_t>(1, table.k);
  LidField field;
  field.values.assign(n, 0.0);
  field.degenerate.assign(n, 0);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = estimate_lid(table.row(i).first(config.s), config);
      field.values[i] = r.value;
      field.degenerate[i] = r.ok() ? 0 : 1;
    }
  });
  resolve_sentinels(field, config);
  return field;
}

LidField s_lid_all(const MonitoringDataset& dataset, Step t,
                   const LidConfig& config, int threads) {
  config.validate();
  const auto samples = samples_at(dataset, t);
  const auto table = kinematic_neighbors(samples, config.s, threads);
  return s_lid_from_table(table, config, threads);
}

LidResult t_lid_estimate(std::span<const double> history, const LidConfig& config,
                         std::vector<double>& scratch) {
  if (history.size() < 3) return {0.0, LidStatus::kInsufficient};
  const double query = history.back();
  auto records = history.first(history.size() - 1);
  if (config.t_window > 0 && records.size() > config.t_window)
    records = records.last(config.t_window);
  scratch.clear();
  scratch.reserve(records.size());
  const bool floor = config.zero_distance == ZeroDistancePolicy::kFloor;
  for (const double v : records) {
    const double d = std::fabs(query - v);
    if (d > 0.0) scratch.push_back(d);
    else if (floor) scratch.push_back(config.epsilon_floor);
  }
  return estimate_filtered(scratch);
}

double t_lid(std::span<const double> velocity_history, const LidConfig& config) {
  config.validate();
  if (velocity_history.size() < 3)
    throw PreconditionError("t-LID needs the query plus at least 2 historical velocities");
  std::vector<double> scratch;
  const auto r = t_lid_estimate(velocity_history, config, scratch);
  if (r.status == LidStatus::kAllEqual)
    throw DegenerateError(DegenerateError::Reason::kAllEqual,
                          "degenerate temporal neighbourhood: all distances equal");
  if (r.status == LidStatus::kInsufficient)
    throw DegenerateError(DegenerateError::Reason::kInsufficient,
                          "fewer than 2 historical velocities differ from the query");
  return r.value;
}

}  // namespace stlid
