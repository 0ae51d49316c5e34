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

#include "stlid/detection.hpp"

#include <algorithm>
#include <cmath>

#include "stlid/error.hpp"
#include "stlid/neighbors.hpp"

namespace stlid {

double sigmoid(double x) {
  // Split on sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void DetectionConfig::validate() const {
  if (n < 1) throw ConfigError("detection.n must be >= 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ConfigError("detection.epsilon must be positive (or auto)");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("detection.threshold must be in (0, 1)");
}

double default_epsilon(std::span<const Coord> coords) {
  if (coords.size() < 2) return 1.0;
  std::vector<KdTree<2>::Point> pts;
  pts.reserve(coords.size());
  for (const auto& c : coords) pts.push_back({c.x, c.y});
  const KdTree<2> tree(std::move(pts));
  std::vector<double> nearest(coords.size());
  std::vector<Neighbor> nn;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    tree.knn(tree.point(i), 1, static_cast<std::uint32_t>(i), nn);
    nearest[i] = nn[0].distance;
  }
  const auto mid = nearest.begin() + static_cast<std::ptrdiff_t>(nearest.size() / 2);
  std::nth_element(nearest.begin(), mid, nearest.end());
  const double spacing = *mid;
  return spacing > 0.0 ? 2.0 * spacing : 1.0;
}

StLidField st_lid_field(std::span<const double> s_scores, std::span<const double> t_scores,
                        Step step) {
  if (s_scores.size() != t_scores.size())
    throw PreconditionError("s-LID and t-LID score vectors differ in length");
  StLidField field;
  field.step = step;
  field.values.resize(s_scores.size());
  for (std::size_t i = 0; i < s_scores.size(); ++i) {
    if (!std::isfinite(s_scores[i]) || !std::isfinite(t_scores[i]))
      throw PreconditionError("st-LID inputs must be finite");
    field.values[i] = sigmoid(s_scores[i]) * sigmoid(t_scores[i]);
  }
  return field;
}

std::vector<double> zscore(std::span<const double> values) {
  std::vector<double> z(values.size(), 0.0);
  if (values.empty()) return z;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(values.size()));
  if (!(sd > 0.0)) return z;
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sd;
  return z;
}

void RunningStats::push(double x) {
  count += 1.0;
  const double delta = x - mean;
  mean += delta / count;
  m2 += delta * (x - mean);
}

double RunningStats::zscore(double x) const {
  if (count < 1.0) return 0.0;
  const double sd = std::sqrt(m2 / count);
  return sd > 0.0 ? (x - mean) / sd : 0.0;
}

std::optional<std::size_t> argmax_point(std::span<const double> values,
                                        std::span<const PointId> ids,
                                        std::span<const std::uint8_t> excluded) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!excluded.empty() && excluded[i]) continue;
    if (!best || values[i] > values[*best] ||
        (values[i] == values[*best] && ids[i] < ids[*best]))
      best = i;
  }
  return best;
}

std::optional<DetectionEvent> update_detection(DetectionState& state, const StLidField& field,
                                               std::span<const Coord> coords,
                                               std::span<const PointId> ids,
                                               const DetectionConfig& config,
                                               std::span<const std::uint8_t> excluded) {
  if (coords.size() != field.values.size() || ids.size() != field.values.size())
    throw PreconditionError("coordinates are not aligned with the st-LID field");
  if (!(config.epsilon > 0.0)) throw ConfigError("detection epsilon is not resolved");

  ArgmaxRecord record;
  record.step = field.step;
  const auto best = argmax_point(field.values, ids, excluded);
  const bool above = best && field.values[*best] >= config.threshold;
  if (best) {
    record.point_id = ids[*best];
    record.coord = coords[*best];
    record.value = field.values[*best];
  }

  if (!above) {
    state.candidate.reset();
    state.consecutive_hits = 0;
  } else if (state.candidate && distance(coords[*best], *state.candidate) < config.epsilon) {
    state.consecutive_hits = std::min(state.consecutive_hits + 1, config.n);
    state.candidate = coords[*best];
    state.candidate_id = ids[*best];
  } else {
    state.candidate = coords[*best];
    state.candidate_id = ids[*best];
    state.consecutive_hits = 1;
  }
  record.hits = state.consecutive_hits;
  state.history.push_back(record);

  if (state.consecutive_hits >= config.n && !state.event) {
    state.event = DetectionEvent{field.step, coords[*best], ids[*best], field.values[*best]};
    return state.event;
  }
  return std::nullopt;
}

std::vector<std::size_t> detected_points(const DetectionState& state, const StLidField& field,
                                         std::span<const Coord> coords,
                                         const DetectionConfig& config,
                                         std::span<const std::uint8_t> excluded) {
  std::vector<std::size_t> out;
  if (!state.active(config) || !state.candidate) return out;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (!excluded.empty() && excluded[i]) continue;
    if (field.values[i] >= config.threshold &&
        distance(coords[i], *state.candidate) < config.epsilon)
      out.push_back(i);
  }
  return out;
}

}  // namespace stlid
