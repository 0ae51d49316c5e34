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

#include "stlid/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "stlid/error.hpp"
#include "stlid/parallel.hpp"

namespace stlid {

void FusionConfig::validate() const {
  if (k < 1) throw ConfigError("fusion.k must be >= 1");
  if (k_obs < 1) throw ConfigError("fusion.k_obs must be >= 1");
  if (bandwidth == BandwidthPolicy::kFixed && !(sigma > 0.0 && std::isfinite(sigma)))
    throw ConfigError("fusion.sigma must be positive");
  if (!(variance_floor.base > 0.0) || !std::isfinite(variance_floor.base))
    throw ConfigError("fusion.variance_floor must be positive");
}

std::vector<double> gaussian_weights(std::span<const double> distances, double bandwidth) {
  if (distances.empty()) throw PreconditionError("gaussian_weights needs at least one neighbour");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw PreconditionError("kernel bandwidth must be positive");
  std::vector<double> w(distances.size());
  // Shift by the smallest distance so the largest weight is exp(0).
  const double dmin = *std::min_element(distances.begin(), distances.end());
  const double denom = 2.0 * bandwidth * bandwidth;
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-(distances[i] * distances[i] - dmin * dmin) / denom);
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

std::vector<double> gaussian_weights(const Coord& query, std::span<const Coord> neighbors,
                                     double bandwidth) {
  std::vector<double> d;
  d.reserve(neighbors.size());
  for (const auto& c : neighbors) d.push_back(distance(query, c));
  return gaussian_weights(d, bandwidth);
}

double median_bandwidth(std::span<const double> distances) {
  if (distances.empty()) return 1.0;
  std::vector<double> d(distances.begin(), distances.end());
  std::sort(d.begin(), d.end());
  const std::size_t m = d.size();
  const double med = m % 2 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
  if (med > 0.0) return med;
  return d.back() > 0.0 ? d.back() : 1.0;
}

GammaParams prior_from_neighbors(std::span<const double> neighbor_slids,
                                 std::span<const double> weights,
                                 const VarianceFloor& floor) {
  if (neighbor_slids.empty() || neighbor_slids.size() != weights.size())
    throw PreconditionError("prior needs one weight per neighbour s-LID");
  double mu = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(neighbor_slids[i] > 0.0) || !std::isfinite(neighbor_slids[i]))
      throw DataError("neighbour s-LID must be positive and finite");
    mu += weights[i] * neighbor_slids[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double d = neighbor_slids[i] - mu;
    var += weights[i] * d * d;
  }
  var = std::max(var, floor.at(mu));
  return {mu * mu / var, mu / var};
}

GammaParams observation_params(std::span<const double> distances) {
  if (distances.empty()) throw PreconditionError("observation needs at least one distance");
  for (const double d : distances)
    if (!(d > 0.0) || !std::isfinite(d))
      throw PreconditionError("observation distances must be positive and finite");
  const double dmax = *std::max_element(distances.begin(), distances.end());
  const double beta = -log_sum_scaled(distances, 1.0 / dmax);
  return {static_cast<double>(distances.size()), std::max(0.0, beta)};
}

double fused_slid(const GammaParams& prior, const GammaParams& obs) {
  if (!(prior.alpha > 0.0 && prior.beta > 0.0) || !std::isfinite(prior.alpha) ||
      !std::isfinite(prior.beta))
    throw PreconditionError("prior Gamma parameters must be positive");
  if (!(obs.alpha > 0.0 && obs.beta >= 0.0) || !std::isfinite(obs.alpha) ||
      !std::isfinite(obs.beta))
    throw PreconditionError("observation Gamma parameters out of range");
  return (prior.alpha + obs.alpha) / (prior.beta + obs.beta);
}

SpatialFusion::SpatialFusion(std::span<const Coord> coords, const FusionConfig& config)
    : config_(config) {
  config_.validate();
  const std::size_t n = coords.size();
  const std::size_t k = config_.k;
  if (n <= k)
    throw ConfigError("fusion.k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(n > 0 ? n - 1 : 0) + " available neighbours");
  std::vector<KdTree<2>::Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {coords[i].x, coords[i].y};
  const KdTree<2> tree(std::move(pts));
  neighbors_.resize(n * k);
  distances_.resize(n * k);
  weights_.resize(n * k);
  std::vector<Neighbor> nn;
  for (std::size_t i = 0; i < n; ++i) {
    tree.knn(tree.point(i), k, static_cast<std::uint32_t>(i), nn);
    for (std::size_t j = 0; j < k; ++j) {
      neighbors_[i * k + j] = nn[j].index;
      distances_[i * k + j] = nn[j].distance;
    }
    const std::span<const double> d(distances_.data() + i * k, k);
    const double h = config_.bandwidth == BandwidthPolicy::kFixed ? config_.sigma
                                                                   : median_bandwidth(d);
    const auto w = gaussian_weights(d, h);
    std::copy(w.begin(), w.end(), weights_.begin() + static_cast<std::ptrdiff_t>(i * k));
  }
}

LidField SpatialFusion::fuse(std::span<const KinematicSample> samples,
                             const NeighborTable& kinematic,
                             std::span<const double> prev_slids,
                             const LidConfig& lid_config, int threads) const {
  const std::size_t n = samples.size();
  const std::size_t k = config_.k;
  if (prev_slids.size() != n || neighbors_.size() != n * k)
    throw PreconditionError("fusion inputs do not match the site geometry");
  if (kinematic.k < config_.k_obs)
    throw ConfigError("kinematic neighbour table holds fewer than fusion.k_obs columns");

  LidField field;
  field.values.assign(n, 0.0);
  field.degenerate.assign(n, 0);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> slids(k), wbuf(k), dist(k), obs;
    for (std::size_t i = begin; i < end; ++i) {
      const auto nb = neighbors(i);
      for (std::size_t j = 0; j < k; ++j) slids[j] = prev_slids[nb[j]];
      std::span<const double> w = weights(i);
      if (config_.weight_distance == WeightDistance::kKinematic) {
        for (std::size_t j = 0; j < k; ++j)
          dist[j] = kinematic_distance(samples[i], samples[nb[j]]);
        const double h = config_.bandwidth == BandwidthPolicy::kFixed
                             ? config_.sigma
                             : median_bandwidth(dist);
        wbuf = gaussian_weights(dist, h);
        w = wbuf;
      }
      const auto prior = prior_from_neighbors(slids, w, config_.variance_floor);

      obs.clear();
      for (const double d : kinematic.row(i).first(config_.k_obs)) {
        if (d > 0.0) obs.push_back(d);
        else if (lid_config.zero_distance == ZeroDistancePolicy::kFloor)
          obs.push_back(lid_config.epsilon_floor);
      }
      if (obs.empty()) {
        field.degenerate[i] = 1;
        continue;
      }
      field.values[i] = fused_slid(prior, observation_params(obs));
    }
  });
  resolve_sentinels(field, lid_config);
  return field;
}

LidField fuse_all(const MonitoringDataset& dataset, std::span<const double> prev_slids,
                  Step t, const FusionConfig& config, const LidConfig& lid_config,
                  int threads) {
  lid_config.validate();
  config.validate();
  if (t == dataset.start_step() + 1) return s_lid_all(dataset, t, lid_config, threads);
  if (t < dataset.start_step() + 2 || !dataset.has_step(t))
    throw PreconditionError("fusion needs the previous step's s-LID (t >= start + 2)");
  const auto coords = dataset.coords();
  const SpatialFusion fusion(coords, config);
  const auto samples = samples_at(dataset, t);
  const auto table = kinematic_neighbors(samples, config.k_obs, threads);
  return fusion.fuse(samples, table, prev_slids, lid_config, threads);
}

}  // namespace stlid
