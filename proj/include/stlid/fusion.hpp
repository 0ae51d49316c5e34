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

#include <span>
#include <vector>

#include "stlid/data.hpp"
#include "stlid/lid.hpp"

namespace stlid {

/// Gamma(shape alpha, rate beta).
struct GammaParams {
  double alpha = 1.0;
  double beta = 1.0;
  double mean() const { return alpha / beta; }
};

enum class BandwidthPolicy { kMedianDistance, kFixed };
/// Distance fed to the Gaussian kernel between a query and its spatial
/// neighbours.
enum class WeightDistance { kPhysical, kKinematic };

/// Lower bound on the pooled variance: base, or base * (mu^2 + 1) when
/// relative.
struct VarianceFloor {
  double base = 1e-6;
  bool relative = true;
  double at(double mu) const { return relative ? base * (mu * mu + 1.0) : base; }
};

struct FusionConfig {
  bool enabled = true;
  /// Physical neighbourhood pooled into the prior.
  std::size_t k = 8;
  /// Kinematic neighbourhood of the observation term.
  std::size_t k_obs = 8;
  BandwidthPolicy bandwidth = BandwidthPolicy::kMedianDistance;
  double sigma = 1.0;  // used with kFixed
  WeightDistance weight_distance = WeightDistance::kPhysical;
  VarianceFloor variance_floor;

  void validate() const;
};

/// Normalized Gaussian-kernel weights exp(-d^2 / (2 h^2)).
std::vector<double> gaussian_weights(std::span<const double> distances, double bandwidth);
std::vector<double> gaussian_weights(const Coord& query,
                                     std::span<const Coord> neighbors,
                                     double bandwidth);

/// Median of the distances; falls back to the largest one (then to 1) when
/// the median is zero so the kernel stays defined.
double median_bandwidth(std::span<const double> distances);

/// Moment-matched Gamma from the weighted mean and variance of neighbour
/// s-LID values: alpha = mu^2 / var, beta = mu / var.
GammaParams prior_from_neighbors(std::span<const double> neighbor_slids,
                                 std::span<const double> weights,
                                 const VarianceFloor& floor);

/// alpha = k, beta = sum ln(d_k / d_i) over strictly positive distances with
/// d_k the largest.
GammaParams observation_params(std::span<const double> distances);

/// Posterior mean of the Gamma-conjugate update.
double fused_slid(const GammaParams& prior, const GammaParams& obs);

/// Precomputed physical neighbourhoods and static kernel weights for one
/// site geometry.
class SpatialFusion {
 public:
  SpatialFusion(std::span<const Coord> coords, const FusionConfig& config);

  const FusionConfig& config() const { return config_; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {neighbors_.data() + i * config_.k, config_.k};
  }
  std::span<const double> weights(std::size_t i) const {
    return {weights_.data() + i * config_.k, config_.k};
  }

  /// Fused s-LID of every point from the previous step's s-LID values and
  /// this step's kinematic neighbour table (at least k_obs columns).
  LidField fuse(std::span<const KinematicSample> samples,
                const NeighborTable& kinematic, std::span<const double> prev_slids,
                const LidConfig& lid_config, int threads = 1) const;

 private:
  FusionConfig config_;
  std::vector<std::uint32_t> neighbors_;
  std::vector<double> distances_;
  std::vector<double> weights_;
};

/// Spatially fused s-LID at step t. At the first step with a velocity this
/// returns s_lid_all unchanged.
LidField fuse_all(const MonitoringDataset& dataset, std::span<const double> prev_slids,
                  Step t, const FusionConfig& config, const LidConfig& lid_config,
                  int threads = 1);

}  // namespace stlid
