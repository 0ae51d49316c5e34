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


#include "stlid/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stlid/error.hpp"
#include "stlid/neighbors.hpp"
#include "stlid/parallel.hpp"

namespace stlid {

namespace {

using Point2 = std::array<double, 2>;

std::vector<Point2> to_points(std::span<const KinematicSample> samples) {
  std::vector<Point2> pts(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    pts[i] = {samples[i].displacement, samples[i].velocity};
  return pts;
}

void check_ids(std::size_t n, std::span<const PointId> ids) {
  if (ids.size() != n)
    throw PreconditionError("ids and values differ in length");
}

// The first `limit` members of `candidates` ordered by (distance, id).
std::vector<std::size_t> nearest_members(const std::vector<std::size_t>& candidates,
                                         const std::vector<double>& distance,
                                         std::span<const PointId> ids, std::size_t limit) {
  std::vector<std::size_t> order = candidates;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distance[a] != distance[b]) return distance[a] < distance[b];
    return ids[a] < ids[b];
  });
  if (order.size() > limit) order.resize(limit);
  return order;
}

}  // namespace

std::vector<std::size_t> rank_descending(std::span<const double> scores,
                                         std::span<const PointId> ids) {
  check_ids(scores.size(), ids);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  return order;
}

// ---------------------------------------------------------------- k-means

BaselineResult kmeans2(std::span<const double> values, std::span<const PointId> ids,
                       KMeansTrace* trace) {
  check_ids(values.size(), ids);
  if (values.empty()) throw PreconditionError("kmeans2 needs at least two values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double c0 = *lo_it, c1 = *hi_it;
  if (!(c1 > c0))
    throw DegenerateError(DegenerateError::Reason::kAllEqual,
                          "kmeans2: all values are identical");

  const std::size_t n = values.size();
  std::vector<std::uint8_t> label(n, 0);
  if (trace) *trace = {};
  for (std::size_t iter = 0; iter < 100; ++iter) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // Ties go to the upper cluster.
      label[i] = std::abs(values[i] - c1) <= std::abs(values[i] - c0) ? 1 : 0;
      if (label[i]) s1 += values[i], ++n1;
      else s0 += values[i], ++n0;
    }
    const double nc0 = n0 ? s0 / static_cast<double>(n0) : c0;
    const double nc1 = n1 ? s1 / static_cast<double>(n1) : c1;
    const double shift = std::max(std::abs(nc0 - c0), std::abs(nc1 - c1));
    c0 = nc0;
    c1 = nc1;
    if (trace) {
      double sse = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - (label[i] ? c1 : c0);
        sse += d * d;
      }
      trace->objective.push_back(sse);
      trace->iterations = iter + 1;
    }
    if (shift < 1e-9) break;
  }

  const std::uint8_t high = c1 >= c0 ? 1 : 0;
  const double centre = high ? c1 : c0;
  BaselineResult r;
  r.method = "kmeans";
  r.likelihood.assign(n, 0.0);
  r.high_risk.assign(n, 0);
  std::vector<std::size_t> members;
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = std::abs(values[i] - centre);
    if (label[i] == high) {
      r.high_risk[i] = 1;
      r.likelihood[i] = 1.0;
      members.push_back(i);
    }
  }
  r.top = nearest_members(members, dist, ids, kTopCount);
  return r;
}

// ----------------------------------------------------------------- DBSCAN

void DbscanConfig::validate() const {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw ConfigError("baseline.dbscan_eps must be >= 0 (0 = automatic)");
  if (min_pts < 1) throw ConfigError("baseline.dbscan_min_pts must be >= 1");
}

double dbscan_auto_eps(std::span<const KinematicSample> samples, std::size_t min_pts) {
  if (samples.size() < 2) return 1.0;
  const KdTree<2> tree(to_points(samples));
  const std::size_t k = std::min(min_pts, samples.size() - 1);
  std::vector<double> kd(samples.size());
  std::vector<Neighbor> nb;
  for (std::uint32_t i = 0; i < samples.size(); ++i) {
    tree.knn(tree.point(i), k, i, nb);
    kd[i] = nb.back().distance;
  }
  const auto q = static_cast<std::size_t>(0.95 * static_cast<double>(kd.size() - 1));
  std::nth_element(kd.begin(), kd.begin() + static_cast<std::ptrdiff_t>(q), kd.end());
  const double eps = kd[q];
  return eps > 0.0 ? eps : 1.0;
}

std::vector<int> dbscan_labels(std::span<const KinematicSample> samples, double eps,
                               std::size_t min_pts) {
  if (!(eps > 0.0)) throw PreconditionError("dbscan: eps must be positive");
  if (min_pts < 1) throw PreconditionError("dbscan: min_pts must be >= 1");
  const std::size_t n = samples.size();
  constexpr int kUnvisited = -2;
  std::vector<int> label(n, kUnvisited);
  if (n == 0) return {};
  const KdTree<2> tree(to_points(samples));

  std::vector<Neighbor> nb;
  std::vector<std::uint32_t> frontier;
  int cluster = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    tree.within(tree.point(i), eps, KdTree<2>::npos, nb);
    if (nb.size() < min_pts) {
      label[i] = kNoise;
      continue;
    }
    label[i] = cluster;
    frontier.clear();
    for (const auto& m : nb)
      if (m.index != i) frontier.push_back(m.index);
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const auto j = frontier[f];
      if (label[j] == kNoise) label[j] = cluster;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = cluster;
      tree.within(tree.point(j), eps, KdTree<2>::npos, nb);
      if (nb.size() >= min_pts)
        for (const auto& m : nb)
          if (label[m.index] == kUnvisited || label[m.index] == kNoise)
            frontier.push_back(m.index);
    }
    ++cluster;
  }
  return label;
}

BaselineResult dbscan(std::span<const KinematicSample> samples,
                      std::span<const PointId> ids, const DbscanConfig& config) {
  config.validate();
  check_ids(samples.size(), ids);
  const double eps =
      config.eps > 0.0 ? config.eps : dbscan_auto_eps(samples, config.min_pts);
  const auto label = dbscan_labels(samples, eps, config.min_pts);
  const std::size_t n = samples.size();

  int clusters = 0;
  for (int l : label) clusters = std::max(clusters, l + 1);
  std::vector<double> sum(static_cast<std::size_t>(clusters), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(clusters), 0);
  for (std::size_t i = 0; i < n; ++i)
    if (label[i] >= 0) {
      sum[static_cast<std::size_t>(label[i])] += samples[i].displacement;
      ++count[static_cast<std::size_t>(label[i])];
    }
  int hot = -1;
  double best = 0.0;
  for (int c = 0; c < clusters; ++c) {
    const double mean = sum[static_cast<std::size_t>(c)] /
                        static_cast<double>(count[static_cast<std::size_t>(c)]);
    if (hot < 0 || mean > best) hot = c, best = mean;
  }

  BaselineResult r;
  r.method = "dbscan";
  r.likelihood.assign(n, 0.0);
  r.high_risk.assign(n, 0);
  std::vector<std::size_t> members;
  double cx = 0.0, cv = 0.0;
  std::size_t cn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kNoise || label[i] == hot) {
      r.high_risk[i] = 1;
      r.likelihood[i] = 1.0;
      members.push_back(i);
    }
    // Centroid of the outlying cluster; all high-risk points when every
    // sample is noise.
    if ((hot >= 0 && label[i] == hot) || (hot < 0 && label[i] == kNoise)) {
      cx += samples[i].displacement;
      cv += samples[i].velocity;
      ++cn;
    }
  }
  std::vector<double> dist(n, 0.0);
  if (cn > 0) {
    cx /= static_cast<double>(cn);
    cv /= static_cast<double>(cn);
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = std::hypot(samples[i].displacement - cx, samples[i].velocity - cv);
  }
  r.top = nearest_members(members, dist, ids, kTopCount);
  return r;
}

// -------------------------------------------------------------------- LOF

void LofConfig::validate() const {
  if (k < 1) throw ConfigError("baseline.lof_k must be >= 1");
  if (!(cutoff > 0.0)) throw ConfigError("baseline.lof_cutoff must be positive");
}

std::vector<double> lof_scores(std::span<const KinematicSample> samples, std::size_t k) {
  const std::size_t n = samples.size();
  if (k < 1) throw ConfigError("lof: k must be >= 1");
  if (n <= k) throw ConfigError("lof: k must be smaller than the number of points");
  const KdTree<2> tree(to_points(samples));

  std::vector<double> kdist(n);
  std::vector<std::vector<Neighbor>> hood(n);
  std::vector<Neighbor> nb;
  for (std::uint32_t i = 0; i < n; ++i) {
    tree.knn(tree.point(i), k, i, nb);
    kdist[i] = nb.back().distance;
    tree.within(tree.point(i), kdist[i], i, hood[i]);
  }
  std::vector<double> lrd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double reach = 0.0;
    for (const auto& o : hood[i]) reach += std::max(kdist[o.index], o.distance);
    lrd[i] = 1.0 / (reach / static_cast<double>(hood[i].size()) + 1e-10);
  }
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& o : hood[i]) s += lrd[o.index];
    score[i] = s / static_cast<double>(hood[i].size()) / lrd[i];
  }
  return score;
}

BaselineResult lof(std::span<const KinematicSample> samples, std::span<const PointId> ids,
                   const LofConfig& config) {
  config.validate();
  check_ids(samples.size(), ids);
  const auto score = lof_scores(samples, config.k);
  const std::size_t n = samples.size();
  const auto order = rank_descending(score, ids);

  BaselineResult r;
  r.method = "lof";
  r.likelihood.assign(n, 0.0);
  r.high_risk.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const auto i = order[pos];
    r.likelihood[i] = static_cast<double>(n - pos) / static_cast<double>(n);
    r.high_risk[i] = score[i] > config.cutoff ? 1 : 0;
  }
  r.top.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(
                                                  std::min(kTopCount, n)));
  return r;
}

// -------------------------------------------------------------------- EDQ

void EdqConfig::validate() const {
  if (levels.empty()) throw ConfigError("baseline.edq_levels must not be empty");
  for (double q : levels)
    if (!(q >= 0.0 && q <= 1.0))
      throw ConfigError("baseline.edq_levels must lie in [0, 1]");
}

EdqTotals edq_totals(const MonitoringDataset& dataset, Step from, Step to, int threads) {
  if (!dataset.has_step(from) || !dataset.has_step(to) || to < from)
    throw PreconditionError("edq: step range outside the dataset");
  const std::size_t n = dataset.num_points();
  EdqTotals totals;
  totals.above.assign(n, 0.0);
  totals.below.assign(n, 0.0);
  std::vector<double> sorted(n), prefix(n + 1);
  threads = resolve_threads(threads);
  for (Step t = from; t <= to; ++t) {
    const auto col = dataset.column(t);
    std::copy(col.begin(), col.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    prefix[0] = 0.0;
    for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + sorted[j];
    const double total = prefix[n];
    parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        const double x = col[c];
        const auto p = static_cast<std::size_t>(
            std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
        const double lower = prefix[p];
        totals.below[c] += static_cast<double>(p) * x - lower;
        totals.above[c] += (total - lower) - static_cast<double>(n - p) * x;
      }
    });
  }
  return totals;
}

BaselineResult edq_select(const MonitoringDataset& dataset, Step until,
                          const EdqConfig& config, int threads) {
  config.validate();
  const std::size_t n = dataset.num_points();
  if (n < 2) throw PreconditionError("edq needs at least two monitored points");
  const auto totals = edq_totals(dataset, dataset.start_step(), until, threads);
  const auto ids = dataset.ids();

  std::vector<double> levels = config.levels;
  std::sort(levels.begin(), levels.end());
  BaselineResult r;
  r.method = "edq";
  r.step = until;
  r.likelihood.assign(n, 0.0);
  r.high_risk.assign(n, 0);
  std::vector<std::uint8_t> picked(n, 0);
  for (double q : levels) {
    std::size_t best = 0;
    double best_obj = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double obj = q * totals.above[c] + (1.0 - q) * totals.below[c];
      // The objective is flat between adjacent order statistics when q * n
      // is an integer; rounding must not decide those ties.
      const double tol = kEdqTieTolerance * std::max(1.0, std::abs(best_obj));
      if (c == 0 || obj < best_obj - tol ||
          (std::abs(obj - best_obj) <= tol && ids[c] < ids[best]))
        best = c, best_obj = obj;
    }
    if (picked[best]) continue;
    picked[best] = 1;
    r.picks.push_back({q, best});
    r.likelihood[best] = q;
    r.high_risk[best] = q >= 0.5 ? 1 : 0;
    if (r.top.size() < kTopCount) r.top.push_back(best);
  }
  return r;
}

// ------------------------------------------------------------ raw s-LID

std::vector<double> minmax_scale(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("minmax_scale: empty input");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*hi > *lo))
    throw DegenerateError(DegenerateError::Reason::kAllEqual,
                          "min-max rescale of constant scores");
  const double span = *hi - *lo;
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / span;
  return out;
}

BaselineResult raw_slid_baseline(std::span<const double> s_lid,
                                 std::span<const PointId> ids) {
  check_ids(s_lid.size(), ids);
  BaselineResult r;
  r.method = "slid";
  r.likelihood = minmax_scale(s_lid);
  r.high_risk.assign(s_lid.size(), 0);
  for (std::size_t i = 0; i < s_lid.size(); ++i)
    r.high_risk[i] = r.likelihood[i] >= 0.5 ? 1 : 0;
  for (const auto i : rank_descending(r.likelihood, ids)) {
    if (r.top.size() == kTopCount || r.likelihood[i] < 0.5) break;
    r.top.push_back(i);
  }
  return r;
}

}  // namespace stlid
