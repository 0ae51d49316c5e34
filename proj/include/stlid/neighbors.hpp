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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace stlid {

/// One neighbour of a query: Euclidean distance and index into the indexed
/// point set.
struct Neighbor {
  double distance = 0.0;
  std::uint32_t index = 0;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance ||
           (a.distance == b.distance && a.index < b.index);
  }
};

/// Static exact k-d tree over D-dimensional points.
///
/// Queries return neighbours sorted by (distance, index), so equal-distance
/// ties resolve to the lowest index and results match brute force exactly.
template <std::size_t D>
class KdTree {
 public:
  using Point = std::array<double, D>;

  explicit KdTree(std::vector<Point> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    if (!points_.empty()) build(0, static_cast<std::uint32_t>(order_.size()));
  }

  std::size_t size() const { return points_.size(); }
  const Point& point(std::size_t i) const { return points_[i]; }

  /// k nearest neighbours of `query`, skipping index `exclude` (pass
  /// npos to keep every point). Safe to call concurrently.
  void knn(const Point& query, std::size_t k, std::uint32_t exclude,
           std::vector<Neighbor>& out) const {
    out.clear();
    if (k == 0 || points_.empty()) return;
    search(0, query, k, exclude, out);
    std::sort_heap(out.begin(), out.end());
    for (auto& n : out) n.distance = std::sqrt(n.distance);
  }

  /// Every point with distance <= radius (compared after the square root),
  /// skipping `exclude`, sorted by (distance, index).
  void within(const Point& query, double radius, std::uint32_t exclude,
              std::vector<Neighbor>& out) const {
    out.clear();
    if (points_.empty() || !(radius >= 0.0)) return;
    // Slack on the pruning bound only; membership is decided exactly below.
    const double bound = radius * radius * (1.0 + 1e-12) + 1e-300;
    collect(0, query, radius, bound, exclude, out);
    std::sort(out.begin(), out.end());
  }

  static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

 private:
  static constexpr std::uint32_t kLeafSize = 12;

  struct Node {
    std::uint32_t begin, end;  // range in order_
    std::uint32_t left = 0, right = 0;  // children, 0 = leaf
    std::uint32_t axis = 0;
    double split = 0.0;
    Point lo, hi;  // bounding box
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, 0, 0, 0, 0.0, {}, {}});
    Point lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (auto i = begin; i < end; ++i)
      for (std::size_t d = 0; d < D; ++d) {
        lo[d] = std::min(lo[d], points_[order_[i]][d]);
        hi[d] = std::max(hi[d], points_[order_[i]][d]);
      }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    if (end - begin <= kLeafSize) return id;

    std::size_t axis = 0;
    for (std::size_t d = 1; d < D; ++d)
      if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    if (!(hi[axis] > lo[axis])) return id;  // all coincident

    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    const double split = points_[order_[mid]][axis];
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    nodes_[id].axis = static_cast<std::uint32_t>(axis);
    nodes_[id].split = split;
    return id;
  }

  static double box_distance2(const Node& n, const Point& q) {
    double s = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      double diff = 0.0;
      if (q[d] < n.lo[d]) diff = n.lo[d] - q[d];
      else if (q[d] > n.hi[d]) diff = q[d] - n.hi[d];
      s += diff * diff;
    }
    return s;
  }

  // The heap holds squared distances while searching.
  static void offer(double d2, std::uint32_t index, std::size_t k,
                    std::vector<Neighbor>& heap) {
    const Neighbor cand{d2, index};
    if (heap.size() < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end());
    } else if (cand < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end());
    }
  }

  void search(std::uint32_t id, const Point& q, std::size_t k,
              std::uint32_t exclude, std::vector<Neighbor>& heap) const {
    const Node& n = nodes_[id];
    if (n.left == 0) {
      for (auto i = n.begin; i < n.end; ++i) {
        const auto idx = order_[i];
        if (idx == exclude) continue;
        double s = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
          const double diff = points_[idx][d] - q[d];
          s += diff * diff;
        }
        offer(s, idx, k, heap);
      }
      return;
    }
    const bool go_left = q[n.axis] < n.split;
    const auto first = go_left ? n.left : n.right;
    const auto second = go_left ? n.right : n.left;
    // Visit a child unless its box is strictly farther than the current
    // k-th candidate; equal distance must still be visited for index ties.
    for (const auto child : {first, second}) {
      if (heap.size() == k &&
          box_distance2(nodes_[child], q) > heap.front().distance)
        continue;
      search(child, q, k, exclude, heap);
    }
  }

  void collect(std::uint32_t id, const Point& q, double radius, double bound,
               std::uint32_t exclude, std::vector<Neighbor>& out) const {
    const Node& n = nodes_[id];
    if (box_distance2(n, q) > bound) return;
    if (n.left == 0) {
      for (auto i = n.begin; i < n.end; ++i) {
        const auto idx = order_[i];
        if (idx == exclude) continue;
        double s = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
          const double diff = points_[idx][d] - q[d];
          s += diff * diff;
        }
        const double dist = std::sqrt(s);
        if (dist <= radius) out.push_back({dist, idx});
      }
      return;
    }
    collect(n.left, q, radius, bound, exclude, out);
    collect(n.right, q, radius, bound, exclude, out);
  }

  std::vector<Point> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Brute-force exact kNN with the same ordering contract as KdTree.
template <std::size_t D>
void brute_force_knn(std::span<const std::array<double, D>> points,
                     const std::array<double, D>& query, std::size_t k,
                     std::uint32_t exclude, std::vector<Neighbor>& out) {
  out.clear();
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    if (i == exclude) continue;
    double s = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      const double diff = points[i][d] - query[d];
      s += diff * diff;
    }
    out.push_back({s, i});
  }
  const auto kk = std::min(k, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(kk),
                    out.end());
  out.resize(kk);
  for (auto& n : out) n.distance = std::sqrt(n.distance);
}

}  // namespace stlid
