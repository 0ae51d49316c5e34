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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "reference.hpp"
#include "stlid/baselines.hpp"
#include "stlid/error.hpp"

using namespace stlid;

namespace {

std::vector<PointId> iota_ids(std::size_t n) {
  std::vector<PointId> ids(n);
  std::iota(ids.begin(), ids.end(), PointId{0});
  return ids;
}

/// Random samples on an integer grid so that ties and duplicates occur.
std::vector<KinematicSample> grid_samples(std::mt19937_64& rng, std::size_t n, int extent) {
  std::uniform_int_distribution<int> u(0, extent);
  std::vector<KinematicSample> s(n);
  for (auto& x : s) x = {static_cast<double>(u(rng)), static_cast<double>(u(rng))};
  return s;
}

std::vector<KinematicSample> lattice(int side) {
  std::vector<KinematicSample> s;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) s.push_back({static_cast<double>(i), static_cast<double>(j)});
  return s;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("k-means splits two groups") {
  const std::vector<double> v{0.1, 0.2, 0.15, 5.0, 5.2, 0.05};
  const auto r = kmeans2(v, iota_ids(6));
  CHECK(r.high_risk == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 0});
  CHECK(r.likelihood == std::vector<double>{0, 0, 0, 1, 1, 0});
  CHECK(r.top == std::vector<std::size_t>{3, 4});
  CHECK(r.method == "kmeans");
}

TEST_CASE("k-means objective never increases") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(200);
    for (auto& x : v) x = g(rng) + (g(rng) > 1.0 ? 4.0 : 0.0);
    KMeansTrace trace;
    kmeans2(v, iota_ids(v.size()), &trace);
    REQUIRE(trace.iterations >= 1);
    for (std::size_t i = 1; i < trace.objective.size(); ++i)
      CHECK(trace.objective[i] <= trace.objective[i - 1] + 1e-9);
  }
}

TEST_CASE("k-means rejects constant input") {
  const std::vector<double> v{2, 2, 2};
  CHECK_THROWS_AS(kmeans2(v, iota_ids(3)), DegenerateError);
  CHECK_THROWS_AS(kmeans2(std::vector<double>{}, std::vector<PointId>{}), PreconditionError);
}

TEST_CASE("DBSCAN matches the quadratic reference") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> size(5, 100);
  std::uniform_int_distribution<std::size_t> mp(2, 6);
  std::uniform_real_distribution<double> ue(0.5, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = grid_samples(rng, size(rng), 12);
    const double eps = trial % 4 == 0 ? 1.0 : ue(rng);  // exact boundary distances
    const std::size_t min_pts = mp(rng);
    CHECK(ref::same_partition(dbscan_labels(s, eps, min_pts), ref::dbscan(s, eps, min_pts)));
  }
}

TEST_CASE("DBSCAN high risk: noise plus the highest-displacement cluster") {
  auto s = lattice(6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s.push_back({20.0 + i, static_cast<double>(j)});
  s.push_back({10, 30});  // isolated
  DbscanConfig c;
  c.eps = 1.5;
  c.min_pts = 4;
  const auto r = dbscan(s, iota_ids(s.size()), c);
  for (std::size_t i = 0; i < 36; ++i) CHECK(r.high_risk[i] == 0);
  for (std::size_t i = 36; i < s.size(); ++i) {
    CHECK(r.high_risk[i] == 1);
    CHECK(r.likelihood[i] == 1.0);
  }
  CHECK(r.top.size() == 10);
}

TEST_CASE("DBSCAN auto eps lies on an observed neighbour distance") {
  std::mt19937_64 rng(4);
  const auto s = grid_samples(rng, 60, 20);
  const double eps = dbscan_auto_eps(s, 5);
  CHECK(eps > 0.0);
  bool found = false;
  for (const auto& a : s)
    for (const auto& b : s)
      if (std::fabs(ref::dist(a, b) - eps) < 1e-12) found = true;
  CHECK(found);
}

TEST_CASE("LOF matches the quadratic reference") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<std::size_t> size(12, 100);
  std::uniform_int_distribution<std::size_t> kk(1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = grid_samples(rng, size(rng), trial % 2 ? 8 : 30);
    const std::size_t k = kk(rng);
    const auto got = lof_scores(s, k);
    const auto want = ref::lof(s, k);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
  }
}

TEST_CASE("LOF: lattice interior near one, isolated point high") {
  auto s = lattice(15);
  s.push_back({40, 40});
  const auto scores = lof_scores(s, 8);
  for (int i = 4; i < 11; ++i)
    for (int j = 4; j < 11; ++j)
      CHECK(scores[static_cast<std::size_t>(i * 15 + j)] == doctest::Approx(1.0).epsilon(0.05));
  auto sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  CHECK(scores.back() > 2.0 * sorted[sorted.size() / 2]);
  LofConfig c;
  c.k = 8;
  const auto r = lof(s, iota_ids(s.size()), c);
  CHECK(r.high_risk.back() == 1);
  CHECK(r.top.front() == s.size() - 1);
}

TEST_CASE("baseline config validation") {
  DbscanConfig d;
  d.min_pts = 0;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = {};
  d.eps = -1;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  LofConfig l;
  l.k = 0;
  CHECK_THROWS_AS(l.validate(), ConfigError);
  EdqConfig e;
  e.levels = {};
  CHECK_THROWS_AS(e.validate(), ConfigError);
  e.levels = {1.5};
  CHECK_THROWS_AS(e.validate(), ConfigError);
  CHECK_THROWS_AS(lof_scores(lattice(2), 4), ConfigError);
}

TEST_CASE("EDQ picks the median and the upper tail") {
  const auto ds = ref::make_dataset({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}});
  EdqConfig c;
  c.levels = {0.5};
  auto r = edq_select(ds, 2, c);
  REQUIRE(r.picks.size() == 1);
  CHECK(r.picks[0].index == 1);
  c.levels = {0.95};
  r = edq_select(ds, 2, c);
  CHECK(r.picks[0].index == 2);
  CHECK(r.likelihood[2] == 0.95);
  CHECK(r.high_risk[2] == 1);
}

TEST_CASE("EDQ agrees with exhaustive evaluation") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<double>> series(20, std::vector<double>(15));
    for (auto& s : series) {
      double acc = 0.0;
      const double rate = g(rng) * 0.2;
      for (auto& x : s) x = (acc += rate + 0.1 * g(rng));
    }
    const auto ds = ref::make_dataset(series);
    const Step until = 5 + trial % 10;
    EdqConfig c;
    const auto r = edq_select(ds, until, c);
    std::vector<std::uint8_t> seen(20, 0);
    for (const auto& pick : r.picks) {
      CHECK_FALSE(seen[pick.index]);
      seen[pick.index] = 1;
    }
    // Exhaustive selection: lowest index among the minimal objectives.
    std::vector<std::size_t> expect;
    std::vector<std::uint8_t> taken(20, 0);
    for (const double q : c.levels) {
      std::size_t best = 0;
      double best_obj = ref::edq_objective(ds, 0, q, until);
      for (std::size_t j = 1; j < 20; ++j) {
        const double o = ref::edq_objective(ds, j, q, until);
        if (o < best_obj - 1e-9 * std::max(1.0, std::fabs(best_obj))) best = j, best_obj = o;
      }
      if (!taken[best]) expect.push_back(best);
      taken[best] = 1;
    }
    std::vector<std::size_t> got;
    for (const auto& pick : r.picks) got.push_back(pick.index);
    CHECK(got == expect);
  }
}

TEST_CASE("EDQ selection is invariant to a common shift") {
  std::mt19937_64 rng(24);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> a(12, std::vector<double>(10)), b = a;
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t t = 0; t < 10; ++t) {
      a[i][t] = g(rng);
      b[i][t] = a[i][t] + 3.0 * static_cast<double>(t);
    }
  const auto ra = edq_select(ref::make_dataset(a), 9, EdqConfig{});
  const auto rb = edq_select(ref::make_dataset(b), 9, EdqConfig{});
  REQUIRE(ra.picks.size() == rb.picks.size());
  for (std::size_t i = 0; i < ra.picks.size(); ++i) CHECK(ra.picks[i].index == rb.picks[i].index);
}

TEST_CASE("EDQ step range") {
  const auto ds = ref::make_dataset({{1, 2}, {2, 3}});
  CHECK_THROWS_AS(edq_select(ds, 5, EdqConfig{}), PreconditionError);
}

TEST_CASE("raw s-LID rescaling") {
  const std::vector<double> v{1, 2, 3};
  CHECK(minmax_scale(v) == std::vector<double>{0, 0.5, 1});
  const auto r = raw_slid_baseline(v, iota_ids(3));
  CHECK(r.high_risk == std::vector<std::uint8_t>{0, 1, 1});
  CHECK(r.top == std::vector<std::size_t>{2, 1});
  CHECK_THROWS_AS(minmax_scale(std::vector<double>{4, 4}), DegenerateError);
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> x(40);
  for (auto& e : x) e = u(rng);
  for (const double s : minmax_scale(x)) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("ranking breaks ties by id") {
  const std::vector<double> s{0.5, 0.9, 0.9, 0.1};
  const std::vector<PointId> ids{4, 8, 2, 1};
  CHECK(rank_descending(s, ids) == std::vector<std::size_t>{2, 1, 0, 3});
}

}  // TEST_SUITE
