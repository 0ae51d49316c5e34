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

#include <filesystem>
#include <fstream>
#include <random>

#include "reference.hpp"
#include "stlid/csv.hpp"
#include "stlid/data.hpp"
#include "stlid/error.hpp"

using namespace stlid;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

CreepScenarioSpec small_spec() {
  CreepScenarioSpec s;
  s.nx = 12;
  s.ny = 10;
  s.num_steps = 200;
  s.region = {30, 30, 70, 70};
  s.steady_zone = {90, 10, 110, 40};
  s.onset_step = 100;
  s.time_of_failure = 180;
  return s;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("load well-formed files") {
  const auto dir = ref::scratch_dir("load");
  write(dir / "p.csv", "id,x,y\n1,0,0\n2,1,0\n3,0,1\n");
  write(dir / "s.csv",
        "id,t,displacement\n"
        "1,0,0\n1,1,1\n1,2,2\n1,3,3\n"
        "2,0,0\n2,1,0.5\n2,2,1\n2,3,1.5\n"
        "3,0,4\n3,1,4\n3,2,4\n3,3,4\n");
  const auto ds = load_dataset((dir / "p.csv").string(), (dir / "s.csv").string(), 2.5);
  CHECK(ds.num_points() == 3);
  CHECK(ds.num_steps() == 4);
  CHECK(ds.step_interval() == 2.5);
  CHECK(ds.displacement(ds.index_of(2), 3) == 1.5);
  std::filesystem::remove_all(dir);
}

TEST_CASE("series rows may come in any point order") {
  const auto dir = ref::scratch_dir("order");
  write(dir / "p.csv", "id,x,y\n5,0,0\n7,1,0\n");
  write(dir / "s.csv", "id,t,displacement\n7,10,1\n5,10,2\n7,11,3\n5,11,4\n");
  const auto ds = load_dataset((dir / "p.csv").string(), (dir / "s.csv").string());
  CHECK(ds.start_step() == 10);
  CHECK(ds.displacement(ds.index_of(5), 11) == 4);
  CHECK(ds.displacement(ds.index_of(7), 10) == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown point id is a consistency error") {
  const auto dir = ref::scratch_dir("unknown");
  write(dir / "p.csv", "id,x,y\n1,0,0\n2,1,0\n");
  write(dir / "s.csv", "id,t,displacement\n1,0,0\n1,1,0\n99,0,1\n");
  CHECK_THROWS_AS(load_dataset((dir / "p.csv").string(), (dir / "s.csv").string()),
                  ConsistencyError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("NaN cell is a data error naming row and column") {
  const auto dir = ref::scratch_dir("nan");
  write(dir / "p.csv", "id,x,y\n1,0,0\n");
  write(dir / "s.csv", "id,t,displacement\n1,0,0\n1,1,NaN\n");
  try {
    load_dataset((dir / "p.csv").string(), (dir / "s.csv").string());
    FAIL("expected a data error");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":3:") != std::string::npos);
    CHECK(msg.find("displacement") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed row is a parse error with its line number") {
  const auto dir = ref::scratch_dir("parse");
  write(dir / "p.csv", "id,x,y\n1,0,0\n2,abc,0\n");
  write(dir / "s.csv", "id,t,displacement\n1,0,0\n");
  try {
    load_dataset((dir / "p.csv").string(), (dir / "s.csv").string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  write(dir / "p.csv", "id,x\n1,0\n");
  CHECK_THROWS_AS(load_dataset((dir / "p.csv").string(), (dir / "s.csv").string()),
                  ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("gaps and mismatched step ranges are consistency errors") {
  const auto dir = ref::scratch_dir("gaps");
  write(dir / "p.csv", "id,x,y\n1,0,0\n2,1,0\n");
  write(dir / "s.csv", "id,t,displacement\n1,0,0\n1,2,0\n2,0,0\n2,1,0\n");
  CHECK_THROWS_AS(load_dataset((dir / "p.csv").string(), (dir / "s.csv").string()),
                  ConsistencyError);
  write(dir / "s.csv", "id,t,displacement\n1,0,0\n1,1,0\n2,1,0\n2,2,0\n");
  CHECK_THROWS_AS(load_dataset((dir / "p.csv").string(), (dir / "s.csv").string()),
                  ConsistencyError);
  write(dir / "s.csv", "id,t,displacement\n1,0,0\n1,1,0\n");
  CHECK_THROWS_AS(load_dataset((dir / "p.csv").string(), (dir / "s.csv").string()),
                  ConsistencyError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset invariants") {
  CHECK_THROWS_AS(ref::make_dataset({{1.0}}), DataError);
  CHECK_THROWS_AS(ref::make_dataset({{1.0, std::nan("")}}), DataError);
  std::vector<MonitoredPoint> dup{{1, {0, 0}}, {1, {1, 1}}};
  CHECK_THROWS_AS(MonitoringDataset(dup, {0, 0, 0, 0}, 2, 1.0), DataError);
  CHECK_THROWS_AS(MonitoringDataset({{1, {0, 0}}}, {0, 0, 0}, 2, 1.0), DataError);
}

TEST_CASE("save then load reproduces values bit for bit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<std::vector<double>> series(6, std::vector<double>(9));
  for (auto& s : series)
    for (auto& x : s) x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 9) - 4);
  series[0][0] = 0.1;
  series[0][1] = 1.0 / 3.0;
  series[0][2] = 5e-324;
  series[0][3] = 1.7976931348623157e308;
  const auto ds = ref::make_dataset(series, 6.0, 40);
  const auto dir = ref::scratch_dir("roundtrip");
  save_dataset(ds, (dir / "p.csv").string(), (dir / "s.csv").string());
  const auto back = load_dataset((dir / "p.csv").string(), (dir / "s.csv").string(), 6.0);
  CHECK(back.matrix() == ds.matrix());
  CHECK(back.start_step() == 40);
  CHECK(back.ids() == ds.ids());
  CHECK(csv::validate_schema((dir / "p.csv").string(), "points").empty());
  CHECK(csv::validate_schema((dir / "s.csv").string(), "series").empty());

  GroundTruth truth{{{"A", {1, 2, 3, 4}, 42}, {"B", {0.5, 0.25, 9, 9.5}, 44}}};
  save_ground_truth(truth, (dir / "t.csv").string());
  const auto t2 = load_ground_truth((dir / "t.csv").string());
  REQUIRE(t2.regions.size() == 2);
  CHECK(t2.regions[1].label == "B");
  CHECK(t2.regions[1].rect.ymin == 0.25);
  CHECK(t2.regions[0].time_of_failure == 42);
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double keeps at least 9 significant digits") {
  CHECK(csv::format_double(1.0) == "1");
  CHECK(csv::format_double(0.5) == "0.5");
  double x = 0.0;
  for (const double v : {0.1, 1.0 / 3.0, 2.718281828459045, -1e-300}) {
    REQUIRE(csv::parse_double(csv::format_double(v), x));
    CHECK(x == v);
  }
}

TEST_CASE("velocity_at and sample_at") {
  const auto ds = ref::make_dataset({{0, 2, 5}, {4, 4, 4}, {1, 1, 1}});
  CHECK(velocity_at(ds, 0, 2) == 3.0);
  CHECK(velocity_at(ds, 1, 1) == 0.0);
  CHECK(velocity_at(ds, 1, 2) == 0.0);
  const auto s = sample_at(ds, 0, 2);
  CHECK(s.displacement == 5.0);
  CHECK(s.velocity == 3.0);
  const auto s2 = sample_at(ds, 2, 1);
  CHECK(s2.displacement == 1.0);
  CHECK(s2.velocity == 0.0);
  CHECK_THROWS_AS(velocity_at(ds, 0, 0), PreconditionError);
  CHECK_THROWS_AS(sample_at(ds, 0, 0), PreconditionError);
  CHECK_THROWS_AS(velocity_at(ds, 0, 3), PreconditionError);
  CHECK_THROWS_AS(velocity_at(ds, 9, 1), PreconditionError);
}

TEST_CASE("velocity equals the displacement difference everywhere") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> series(7, std::vector<double>(11));
  for (auto& s : series)
    for (auto& x : s) x = g(rng);
  const auto ds = ref::make_dataset(series, 1.0, 5);
  for (std::size_t p = 0; p < 7; ++p)
    for (Step t = 6; t < 16; ++t) {
      CHECK(velocity_at(ds, static_cast<PointId>(p), t) ==
            ds.displacement(p, t) - ds.displacement(p, t - 1));
      const auto all = samples_at(ds, t);
      CHECK(all[p].velocity == velocity_at(ds, static_cast<PointId>(p), t));
    }
}

TEST_CASE("noise-free scenario without region is constant plus drift") {
  CreepScenarioSpec s = small_spec();
  s.noise_sd = 0.0;
  s.has_region = false;
  s.has_steady_zone = false;
  s.drift = 0.01;
  const auto [ds, truth] = generate_creep_scenario(s);
  CHECK(truth.regions.empty());
  for (std::size_t i = 0; i < ds.num_points(); ++i)
    for (std::size_t j = 0; j < ds.num_steps(); ++j)
      CHECK(ds.series(i)[j] == 0.01 * static_cast<double>(j));
}

TEST_CASE("inverse-velocity acceleration") {
  CreepScenarioSpec s;
  s.num_steps = 1200;
  s.onset_step = 500;
  s.time_of_failure = 1000;
  s.exponent = 1.0;
  s.transient_amplitude = 0.0;
  // Noise-free unit-amplitude velocity, and the closed form of the law.
  const double v501 = creep_velocity(s, 501);
  const double v999 = creep_velocity(s, 999);
  CHECK(v999 >= 10.0 * v501);
  CHECK(v501 == doctest::Approx(s.creep_rate * 501.0 / 500.0).epsilon(1e-12));
  CHECK(v999 == doctest::Approx(s.creep_rate * 501.0 / 2.0).epsilon(1e-12));
  CHECK(creep_velocity(s, 1001) == 0.0);
  CHECK(creep_velocity(s, 300) == doctest::Approx(s.creep_rate));

  // The same ratio holds for the mean generated in-region velocity.
  s.noise_sd = 0.0;
  s.nx = 30;
  s.ny = 25;
  s.region = {50, 50, 150, 150};
  s.steady_zone = {200, 50, 250, 100};
  const auto [ds, truth] = generate_creep_scenario(s);
  double m501 = 0.0, m999 = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < ds.num_points(); ++i) {
    if (!s.region.contains(ds.points()[i].coord)) continue;
    m501 += velocity_at(ds, ds.points()[i].id, 501);
    m999 += velocity_at(ds, ds.points()[i].id, 999);
    ++count;
  }
  REQUIRE(count > 0);
  CHECK(m999 >= 10.0 * m501);
}

TEST_CASE("generation is deterministic per seed") {
  const auto s = small_spec();
  const auto [a, ta] = generate_creep_scenario(s);
  const auto [b, tb] = generate_creep_scenario(s);
  CHECK(a.matrix() == b.matrix());
  auto s2 = s;
  s2.seed = 2;
  const auto [c, tc] = generate_creep_scenario(s2);
  CHECK(a.matrix() != c.matrix());
}

TEST_CASE("in-region points end above every outside point") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto s = small_spec();
    s.seed = seed;
    const double bound = s.edge_amplitude * std::exp(-4.0 * s.amplitude_jitter) *
                         creep_displacement(s, s.time_of_failure) / 10.0;
    s.noise_sd = 0.99 * bound;
    const auto [ds, truth] = generate_creep_scenario(s);
    double min_in = 1e300, max_out = -1e300;
    for (std::size_t i = 0; i < ds.num_points(); ++i) {
      const double last = ds.series(i).back();
      if (s.region.contains(ds.points()[i].coord)) min_in = std::min(min_in, last);
      else max_out = std::max(max_out, last);
    }
    CHECK(min_in > max_out);
  }
}

TEST_CASE("spec validation names the field") {
  auto s = small_spec();
  s.time_of_failure = 500;
  try {
    generate_creep_scenario(s);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("scenario.time_of_failure") != std::string::npos);
  }
  s = small_spec();
  s.onset_step = s.time_of_failure;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.noise_sd = -1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.steady_zone = s.region;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("ground truth validation") {
  const auto ds = ref::make_dataset({{0, 1, 2}, {0, 1, 2}});
  GroundTruth ok{{{"A", {0, 0, 1, 1}, 2}}};
  CHECK_NOTHROW(ok.validate(ds));
  GroundTruth late{{{"A", {0, 0, 1, 1}, 3}}};
  CHECK_THROWS_AS(late.validate(ds), DataError);
  GroundTruth flat{{{"A", {0, 0, 0, 1}, 1}}};
  CHECK_THROWS_AS(flat.validate(ds), DataError);
  CHECK(ok.inside_any({0.5, 1.0}));
  CHECK_FALSE(ok.inside_any({1.5, 0.5}));
}

}  // TEST_SUITE
