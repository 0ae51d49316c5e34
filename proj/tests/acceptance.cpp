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

// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: stlid_acceptance [SCENARIO_DIR]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "reference.hpp"
#include "stlid/baselines.hpp"
#include "stlid/config.hpp"
#include "stlid/detection.hpp"
#include "stlid/error.hpp"
#include "stlid/fusion.hpp"
#include "stlid/lid.hpp"
#include "stlid/metrics.hpp"
#include "stlid/neighbors.hpp"
#include "stlid/pipeline.hpp"

#ifndef STLID_SCENARIO_DIR
#define STLID_SCENARIO_DIR "scenarios"
#endif

using namespace stlid;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string scenario_dir;

CreepScenarioSpec load_scenario(const std::string& name) {
  RunConfig c;
  load_config_file(c, scenario_dir + "/" + name);
  return c.scenario;
}

// 1. Median interior LID of uniform d-ball samples.
Outcome estimator_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  constexpr std::size_t n = 5000;
  for (int dim = 1; dim <= 3; ++dim) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(dim));
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::array<double, 3>> pts(n);
    for (auto& p : pts) {
      p = {0, 0, 0};
      double norm = 0.0;
      for (int k = 0; k < dim; ++k) norm += (p[k] = g(rng)) * p[k];
      const double r = std::pow(u(rng), 1.0 / dim) / std::sqrt(norm);
      for (int k = 0; k < dim; ++k) p[k] *= r;
    }
    const KdTree<3> tree(pts);
    std::vector<double> lids;
    std::vector<Neighbor> nb;
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto& p = pts[i];
      if (std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) > 0.5) continue;
      tree.knn(p, 100, i, nb);
      NeighborDistances d;
      for (const auto& x : nb) d.distances.push_back(x.distance);
      lids.push_back(mle_lid(d));
    }
    std::sort(lids.begin(), lids.end());
    const double med = lids[lids.size() / 2];
    o.require(med >= 0.7 * dim && med <= 1.3 * dim, "d=" + std::to_string(dim));
    o.note("d=" + std::to_string(dim) + " median " + fmt("%.3f", med));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "runtime");
  o.note(fmt("%.2f s", secs));
  return o;
}

// 2. Moment matching and the conjugate update.
Outcome gamma_algebra() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> w(0.01, 1.0), s(0.2, 8.0);
  std::uniform_int_distribution<int> k(2, 16);
  const VarianceFloor floor;
  double worst = 0.0;
  bool exact = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = k(rng);
    std::vector<double> weights(m), slids(m);
    for (auto& x : weights) x = w(rng);
    for (auto& x : slids) x = s(rng);
    double wsum = 0.0, mu = 0.0, var = 0.0;
    for (int i = 0; i < m; ++i) wsum += weights[i];
    for (auto& x : weights) x /= wsum;
    for (int i = 0; i < m; ++i) mu += weights[i] * slids[i];
    for (int i = 0; i < m; ++i) var += weights[i] * (slids[i] - mu) * (slids[i] - mu);
    var = std::max(var, floor.at(mu));
    const auto p = prior_from_neighbors(slids, weights, floor);
    worst = std::max({worst, std::fabs(p.alpha / p.beta - mu) / mu,
                      std::fabs(p.alpha / (p.beta * p.beta) - var) / var});
    const GammaParams obs{static_cast<double>(k(rng)), w(rng) * 10.0};
    exact = exact && fused_slid(p, obs) == (p.alpha + obs.alpha) / (p.beta + obs.beta);
  }
  o.require(worst <= 1e-12, "moment identities");
  o.require(exact, "posterior mean");
  o.note("max relative error " + fmt("%.2e", worst));
  return o;
}

// 3. Baselines against quadratic references and exhaustive EDQ.
Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> size(12, 100);
  std::uniform_int_distribution<std::size_t> small(2, 8);
  std::uniform_real_distribution<double> ue(0.5, 4.0);
  int dbscan_bad = 0, lof_bad = 0, edq_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int extent = trial % 2 ? 10 : 40;
    std::uniform_int_distribution<int> c(0, extent);
    std::vector<KinematicSample> s(size(rng));
    for (auto& x : s) x = {static_cast<double>(c(rng)), static_cast<double>(c(rng))};
    const double eps = trial % 4 == 0 ? 2.0 : ue(rng);
    const std::size_t min_pts = small(rng);
    if (!ref::same_partition(dbscan_labels(s, eps, min_pts), ref::dbscan(s, eps, min_pts)))
      ++dbscan_bad;
    const std::size_t k = small(rng);
    const auto got = lof_scores(s, k);
    const auto want = ref::lof(s, k);
    for (std::size_t i = 0; i < got.size(); ++i)
      if (!(std::fabs(got[i] - want[i]) <= 1e-9 * std::max(1.0, std::fabs(want[i])))) {
        ++lof_bad;
        break;
      }
  }
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> series(20, std::vector<double>(30));
    for (auto& row : series) {
      double acc = 0.0;
      const double rate = 0.2 * g(rng);
      for (auto& x : row) x = (acc += rate + 0.1 * g(rng));
    }
    const auto ds = ref::make_dataset(series);
    const Step until = 10 + trial % 20;
    const EdqConfig cfg;
    const auto r = edq_select(ds, until, cfg);
    // Exhaustive selection with the same ordering rules.
    std::vector<std::uint8_t> picked(20, 0);
    std::vector<std::size_t> expect;
    auto levels = cfg.levels;
    std::sort(levels.begin(), levels.end());
    for (const double q : levels) {
      std::size_t best = 0;
      double best_obj = ref::edq_objective(ds, 0, q, until);
      for (std::size_t j = 1; j < 20; ++j) {
        const double obj = ref::edq_objective(ds, j, q, until);
        if (obj < best_obj - 1e-9 * std::max(1.0, std::fabs(best_obj))) best = j, best_obj = obj;
      }
      if (!picked[best]) expect.push_back(best);
      picked[best] = 1;
    }
    std::vector<std::size_t> got;
    for (const auto& p : r.picks) got.push_back(p.index);
    if (got != expect) ++edq_bad;
  }
  o.require(dbscan_bad == 0, std::to_string(dbscan_bad) + " DBSCAN instances");
  o.require(lof_bad == 0, std::to_string(lof_bad) + " LOF instances");
  o.require(edq_bad == 0, std::to_string(edq_bad) + " EDQ instances");
  o.note("100 DBSCAN, 100 LOF, 50 EDQ instances");
  return o;
}

struct SyntheticRun {
  std::size_t events = 0;
  std::optional<DetectionEvent> first;
  PrecisionResult st_precision, raw_precision;
  LeadTime st_lead, raw_lead;
  double seconds = 0.0;
};

SyntheticRun run_synthetic(const MonitoringDataset& ds, const GroundTruth& truth) {
  SyntheticRun out;
  const PipelineConfig cfg;
  const auto coords = ds.coords();
  const auto ids = ds.ids();
  const std::optional<FailureRegion> region =
      truth.regions.empty() ? std::nullopt : std::optional(truth.regions.front());
  std::vector<TopSet> st_hist, raw_hist;
  RunOptions opt;
  opt.on_step = [&](const StepScores& s, const Pipeline& p) {
    if (!region || s.step > region->time_of_failure || !s.has_st()) return;
    const auto det = detected_points(p.detection(), s.st, coords, p.config().detection, s.excluded);
    TopSet st{s.step, {}};
    for (const auto i : det) st.points.push_back(coords[i]);
    TopSet raw{s.step, {}};
    std::vector<Coord> raw_high;
    try {
      const auto r = raw_slid_baseline(s.s_lid, ids);
      for (const auto i : r.top) raw.points.push_back(coords[i]);
      for (std::size_t i = 0; i < r.high_risk.size(); ++i)
        if (r.high_risk[i]) raw_high.push_back(coords[i]);
    } catch (const DegenerateError&) {
    }
    if (s.step == region->time_of_failure) {
      out.st_precision = precision(st.points, truth);
      out.raw_precision = precision(raw_high, truth);
    }
    st_hist.push_back(std::move(st));
    raw_hist.push_back(std::move(raw));
  };
  const auto t0 = Clock::now();
  const auto run = run_detection(ds, cfg, &truth, opt);
  out.seconds = seconds_since(t0);
  out.events = run.events.size();
  if (!run.events.empty()) out.first = run.events.front();
  if (region) {
    out.st_lead = lead_time(st_hist, *region, ds.step_interval());
    out.raw_lead = lead_time(raw_hist, *region, ds.step_interval());
  }
  return out;
}

std::string prec_text(const PrecisionResult& p) {
  return p.value ? fmt("%.3f", *p.value) : "N.A.";
}

// 4 and 5 share one run of the creep scenario.
std::pair<Outcome, Outcome> end_to_end() {
  Outcome o4, o5;
  const auto [ds, truth] = generate_creep_scenario(load_scenario("creep_2000.cfg"));
  const auto run = run_synthetic(ds, truth);
  const auto& region = truth.regions.front();
  o4.require(ds.num_points() == 2000 && ds.num_steps() == 2000, "scenario size");
  o4.require(run.events == 1, std::to_string(run.events) + " events");
  if (run.first) {
    o4.require(region.rect.contains(run.first->location), "event outside the region");
    o4.note("event at step " + std::to_string(run.first->detection_step) + ", point " +
            std::to_string(run.first->point_id));
  }
  o4.require(run.st_lead.steps > 0, "lead time");
  o4.require(run.st_precision.value && *run.st_precision.value == 1.0, "precision");
  o4.note("precision " + prec_text(run.st_precision) + ", lead " +
          format_lead_time(run.st_lead.steps, run.st_lead.minutes));

  const auto [noise, none] = generate_creep_scenario(load_scenario("noise_2000.cfg"));
  const auto control = run_synthetic(noise, none);
  o4.require(control.events == 0, std::to_string(control.events) + " control events");
  o4.note("control events " + std::to_string(control.events));
  const double secs = run.seconds + control.seconds;
  o4.require(secs < 300.0, "runtime");
  o4.note(fmt("%.1f s", secs));

  const double st_p = run.st_precision.value.value_or(0.0);
  const double raw_p = run.raw_precision.value.value_or(0.0);
  o5.require(st_p >= raw_p, "precision ordering");
  o5.require(run.st_lead.steps >= run.raw_lead.steps, "lead ordering");
  o5.note("st-LID " + prec_text(run.st_precision) + " / " + std::to_string(run.st_lead.steps) +
          " steps, raw s-LID " + prec_text(run.raw_precision) + " / " +
          std::to_string(run.raw_lead.steps) + " steps");
  return {o4, o5};
}

// 6. One pipeline step on 2622 points at 1 and 8 workers.
Outcome step_timing() {
  Outcome o;
  const auto [ds, truth] = generate_creep_scenario(load_scenario("timing_2622.cfg"));
  o.require(ds.num_points() == 2622, "site size");
  PipelineConfig cfg;
  cfg.threads = 1;
  Pipeline warm(ds.points(), cfg, ds.start_step());
  const Step measured = ds.start_step() + 20;
  while (warm.next_step() < measured) warm.advance(ds.column(warm.next_step()));
  const auto col = ds.column(measured);

  const auto time_step = [&](int threads, StepScores& result) {
    std::vector<double> secs;
    for (int rep = 0; rep < 5; ++rep) {
      Pipeline p = warm;
      p.set_threads(threads);
      const auto t0 = Clock::now();
      result = p.advance(col);
      secs.push_back(seconds_since(t0));
    }
    std::sort(secs.begin(), secs.end());
    return secs[secs.size() / 2];
  };
  StepScores one, eight;
  const double t1 = time_step(1, one);
  const double t8 = time_step(8, eight);
  const bool identical = one.s_lid == eight.s_lid && one.fused == eight.fused &&
                         one.t_lid == eight.t_lid && one.st.values == eight.st.values;
  o.require(t1 <= 5.4, "single-threaded time");
  o.require(t1 / t8 >= 3.0, "speedup");
  o.require(identical, "outputs differ across worker counts");
  o.note(fmt("1 worker %.4f s", t1) + fmt(", 8 workers %.4f s", t8) +
         fmt(", speedup %.2fx", t1 / t8) + ", hardware threads " +
         std::to_string(std::thread::hardware_concurrency()) +
         (identical ? ", outputs identical" : ""));
  return o;
}

// 7. Tracker cases.
Outcome state_machine() {
  Outcome o;
  const auto field = [](std::size_t n, Step t, std::size_t who, double v) {
    StLidField f{t, std::vector<double>(n, 0.1)};
    f.values[who] = v;
    return f;
  };
  DetectionConfig c;
  c.epsilon = 0.5;

  {  // n = 1
    const std::vector<Coord> xy{{0, 0}, {1, 0}};
    const std::vector<PointId> ids{0, 1};
    DetectionState st;
    c.n = 1;
    const auto ev = update_detection(st, field(2, 4, 1, 0.7), xy, ids, c);
    o.require(ev && ev->detection_step == 4 && ev->point_id == 1, "n=1");
  }
  {  // reset on a sub-threshold step
    const std::vector<Coord> xy{{0, 0}, {1, 0}};
    const std::vector<PointId> ids{0, 1};
    DetectionState st;
    c.n = 10;
    bool early = false;
    for (Step t = 0; t < 9; ++t) early |= update_detection(st, field(2, t, 0, 0.8), xy, ids, c).has_value();
    update_detection(st, field(2, 9, 0, 0.49), xy, ids, c);
    bool fired_early = false;
    std::optional<DetectionEvent> ev;
    for (Step t = 10; t < 20; ++t) {
      ev = update_detection(st, field(2, t, 0, 0.8), xy, ids, c);
      if (ev && t < 19) fired_early = true;
    }
    o.require(!early && st.consecutive_hits == 10 && !fired_early && ev &&
                  ev->detection_step == 19,
              "reset on sub-threshold step");
  }
  {  // argmax alternating between two points 0.1 apart
    const std::vector<Coord> xy{{0, 0}, {0.1, 0}, {9, 9}};
    const std::vector<PointId> ids{0, 1, 2};
    DetectionState st;
    c.n = 10;
    std::optional<DetectionEvent> ev;
    bool early = false;
    for (Step t = 0; t < 10; ++t) {
      ev = update_detection(st, field(3, t, static_cast<std::size_t>(t % 2), 0.6), xy, ids, c);
      if (ev && t < 9) early = true;
    }
    o.require(!early && ev && ev->detection_step == 9, "epsilon-ball fluctuation");
  }
  {  // ties
    const std::vector<Coord> xy{{0, 0}, {5, 0}, {10, 0}};
    const std::vector<PointId> ids{9, 2, 5};
    StLidField f{0, {0.9, 0.9, 0.9}};
    c.n = 1;
    bool ok = true;
    for (int rep = 0; rep < 5; ++rep) {
      DetectionState st;
      const auto ev = update_detection(st, f, xy, ids, c);
      ok = ok && ev && ev->point_id == 2;
    }
    o.require(ok, "tie-breaking");
  }
  o.note("n=1, reset, fluctuation, ties");
  return o;
}

// 8. Lead-time arithmetic.
Outcome lead_arithmetic() {
  Outcome o;
  const FailureRegion region{"M1", {0, 0, 100, 100}, 3385};
  std::vector<TopSet> history;
  for (Step t = 3305; t <= 3385; ++t) history.push_back({t, {{50, 50}}});
  const auto lt = lead_time(history, region, 2.5);
  const auto text = format_lead_time(lt.steps, lt.minutes);
  o.require(lt.steps == 80, "steps");
  o.require(lt.minutes == 200.0, "minutes");
  o.require(text == "80 (3.3 hrs)", "text");
  o.note("\"" + text + "\"");
  return o;
}

void report(int id, const char* name, const Outcome& o, int& failed) {
  std::printf("CRITERION %d %s: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failed;
}

}  // namespace

int main(int argc, char** argv) {
  scenario_dir = argc > 1 ? argv[1] : STLID_SCENARIO_DIR;
  int failed = 0;
  const auto guarded = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    try {
      report(id, name, fn(), failed);
    } catch (const std::exception& e) {
      report(id, name, Outcome{false, std::string("exception: ") + e.what()}, failed);
    }
  };
  guarded(1, "estimator recovery", estimator_recovery);
  guarded(2, "gamma conjugacy algebra", gamma_algebra);
  guarded(3, "brute-force oracle equivalence", oracle_equivalence);
  try {
    const auto [o4, o5] = end_to_end();
    report(4, "end-to-end synthetic detection", o4, failed);
    report(5, "st-LID vs raw s-LID ordering", o5, failed);
  } catch (const std::exception& e) {
    const Outcome bad{false, std::string("exception: ") + e.what()};
    report(4, "end-to-end synthetic detection", bad, failed);
    report(5, "st-LID vs raw s-LID ordering", bad, failed);
  }
  guarded(6, "per-step performance", step_timing);
  guarded(7, "detection state machine", state_machine);
  guarded(8, "lead-time arithmetic", lead_arithmetic);
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
