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

#include "stlid/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "stlid/csv.hpp"
#include "stlid/error.hpp"

namespace stlid {

double distance(const Coord& a, const Coord& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

MonitoringDataset::MonitoringDataset(std::vector<MonitoredPoint> points,
                                     std::vector<double> displacement,
                                     std::size_t num_steps,
                                     double step_interval_minutes,
                                     Step start_step)
    : points_(std::move(points)),
      displacement_(std::move(displacement)),
      num_steps_(num_steps),
      step_interval_(step_interval_minutes),
      start_step_(start_step) {
  if (num_steps_ < 2) throw DataError("dataset needs at least 2 time steps");
  if (points_.empty()) throw DataError("dataset has no monitored points");
  if (displacement_.size() != points_.size() * num_steps_)
    throw DataError("displacement matrix is " +
                    std::to_string(displacement_.size()) + " values, expected " +
                    std::to_string(points_.size()) + " x " +
                    std::to_string(num_steps_));
  if (!(step_interval_ > 0.0) || !std::isfinite(step_interval_))
    throw DataError("step interval must be positive");
  index_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.coord.x) || !std::isfinite(p.coord.y))
      throw DataError("point " + std::to_string(p.id) +
                      " has a non-finite coordinate");
    if (!index_.emplace(p.id, i).second)
      throw DataError("duplicate point id " + std::to_string(p.id));
  }
  for (std::size_t k = 0; k < displacement_.size(); ++k) {
    if (!std::isfinite(displacement_[k]))
      throw DataError("non-finite displacement at point " +
                      std::to_string(points_[k / num_steps_].id) + ", step " +
                      std::to_string(start_step_ +
                                     static_cast<Step>(k % num_steps_)));
  }
}

std::vector<Coord> MonitoringDataset::coords() const {
  std::vector<Coord> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.coord);
  return out;
}

std::vector<PointId> MonitoringDataset::ids() const {
  std::vector<PointId> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.id);
  return out;
}

std::size_t MonitoringDataset::index_of(PointId id) const {
  const auto it = index_.find(id);
  if (it == index_.end())
    throw PreconditionError("unknown point id " + std::to_string(id));
  return it->second;
}

double MonitoringDataset::displacement(std::size_t index, Step t) const {
  if (!has_step(t))
    throw PreconditionError("step " + std::to_string(t) +
                            " outside the dataset");
  return displacement_[index * num_steps_ +
                       static_cast<std::size_t>(t - start_step_)];
}

std::vector<double> MonitoringDataset::column(Step t) const {
  if (!has_step(t))
    throw PreconditionError("step " + std::to_string(t) +
                            " outside the dataset");
  const auto j = static_cast<std::size_t>(t - start_step_);
  std::vector<double> out(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i)
    out[i] = displacement_[i * num_steps_ + j];
  return out;
}

namespace {

void require_velocity_step(const MonitoringDataset& dataset, Step t) {
  if (t == dataset.start_step())
    throw PreconditionError("velocity undefined at the first step " +
                            std::to_string(t) + " (no predecessor)");
  if (!dataset.has_step(t) || t < dataset.start_step())
    throw PreconditionError("step " + std::to_string(t) +
                            " outside the dataset");
}

}  // namespace

double velocity_at(const MonitoringDataset& dataset, PointId point, Step t) {
  require_velocity_step(dataset, t);
  const auto i = dataset.index_of(point);
  return dataset.displacement(i, t) - dataset.displacement(i, t - 1);
}

KinematicSample sample_at(const MonitoringDataset& dataset, PointId point,
                          Step t) {
  require_velocity_step(dataset, t);
  const auto i = dataset.index_of(point);
  const double x = dataset.displacement(i, t);
  return {x, x - dataset.displacement(i, t - 1)};
}

std::vector<KinematicSample> samples_at(const MonitoringDataset& dataset,
                                        Step t) {
  require_velocity_step(dataset, t);
  const auto j = static_cast<std::size_t>(t - dataset.start_step());
  std::vector<KinematicSample> out(dataset.num_points());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto s = dataset.series(i);
    out[i] = {s[j], s[j] - s[j - 1]};
  }
  return out;
}

void GroundTruth::validate(const MonitoringDataset& dataset) const {
  for (const auto& r : regions) {
    if (!(r.rect.xmin < r.rect.xmax) || !(r.rect.ymin < r.rect.ymax))
      throw DataError("ground-truth region '" + r.label + "' is degenerate");
    if (!dataset.has_step(r.time_of_failure))
      throw DataError("time of failure " + std::to_string(r.time_of_failure) +
                      " of region '" + r.label + "' is outside the dataset");
  }
}

bool GroundTruth::inside_any(const Coord& c) const {
  return std::any_of(regions.begin(), regions.end(),
                     [&](const FailureRegion& r) { return r.rect.contains(c); });
}

// ---------------------------------------------------------------------------
// Synthetic scenario

void CreepScenarioSpec::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    throw ConfigError("scenario." + field + " " + why);
  };
  if (nx == 0 || ny == 0 || nx * ny < 2) bad("nx", "times scenario.ny must hold at least 2 points");
  if (!(spacing > 0.0)) bad("spacing", "must be positive");
  if (num_steps < 2) bad("num_steps", "must be at least 2");
  if (!(step_interval > 0.0)) bad("step_interval", "must be positive");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) bad("noise_sd", "must be >= 0");
  if (!std::isfinite(drift)) bad("drift", "must be finite");
  if (!(bowl_width > 0.0)) bad("bowl_width", "must be positive");
  if (!(edge_amplitude > 0.0 && edge_amplitude <= 1.0))
    bad("edge_amplitude", "must be in (0, 1]");
  if (!(amplitude_jitter >= 0.0)) bad("amplitude_jitter", "must be >= 0");
  if (has_steady_zone) {
    if (!(steady_zone.xmin < steady_zone.xmax) || !(steady_zone.ymin < steady_zone.ymax))
      bad("steady_zone", "must be a non-degenerate rectangle");
    if (!std::isfinite(steady_zone_rate)) bad("steady_zone_rate", "must be finite");
    if (has_region && steady_zone.xmin <= region.xmax && region.xmin <= steady_zone.xmax &&
        steady_zone.ymin <= region.ymax && region.ymin <= steady_zone.ymax)
      bad("steady_zone", "must not overlap the failure region");
  }
  if (!has_region) return;
  if (!(region.xmin < region.xmax) || !(region.ymin < region.ymax))
    bad("region", "must be a non-degenerate rectangle");
  const Step end = start_step + static_cast<Step>(num_steps);
  if (time_of_failure >= end)
    bad("time_of_failure", "must be before the last step (" + std::to_string(end) + ")");
  if (onset_step <= start_step) bad("onset_step", "must be after the first step");
  if (onset_step >= time_of_failure) bad("onset_step", "must be before scenario.time_of_failure");
  if (!(creep_rate >= 0.0)) bad("creep_rate", "must be >= 0");
  if (!(exponent > 0.0)) bad("exponent", "must be positive");
  if (!(transient_amplitude >= 0.0)) bad("transient_amplitude", "must be >= 0");
  if (!(transient_timescale > 0.0)) bad("transient_timescale", "must be positive");
}

double creep_velocity(const CreepScenarioSpec& spec, Step t) {
  if (t <= spec.start_step || t > spec.time_of_failure) return 0.0;
  const double u = static_cast<double>(t - spec.start_step);
  const double tau = spec.transient_timescale;
  const double transient = spec.transient_amplitude *
                           (std::exp(-(u - 1.0) / tau) - std::exp(-u / tau));
  if (t < spec.onset_step) return transient + spec.creep_rate;
  const double tau0 =
      static_cast<double>(spec.time_of_failure + 1 - spec.onset_step);
  const double remaining = static_cast<double>(spec.time_of_failure + 1 - t);
  return transient + spec.creep_rate * std::pow(tau0 / remaining, spec.exponent);
}

double creep_displacement(const CreepScenarioSpec& spec, Step t) {
  double sum = 0.0;
  for (Step u = spec.start_step + 1; u <= t; ++u) sum += creep_velocity(spec, u);
  return sum;
}

namespace {

// Box-Muller over raw 64-bit draws; std::normal_distribution is not
// reproducible across standard libraries.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

std::pair<MonitoringDataset, GroundTruth> generate_creep_scenario(
    const CreepScenarioSpec& spec) {
  spec.validate();
  const std::size_t n = spec.nx * spec.ny;
  const std::size_t steps = spec.num_steps;

  std::vector<MonitoredPoint> points(n);
  for (std::size_t iy = 0; iy < spec.ny; ++iy)
    for (std::size_t ix = 0; ix < spec.nx; ++ix) {
      const std::size_t i = iy * spec.nx + ix;
      points[i] = {static_cast<PointId>(i),
                   {static_cast<double>(ix) * spec.spacing,
                    static_cast<double>(iy) * spec.spacing}};
    }

  std::vector<double> creep(steps, 0.0);
  if (spec.has_region) {
    double sum = 0.0;
    for (std::size_t j = 1; j < steps; ++j) {
      sum += creep_velocity(spec, spec.start_step + static_cast<Step>(j));
      creep[j] = sum;
    }
  }

  NormalStream noise(spec.seed);
  // Amplitude draws use their own stream so the noise rows do not depend on
  // the zone geometry.
  NormalStream heterogeneity(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  auto bowl = [&](const Rect& r, const Coord& c) {
    const double dx = (c.x - 0.5 * (r.xmin + r.xmax)) / (0.5 * (r.xmax - r.xmin));
    const double dy = (c.y - 0.5 * (r.ymin + r.ymax)) / (0.5 * (r.ymax - r.ymin));
    const double shape =
        std::exp(-(dx * dx + dy * dy) / (2.0 * spec.bowl_width * spec.bowl_width));
    return (spec.edge_amplitude + (1.0 - spec.edge_amplitude) * shape) *
           std::exp(spec.amplitude_jitter * heterogeneity.next());
  };

  std::vector<double> matrix(n * steps);
  for (std::size_t i = 0; i < n; ++i) {
    double amplitude = 0.0, steady = 0.0;
    if (spec.has_region && spec.region.contains(points[i].coord))
      amplitude = bowl(spec.region, points[i].coord);
    else if (spec.has_steady_zone && spec.steady_zone.contains(points[i].coord))
      steady = spec.steady_zone_rate * bowl(spec.steady_zone, points[i].coord);
    double* row = matrix.data() + i * steps;
    for (std::size_t j = 0; j < steps; ++j) {
      double x = (spec.drift + steady) * static_cast<double>(j) + amplitude * creep[j];
      if (spec.noise_sd > 0.0) x += spec.noise_sd * noise.next();
      row[j] = x;
    }
  }

  GroundTruth truth;
  if (spec.has_region)
    truth.regions.push_back({spec.label, spec.region, spec.time_of_failure});
  MonitoringDataset dataset(std::move(points), std::move(matrix), steps,
                            spec.step_interval, spec.start_step);
  truth.validate(dataset);
  return {std::move(dataset), std::move(truth)};
}

// ---------------------------------------------------------------------------
// CSV I/O

MonitoringDataset load_dataset(const std::string& points_file,
                               const std::string& series_file,
                               double step_interval_minutes) {
  std::vector<MonitoredPoint> points;
  std::unordered_map<PointId, std::size_t> index;
  {
    csv::Reader reader(points_file, csv::schema_header("points"));
    std::vector<std::string_view> f;
    while (reader.next(f)) {
      if (f.size() != 3) reader.fail("expected 3 columns");
      MonitoredPoint p{reader.field_int(f, 0, "id"),
                       {reader.field_double(f, 1, "x"),
                        reader.field_double(f, 2, "y")}};
      if (!std::isfinite(p.coord.x) || !std::isfinite(p.coord.y))
        throw DataError(points_file + ":" + std::to_string(reader.line()) +
                        ": non-finite coordinate");
      if (!index.emplace(p.id, points.size()).second)
        throw ConsistencyError(points_file + ":" +
                               std::to_string(reader.line()) +
                               ": duplicate point id " + std::to_string(p.id));
      points.push_back(p);
    }
  }
  if (points.empty()) throw DataError(points_file + ": no points");

  // Per point: first step seen and values in step order.
  struct Row {
    Step first = 0;
    std::vector<double> values;
  };
  std::vector<Row> rows(points.size());
  {
    csv::Reader reader(series_file, csv::schema_header("series"));
    std::vector<std::string_view> f;
    while (reader.next(f)) {
      if (f.size() != 3) reader.fail("expected 3 columns");
      const PointId id = reader.field_int(f, 0, "id");
      const Step t = reader.field_int(f, 1, "t");
      const double v = reader.field_double(f, 2, "displacement");
      if (!std::isfinite(v))
        throw DataError(series_file + ":" + std::to_string(reader.line()) +
                        ": column 'displacement' (3) is not finite for point " +
                        std::to_string(id) + " at step " + std::to_string(t));
      const auto it = index.find(id);
      if (it == index.end())
        throw ConsistencyError(series_file + ":" +
                               std::to_string(reader.line()) +
                               ": unknown point id " + std::to_string(id));
      Row& row = rows[it->second];
      if (row.values.empty()) row.first = t;
      if (t != row.first + static_cast<Step>(row.values.size()))
        throw ConsistencyError(series_file + ":" +
                               std::to_string(reader.line()) +
                               ": steps of point " + std::to_string(id) +
                               " are not contiguous");
      row.values.push_back(v);
    }
  }

  const Step start = rows[0].first;
  const std::size_t steps = rows[0].values.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].values.empty())
      throw ConsistencyError("point " + std::to_string(points[i].id) +
                             " has no rows in " + series_file);
    if (rows[i].first != start || rows[i].values.size() != steps)
      throw ConsistencyError("point " + std::to_string(points[i].id) +
                             " covers different steps than point " +
                             std::to_string(points[0].id));
  }
  std::vector<double> matrix;
  matrix.reserve(points.size() * steps);
  for (auto& r : rows) matrix.insert(matrix.end(), r.values.begin(), r.values.end());
  return MonitoringDataset(std::move(points), std::move(matrix), steps,
                           step_interval_minutes, start);
}

void save_dataset(const MonitoringDataset& dataset,
                  const std::string& points_file,
                  const std::string& series_file) {
  {
    auto out = csv::open_output(points_file);
    out << csv::schema_header("points") << '\n';
    for (const auto& p : dataset.points())
      out << p.id << ',' << csv::format_double(p.coord.x) << ','
          << csv::format_double(p.coord.y) << '\n';
  }
  auto out = csv::open_output(series_file);
  out << csv::schema_header("series") << '\n';
  for (std::size_t i = 0; i < dataset.num_points(); ++i) {
    const auto id = dataset.points()[i].id;
    const auto s = dataset.series(i);
    for (std::size_t j = 0; j < s.size(); ++j)
      out << id << ',' << dataset.start_step() + static_cast<Step>(j) << ','
          << csv::format_double(s[j]) << '\n';
  }
  if (!out) throw IoError("failed writing " + series_file);
}

GroundTruth load_ground_truth(const std::string& path) {
  GroundTruth truth;
  csv::Reader reader(path, csv::schema_header("truth"));
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    if (f.size() != 6) reader.fail("expected 6 columns");
    FailureRegion r;
    r.label = std::string(f[0]);
    r.rect = {reader.field_double(f, 1, "xmin"), reader.field_double(f, 2, "ymin"),
              reader.field_double(f, 3, "xmax"), reader.field_double(f, 4, "ymax")};
    r.time_of_failure = reader.field_int(f, 5, "tof");
    if (!(r.rect.xmin < r.rect.xmax) || !(r.rect.ymin < r.rect.ymax))
      throw DataError(path + ":" + std::to_string(reader.line()) +
                      ": degenerate rectangle");
    truth.regions.push_back(std::move(r));
  }
  return truth;
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
  auto out = csv::open_output(path);
  out << csv::schema_header("truth") << '\n';
  for (const auto& r : truth.regions)
    out << r.label << ',' << csv::format_double(r.rect.xmin) << ','
        << csv::format_double(r.rect.ymin) << ','
        << csv::format_double(r.rect.xmax) << ','
        << csv::format_double(r.rect.ymax) << ',' << r.time_of_failure << '\n';
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace stlid
