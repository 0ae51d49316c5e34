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

#include <string>
#include <vector>

#include "stlid/baselines.hpp"
#include "stlid/data.hpp"
#include "stlid/pipeline.hpp"

namespace stlid {

/// Every tunable of a run, settable through flat `key = value` text.
struct RunConfig {
  PipelineConfig pipeline;
  DbscanConfig dbscan;
  LofConfig lof;
  EdqConfig edq;
  /// Allowed excursion steps in the lead-time scan.
  std::size_t slack = 0;
  /// Minutes per step of datasets loaded from CSV.
  double step_interval = 2.5;
  CreepScenarioSpec scenario;

  void validate() const;
};

/// Sets one key. Throws ConfigError naming the key for unknown keys and
/// unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Applies a file of `key = value` lines; `#` starts a comment.
void load_config_file(RunConfig& config, const std::string& path);

/// Applies a `key=value` override.
void apply_override(RunConfig& config, const std::string& assignment);

/// Every key with its current value, one per line, readable by
/// load_config_file.
std::string format_config(const RunConfig& config);

std::vector<std::string> config_keys();

}  // namespace stlid
