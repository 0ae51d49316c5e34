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

#include "stlid/pipeline.hpp"

namespace stlid {

/// Monitor state file: the pipeline checkpoint plus a caller-supplied
/// fingerprint of the dataset and configuration it belongs to.
struct MonitorState {
  std::string fingerprint;
  PipelineCheckpoint checkpoint;
};

std::string state_to_json(const MonitorState& state);
/// Throws ParseError for malformed JSON or missing fields.
MonitorState state_from_json(const std::string& text, const std::string& source = "state");

/// Writes through a temporary file and a rename, so an interrupted save
/// leaves the previous state intact.
void save_state(const MonitorState& state, const std::string& path);
MonitorState load_state(const std::string& path);

}  // namespace stlid
