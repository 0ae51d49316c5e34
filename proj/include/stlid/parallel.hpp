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
#include <cstddef>
#include <cstdint>

#include <omp.h>

namespace stlid {

/// Worker count for a requested degree; 0 means all available cores.
inline int resolve_threads(int requested) {
  return requested > 0 ? requested : std::max(1, omp_get_num_procs());
}

/// Static-partition parallel map over [0, n). `body(begin, end)` handles one
/// contiguous chunk and must only write to slots of its own indices, so the
/// result never depends on the number of workers or on scheduling.
template <class Body>
void parallel_chunks(std::size_t n, int threads, Body&& body) {
  threads = resolve_threads(threads);
  if (threads == 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  const auto chunks = static_cast<std::int64_t>(
      std::min<std::size_t>(n, static_cast<std::size_t>(threads) * 4));
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto begin = n * static_cast<std::size_t>(c) / static_cast<std::size_t>(chunks);
    const auto end = n * static_cast<std::size_t>(c + 1) / static_cast<std::size_t>(chunks);
    body(begin, end);
  }
}

}  // namespace stlid
