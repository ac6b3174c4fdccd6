// Copyright 2026 The cocur Authors
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

#include <cstddef>
#include <functional>

namespace cocur {

// Worker count from COCUR_THREADS; 0 (the default) is the sequential
// reference mode.
int threads_from_env();

// Splits [0, n) into `threads` contiguous chunks (fewer when n is small) and
// calls fn(chunk_index, begin, end) for each. Chunk boundaries depend only on
// n and threads, so per-chunk results reduced in chunk order are
// reproducible. threads <= 1 runs inline.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

std::size_t chunk_count(std::size_t n, int threads);

}  // namespace cocur
