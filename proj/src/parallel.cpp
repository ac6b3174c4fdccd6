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

#include "cocur/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "cocur/error.hpp"

namespace cocur {

int threads_from_env() {
  const char* env = std::getenv("COCUR_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    const int v = std::stoi(env);
    if (v < 0) throw Error("COCUR_THREADS must be >= 0");
    return v;
  } catch (const std::logic_error&) {
    throw Error(std::string("COCUR_THREADS is not an integer: ") + env);
  }
}

std::size_t chunk_count(std::size_t n, int threads) {
  if (threads <= 1 || n == 0) return 1;
  return std::min<std::size_t>(static_cast<std::size_t>(threads), n);
}

void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = chunk_count(n, threads);
  if (chunks == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::jthread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace cocur
