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

// Interpolated n-gram probabilities recomputed from raw sentences on every
// query: the event list is rebuilt by scanning BOS-padded sentences, with no
// count tables shared with the library.

#include <cstdint>
#include <vector>

namespace oracle {

inline constexpr std::uint32_t kPad = 0xFFFFFFFFu;

struct NgramSetup {
  int order = 3;
  std::vector<double> weights;  // highest order first
  double alpha = 0.1;
  std::size_t vocab_size = 0;
};

// Unigram: (c(w) + alpha) / (N + alpha |V|). Order k >= 2: ML estimate of w
// after the k-1 preceding tokens, or the order k-1 value when that context
// never occurs. Result: sum_k weights[order - k] * P_k.
inline double ngram_prob(const std::vector<std::vector<std::uint32_t>>& sentences, const NgramSetup& setup,
                         std::vector<std::uint32_t> history, std::uint32_t w) {
  std::size_t n = 0, cw = 0;
  for (const auto& s : sentences)
    for (auto t : s) {
      ++n;
      cw += t == w;
    }
  std::vector<double> p(static_cast<std::size_t>(setup.order) + 1, 0.0);
  p[1] = (static_cast<double>(cw) + setup.alpha) /
         (static_cast<double>(n) + setup.alpha * static_cast<double>(setup.vocab_size));
  for (int k = 2; k <= setup.order; ++k) {
    std::vector<std::uint32_t> ctx(static_cast<std::size_t>(k - 1), kPad);
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(history.size()) - static_cast<std::ptrdiff_t>(ctx.size()) +
                               static_cast<std::ptrdiff_t>(i);
      if (h >= 0) ctx[i] = history[static_cast<std::size_t>(h)];
    }
    std::size_t total = 0, hit = 0;
    for (const auto& s : sentences) {
      std::vector<std::uint32_t> padded(ctx.size(), kPad);
      padded.insert(padded.end(), s.begin(), s.end());
      for (std::size_t j = ctx.size(); j < padded.size(); ++j) {
        bool match = true;
        for (std::size_t i = 0; i < ctx.size() && match; ++i) match = padded[j - ctx.size() + i] == ctx[i];
        if (!match) continue;
        ++total;
        hit += padded[j] == w;
      }
    }
    p[static_cast<std::size_t>(k)] =
        total == 0 ? p[static_cast<std::size_t>(k - 1)] : static_cast<double>(hit) / static_cast<double>(total);
  }
  double out = 0.0;
  for (int k = 1; k <= setup.order; ++k) out += setup.weights[static_cast<std::size_t>(setup.order - k)] * p[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace oracle
