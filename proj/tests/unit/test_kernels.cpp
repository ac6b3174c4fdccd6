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

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cocur/parallel.hpp"
#include "cocur/simd/kernels.hpp"

using namespace cocur;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Reorderings of a sum differ by at most n ulps of the absolute sum.
double sum_tolerance(const std::vector<double>& v) {
  double abs = 0.0;
  for (double x : v) abs += std::abs(x);
  return 1e-15 * abs * static_cast<double>(v.size() + 1) + 1e-300;
}

}  // namespace

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto* wide = simd::avx2_kernels();
  if (wide == nullptr) {
    MESSAGE("AVX2 kernels unavailable on this machine; comparing the scalar table with itself");
    wide = &simd::scalar_kernels();
  }
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(99);
  for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1023}) {
    CAPTURE(n);
    const auto x = random_values(rng, n);
    const auto y = random_values(rng, n);
    CHECK(std::abs(wide->sum(x.data(), n) - ref.sum(x.data(), n)) <= sum_tolerance(x));
    std::vector<double> sq;
    for (double v : x) sq.push_back((v - 0.3) * (v - 0.3));
    CHECK(std::abs(wide->sum_sq_dev(x.data(), n, 0.3) - ref.sum_sq_dev(x.data(), n, 0.3)) <= sum_tolerance(sq));

    const auto base = random_values(rng, 2000);
    std::vector<std::uint32_t> idx(n);
    for (auto& i : idx) i = static_cast<std::uint32_t>(rng() % base.size());
    std::vector<double> gathered;
    for (auto i : idx) gathered.push_back(base[i]);
    CHECK(std::abs(wide->gather_sum(base.data(), idx.data(), n) - ref.gather_sum(base.data(), idx.data(), n)) <=
          sum_tolerance(gathered));

    // Elementwise kernels are exact.
    auto a = x, b = x;
    wide->scale(a.data(), n, 1.7);
    ref.scale(b.data(), n, 1.7);
    CHECK(a == b);
    wide->clamp_min(a.data(), n, 0.1);
    ref.clamp_min(b.data(), n, 0.1);
    CHECK(a == b);
    wide->lerp(a.data(), y.data(), n, 0.25);
    ref.lerp(b.data(), y.data(), n, 0.25);
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
    wide->add(a.data(), y.data(), n);
    ref.add(b.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
  }
}

TEST_CASE("scalar kernel semantics") {
  const auto& k = simd::scalar_kernels();
  std::vector<double> v{1, -2, 3};
  CHECK(k.sum(v.data(), 3) == 2.0);
  CHECK(k.sum_sq_dev(v.data(), 3, 1.0) == 0.0 + 9.0 + 4.0);
  k.clamp_min(v.data(), 3, 0.0);
  CHECK(v == std::vector<double>{1, 0, 3});
  std::vector<double> other{3, 4, 5};
  k.lerp(v.data(), other.data(), 3, 0.5);  // v = w * v + (1 - w) * other
  CHECK(v == std::vector<double>{2, 2, 4});
  CHECK(!simd::active_kernels().name.empty());
}

TEST_CASE("parallel chunks cover the range in order") {
  for (int threads : {0, 1, 2, 5}) {
    for (std::size_t n : {0, 1, 4, 103}) {
      std::vector<int> hits(n, 0);
      std::vector<std::pair<std::size_t, std::size_t>> ranges(chunk_count(n, threads));
      parallel_chunks(n, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        ranges[c] = {b, e};
        for (std::size_t i = b; i < e; ++i) ++hits[i];
      });
      for (int h : hits) CHECK(h == 1);
      for (std::size_t c = 1; c < ranges.size(); ++c) CHECK(ranges[c].first == ranges[c - 1].second);
    }
  }
  CHECK(chunk_count(10, 0) == 1);
  CHECK(chunk_count(3, 8) == 3);
}

TEST_CASE("worker exceptions propagate") {
  CHECK_THROWS_AS(parallel_chunks(10, 3,
                                  [](std::size_t c, std::size_t, std::size_t) {
                                    if (c == 1) throw std::runtime_error("boom");
                                  }),
                  std::runtime_error);
}
