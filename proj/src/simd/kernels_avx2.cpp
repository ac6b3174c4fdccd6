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

#include <immintrin.h>

#include "cocur/simd/kernels.hpp"

// Compiled with -mavx2 only; reached through avx2_kernels() after a CPU check.
// No FMA: element-wise kernels must round exactly like the scalar reference.

namespace cocur::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  if (i + 4 <= n) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    i += 4;
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double gather_sum_avx2(const double* base, const std::uint32_t* idx, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    // i32 gather sign-extends; table offsets stay below 2^31
    acc = _mm256_add_pd(acc, _mm256_i32gather_pd(base, vi, 8));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += base[idx[i]];
  return s;
}

double sum_sq_dev_avx2(const double* x, std::size_t n, double mean) {
  const __m256d m = _mm256_set1_pd(mean);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

void scale_avx2(double* x, std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

void clamp_min_avx2(double* x, std::size_t n, double lo) {
  const __m256d vlo = _mm256_set1_pd(lo);
  std::size_t i = 0;
  // max_pd(lo, x) returns x when x is NaN, matching std::max(x, lo)
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_max_pd(vlo, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] = x[i] < lo ? lo : x[i];
}

void lerp_avx2(double* dst, const double* other, std::size_t n, double w) {
  const double v = 1.0 - w;
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d vv = _mm256_set1_pd(v);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_mul_pd(vw, _mm256_loadu_pd(dst + i));
    const __m256d b = _mm256_mul_pd(vv, _mm256_loadu_pd(other + i));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(a, b));
  }
  for (; i < n; ++i) dst[i] = w * dst[i] + v * other[i];
}

void add_avx2(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
  for (; i < n; ++i) dst[i] += src[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2",     sum_avx2,       gather_sum_avx2, sum_sq_dev_avx2,
      scale_avx2, clamp_min_avx2, lerp_avx2,       add_avx2,
  };
  return table;
}

}  // namespace cocur::simd
