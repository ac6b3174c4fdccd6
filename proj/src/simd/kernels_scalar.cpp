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

#include "cocur/simd/kernels.hpp"

#include <algorithm>

namespace cocur::simd {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double gather_sum_scalar(const double* base, const std::uint32_t* idx, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += base[idx[i]];
  return s;
}

double sum_sq_dev_scalar(const double* x, std::size_t n, double mean) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

void scale_scalar(double* x, std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void clamp_min_scalar(double* x, std::size_t n, double lo) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(x[i], lo);
}

void lerp_scalar(double* dst, const double* other, std::size_t n, double w) {
  const double v = 1.0 - w;
  for (std::size_t i = 0; i < n; ++i) dst[i] = w * dst[i] + v * other[i];
}

void add_scalar(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",       sum_scalar,       gather_sum_scalar, sum_sq_dev_scalar,
      scale_scalar,   clamp_min_scalar, lerp_scalar,       add_scalar,
  };
  return table;
}

}  // namespace cocur::simd
