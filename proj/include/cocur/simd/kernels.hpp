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

// Data-parallel inner loops shared by the scorers, EM trainers and
// diagnostics. Every kernel has a scalar reference implementation; wider
// variants are picked at runtime from the CPU feature set and must agree
// with the reference (bitwise for element-wise kernels, to rounding for
// reductions).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace cocur::simd {

struct KernelTable {
  std::string_view name;

  double (*sum)(const double* x, std::size_t n);
  // sum of base[idx[k]] for k < n
  double (*gather_sum)(const double* base, const std::uint32_t* idx, std::size_t n);
  // sum of (x[k] - mean)^2
  double (*sum_sq_dev)(const double* x, std::size_t n, double mean);

  void (*scale)(double* x, std::size_t n, double a);
  void (*clamp_min)(double* x, std::size_t n, double lo);
  // dst = w * dst + (1 - w) * other
  void (*lerp)(double* dst, const double* other, std::size_t n, double w);
  // dst += src
  void (*add)(double* dst, const double* src, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();

// Chosen once per process. COCUR_SIMD=scalar forces the reference kernels.
const KernelTable& active_kernels();

inline double sum(std::span<const double> x) {
  return active_kernels().sum(x.data(), x.size());
}

inline double gather_sum(std::span<const double> base, std::span<const std::uint32_t> idx) {
  return active_kernels().gather_sum(base.data(), idx.data(), idx.size());
}

inline double sum_sq_dev(std::span<const double> x, double mean) {
  return active_kernels().sum_sq_dev(x.data(), x.size(), mean);
}

inline void scale(std::span<double> x, double a) {
  active_kernels().scale(x.data(), x.size(), a);
}

inline void clamp_min(std::span<double> x, double lo) {
  active_kernels().clamp_min(x.data(), x.size(), lo);
}

inline void lerp(std::span<double> dst, std::span<const double> other, double w) {
  active_kernels().lerp(dst.data(), other.data(), dst.size(), w);
}

inline void add(std::span<double> dst, std::span<const double> src) {
  active_kernels().add(dst.data(), src.data(), dst.size());
}

}  // namespace cocur::simd
