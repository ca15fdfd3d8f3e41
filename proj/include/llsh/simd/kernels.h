// Copyright 2026 The LLSH Authors.
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

// Inner-loop arithmetic shared by encoding, bucket scans and training.
//
// Each kernel has a scalar reference implementation and, where the build and
// the running CPU allow it, vectorized variants (AVX2+FMA on x86-64, NEON on
// AArch64). The variant is chosen once per process; LLSH_SIMD=scalar|avx2|neon
// in the environment overrides the choice. All variants accumulate in double
// precision and agree with the reference up to summation order.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace llsh::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct Kernels {
  Isa isa;
  // sum_i a[i] * b[i], float inputs widened to double.
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  // sum_i (a[i] - b[i])^2, differences taken in double.
  double (*squared_l2_f32)(const float* a, const float* b, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i a[i] * b[i] with a in double and b in float.
  double (*dot_f64_f32)(const double* a, const float* b, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks the feature.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// Every variant usable on this machine, scalar first.
std::vector<const Kernels*> available_kernels();

const Kernels& active_kernels();
// Switches the active variant; returns false (and changes nothing) when the
// requested variant is unavailable.
bool set_active_isa(Isa isa);

inline double dot(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return active_kernels().dot_f32(a.data(), b.data(), a.size());
}

inline double squared_l2(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return active_kernels().squared_l2_f32(a.data(), b.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().dot_f64(a.data(), b.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return active_kernels().dot_f64_f32(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_kernels().axpy_f64(alpha, x.data(), y.data(), x.size());
}

}  // namespace llsh::simd
