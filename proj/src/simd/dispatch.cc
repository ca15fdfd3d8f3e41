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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "llsh/simd/kernels.h"
#include "simd/internal.h"

namespace llsh::simd {
namespace {

bool CpuHasAvx2() {
#if defined(LLSH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* Lookup(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &scalar_kernels();
    case Isa::kAvx2:
      return avx2_kernels();
    case Isa::kNeon:
      return neon_kernels();
  }
  return nullptr;
}

const Kernels* InitialChoice() {
  if (const char* env = std::getenv("LLSH_SIMD")) {
    const std::string_view name(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (name == isa_name(isa)) {
        if (const Kernels* k = Lookup(isa)) return k;
      }
    }
  }
  if (const Kernels* k = neon_kernels()) return k;
  if (const Kernels* k = avx2_kernels()) return k;
  return &scalar_kernels();
}

std::atomic<const Kernels*>& Active() {
  static std::atomic<const Kernels*> active{InitialChoice()};
  return active;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const Kernels* avx2_kernels() {
#if defined(LLSH_HAVE_AVX2)
  static const bool supported = CpuHasAvx2();
  return supported ? &internal::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels* neon_kernels() {
#if defined(__aarch64__)
  return &internal::neon_table();
#else
  return nullptr;
#endif
}

std::vector<const Kernels*> available_kernels() {
  std::vector<const Kernels*> out{&scalar_kernels()};
  if (const Kernels* k = avx2_kernels()) out.push_back(k);
  if (const Kernels* k = neon_kernels()) out.push_back(k);
  return out;
}

const Kernels& active_kernels() { return *Active().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) {
  const Kernels* k = Lookup(isa);
  if (k == nullptr) return false;
  Active().store(k);
  return true;
}

}  // namespace llsh::simd
