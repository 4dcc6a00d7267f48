// Copyright 2026 The ncergo Authors
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
#include <stdexcept>
#include <string>

#include "ncergo/kernels.hpp"

namespace ncergo::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(NCERGO_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

// -1 means "not yet selected".
std::atomic<int> g_selected{-1};

Isa selected() {
  int v = g_selected.load(std::memory_order_acquire);
  if (v < 0) {
    v = static_cast<int>(detect());
    g_selected.store(v, std::memory_order_release);
  }
  return static_cast<Isa>(v);
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

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
    case Isa::kNeon:
#if defined(NCERGO_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return selected(); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA not available: " +
                                std::string(isa_name(isa)));
  }
  g_selected.store(static_cast<int>(isa), std::memory_order_release);
}

void reset_isa() { g_selected.store(-1, std::memory_order_release); }

#if defined(NCERGO_BUILD_AVX2)
#define NCERGO_AVX2_CASE(call) \
  case Isa::kAvx2:             \
    return avx2::call;
#else
#define NCERGO_AVX2_CASE(call)
#endif

#if defined(NCERGO_BUILD_NEON)
#define NCERGO_NEON_CASE(call) \
  case Isa::kNeon:             \
    return neon::call;
#else
#define NCERGO_NEON_CASE(call)
#endif

#define NCERGO_DISPATCH(call)  \
  switch (selected()) {        \
    NCERGO_AVX2_CASE(call)     \
    NCERGO_NEON_CASE(call)     \
    default:                   \
      return scalar::call;     \
  }

void axpy_real(std::size_t n, double a, const cplx* x, cplx* y) {
  NCERGO_DISPATCH(axpy_real(n, a, x, y))
}

void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y) {
  NCERGO_DISPATCH(axpy_complex(n, a, x, y))
}

void matvec(std::size_t rows, std::size_t cols, const cplx* m, const cplx* x,
            cplx* y) {
  NCERGO_DISPATCH(matvec(rows, cols, m, x, y))
}

double max_abs_diff(std::size_t n, const cplx* a, const cplx* b) {
  NCERGO_DISPATCH(max_abs_diff(n, a, b))
}

double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b) {
  NCERGO_DISPATCH(sum_sq_diff(n, a, b))
}

}  // namespace ncergo::kernels
