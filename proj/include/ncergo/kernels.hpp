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

#pragma once

// Data-parallel inner loops over interleaved complex<double> storage.
//
// Every kernel has a scalar reference implementation and, where the build
// and the running CPU allow it, an AVX2+FMA (x86-64) or NEON (aarch64)
// variant. The dispatched entry points pick the best variant once, on first
// use. All variants must agree with the scalar reference up to rounding
// (FMA contraction changes the last bits); tests/test_kernels.cpp pins that.

#include <complex>
#include <cstddef>
#include <string_view>

namespace ncergo::kernels {

using cplx = std::complex<double>;

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

/// The variant the dispatched entry points use.
Isa active_isa();

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Forces the dispatched entry points onto `isa` (tests and benchmarks).
/// Throws std::invalid_argument if the ISA is unavailable.
void force_isa(Isa isa);

/// Restores automatic selection.
void reset_isa();

// ---------------------------------------------------------------------------
// Dispatched entry points.

/// y[i] += a * x[i] for a real weight a.
void axpy_real(std::size_t n, double a, const cplx* x, cplx* y);

/// y[i] += a * x[i] for a complex weight a.
void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y);

/// y = M x with M column-major (rows x cols). y must not alias x.
void matvec(std::size_t rows, std::size_t cols, const cplx* m, const cplx* x,
            cplx* y);

/// max_i |a[i] - b[i]|.
double max_abs_diff(std::size_t n, const cplx* a, const cplx* b);

/// sum_i |a[i] - b[i]|^2.
double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b);

// ---------------------------------------------------------------------------
// Per-ISA variants, exposed for equivalence testing.

namespace scalar {
void axpy_real(std::size_t n, double a, const cplx* x, cplx* y);
void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y);
void matvec(std::size_t rows, std::size_t cols, const cplx* m, const cplx* x,
            cplx* y);
double max_abs_diff(std::size_t n, const cplx* a, const cplx* b);
double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b);
}  // namespace scalar

#if defined(NCERGO_BUILD_AVX2)
namespace avx2 {
void axpy_real(std::size_t n, double a, const cplx* x, cplx* y);
void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y);
void matvec(std::size_t rows, std::size_t cols, const cplx* m, const cplx* x,
            cplx* y);
double max_abs_diff(std::size_t n, const cplx* a, const cplx* b);
double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b);
}  // namespace avx2
#endif

#if defined(NCERGO_BUILD_NEON)
namespace neon {
void axpy_real(std::size_t n, double a, const cplx* x, cplx* y);
void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y);
void matvec(std::size_t rows, std::size_t cols, const cplx* m, const cplx* x,
            cplx* y);
double max_abs_diff(std::size_t n, const cplx* a, const cplx* b);
double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b);
}  // namespace neon
#endif

}  // namespace ncergo::kernels
