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

// NEON variants for aarch64. Each float64x2_t holds one complex number.

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "ncergo/kernels.hpp"

namespace ncergo::kernels::neon {
namespace {

inline float64x2_t load1(const cplx* p) {
  return vld1q_f64(reinterpret_cast<const double*>(p));
}
inline void store1(cplx* p, float64x2_t v) {
  vst1q_f64(reinterpret_cast<double*>(p), v);
}

}  // namespace

void axpy_real(std::size_t n, double a, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const std::size_t len = 2 * n;
  const float64x2_t va = vdupq_n_f64(a);
  for (std::size_t i = 0; i < len; i += 2) {
    vst1q_f64(yd + i, vfmaq_f64(vld1q_f64(yd + i), va, vld1q_f64(xd + i)));
  }
}

void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y) {
  // [ar, ar] * [xr, xi] + [-ai, ai] * [xi, xr]
  const float64x2_t ar = vdupq_n_f64(a.real());
  const double ai_pair[2] = {-a.imag(), a.imag()};
  const float64x2_t ai = vld1q_f64(ai_pair);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t xv = load1(x + i);
    const float64x2_t swapped = vextq_f64(xv, xv, 1);
    float64x2_t acc = vfmaq_f64(load1(y + i), ar, xv);
    acc = vfmaq_f64(acc, ai, swapped);
    store1(y + i, acc);
  }
}

void matvec(std::size_t rows, std::size_t cols, const cplx* m, const cplx* x,
            cplx* y) {
  std::fill(y, y + rows, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < cols; ++j) {
    axpy_complex(rows, x[j], m + j * rows, y);
  }
}

double max_abs_diff(std::size_t n, const cplx* a, const cplx* b) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t d = vsubq_f64(load1(a + i), load1(b + i));
    best = std::max(best, vaddvq_f64(vmulq_f64(d, d)));
  }
  return std::sqrt(best);
}

double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t d = vsubq_f64(load1(a + i), load1(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  return vaddvq_f64(acc);
}

}  // namespace ncergo::kernels::neon
