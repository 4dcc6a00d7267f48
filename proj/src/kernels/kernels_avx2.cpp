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

// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; it must not include Eigen or any other inline-heavy header
// whose instantiations could leak wider instructions into baseline code.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "ncergo/kernels.hpp"

namespace ncergo::kernels::avx2 {
namespace {

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) {
  return _mm256_loadu_pd(reinterpret_cast<const double*>(p));
}
inline void store2(cplx* p, __m256d v) {
  _mm256_storeu_pd(reinterpret_cast<double*>(p), v);
}

// a * x for broadcast complex a, two lanes at once.
inline __m256d cmul(__m256d x, __m256d ar, __m256d ai) {
  const __m256d swapped = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(x, ar, _mm256_mul_pd(swapped, ai));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

}  // namespace

void axpy_real(std::size_t n, double a, const cplx* x, cplx* y) {
  // Real weight: treat the interleaved storage as 2n doubles.
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const std::size_t len = 2 * n;
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    const __m256d y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(xd + i),
                                       _mm256_loadu_pd(yd + i));
    const __m256d y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(xd + i + 4),
                                       _mm256_loadu_pd(yd + i + 4));
    _mm256_storeu_pd(yd + i, y0);
    _mm256_storeu_pd(yd + i + 4, y1);
  }
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(yd + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(xd + i),
                                             _mm256_loadu_pd(yd + i)));
  }
  for (; i < len; ++i) yd[i] += a * xd[i];
}

void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    store2(y + i, _mm256_add_pd(load2(y + i), cmul(load2(x + i), ar, ai)));
  }
  if (i < n) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = cplx(y[i].real() + (a.real() * xr - a.imag() * xi),
                y[i].imag() + (a.real() * xi + a.imag() * xr));
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
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = _mm256_sub_pd(load2(a + i), load2(b + i));
    const __m256d sq = _mm256_mul_pd(d, d);
    // [r0^2 + i0^2, same, r1^2 + i1^2, same]
    const __m256d mod2 = _mm256_hadd_pd(sq, sq);
    best = _mm256_max_pd(best, mod2);
  }
  double result = std::sqrt(hmax(best));
  for (; i < n; ++i) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    result = std::max(result, std::sqrt(dr * dr + di * di));
  }
  return result;
}

double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = _mm256_sub_pd(load2(a + i), load2(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double result = hsum(acc);
  for (; i < n; ++i) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    result += dr * dr + di * di;
  }
  return result;
}

}  // namespace ncergo::kernels::avx2
