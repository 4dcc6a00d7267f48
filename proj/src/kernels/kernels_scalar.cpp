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

#include <algorithm>
#include <cmath>

#include "ncergo/kernels.hpp"

namespace ncergo::kernels::scalar {

void axpy_real(std::size_t n, double a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = cplx(y[i].real() + a * x[i].real(), y[i].imag() + a * x[i].imag());
  }
}

void axpy_complex(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real();
  const double ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = cplx(y[i].real() + (ar * xr - ai * xi),
                y[i].imag() + (ar * xi + ai * xr));
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
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    best = std::max(best, std::sqrt(dr * dr + di * di));
  }
  return best;
}

double sum_sq_diff(std::size_t n, const cplx* a, const cplx* b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dr = a[i].real() - b[i].real();
    const double di = a[i].imag() - b[i].imag();
    acc += dr * dr + di * di;
  }
  return acc;
}

}  // namespace ncergo::kernels::scalar
