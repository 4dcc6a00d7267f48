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

#include <random>
#include <vector>

#include "doctest.h"
#include "ncergo/kernels.hpp"

namespace k = ncergo::kernels;
using k::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(nd(g), nd(g));
  return v;
}

double gap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

const std::size_t kLengths[] = {0, 1, 3, 7, 8, 9, 15, 16, 17, 64, 1023};

}  // namespace

TEST_CASE("scalar kernels match their definitions") {
  std::mt19937_64 g(3);
  const auto x = random_vec(5, g);
  auto y = random_vec(5, g);
  const auto y0 = y;
  k::scalar::axpy_complex(5, cplx(0.5, -2.0), x.data(), y.data());
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(y[i] - (y0[i] + cplx(0.5, -2.0) * x[i])) < 1e-15);
  }
  const auto m = random_vec(6, g);  // 2 x 3, column-major
  const auto v = random_vec(3, g);
  std::vector<cplx> out(2);
  k::scalar::matvec(2, 3, m.data(), v.data(), out.data());
  for (std::size_t r = 0; r < 2; ++r) {
    cplx acc = 0.0;
    for (std::size_t c = 0; c < 3; ++c) acc += m[c * 2 + r] * v[c];
    CHECK(std::abs(out[r] - acc) < 1e-14);
  }
}

TEST_CASE("every available kernel variant agrees with the scalar reference") {
  std::mt19937_64 g(11);
  for (k::Isa isa : {k::Isa::kScalar, k::Isa::kAvx2, k::Isa::kNeon}) {
    if (!k::isa_available(isa)) continue;
    k::force_isa(isa);
    CAPTURE(k::isa_name(isa));
    for (std::size_t n : kLengths) {
      CAPTURE(n);
      const auto x = random_vec(n, g);
      const auto y0 = random_vec(n, g);

      auto ya = y0, yb = y0;
      k::axpy_real(n, -1.25, x.data(), ya.data());
      k::scalar::axpy_real(n, -1.25, x.data(), yb.data());
      CHECK(gap(ya, yb) <= 1e-14);

      ya = y0;
      yb = y0;
      k::axpy_complex(n, cplx(0.3, 0.7), x.data(), ya.data());
      k::scalar::axpy_complex(n, cplx(0.3, 0.7), x.data(), yb.data());
      CHECK(gap(ya, yb) <= 1e-14);

      CHECK(k::max_abs_diff(n, x.data(), y0.data()) ==
            doctest::Approx(k::scalar::max_abs_diff(n, x.data(), y0.data())).epsilon(1e-15));
      CHECK(k::sum_sq_diff(n, x.data(), y0.data()) ==
            doctest::Approx(k::scalar::sum_sq_diff(n, x.data(), y0.data())).epsilon(1e-13));

      const std::size_t rows = n % 5 + 1;
      const auto m = random_vec(rows * n, g);
      std::vector<cplx> oa(rows), ob(rows);
      k::matvec(rows, n, m.data(), x.data(), oa.data());
      k::scalar::matvec(rows, n, m.data(), x.data(), ob.data());
      CHECK(gap(oa, ob) <= 1e-12);
    }
  }
  k::reset_isa();
}

TEST_CASE("forcing an unavailable variant is rejected") {
  for (k::Isa isa : {k::Isa::kAvx2, k::Isa::kNeon}) {
    if (k::isa_available(isa)) continue;
    CHECK_THROWS(k::force_isa(isa));
  }
  k::reset_isa();
}
