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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "ncergo/errors.hpp"
#include "ncergo/fixtures.hpp"
#include "ncergo/subalgebra.hpp"
#include "oracles.hpp"

using namespace ncergo;

namespace {

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

SpacePtr diag23() {
  return NcSpace::diagonal(BlockStructure({2}), {(RVector(2) << 2.0 / 3, 1.0 / 3).finished()});
}

double gap(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Transpose on M_2 as a vec-space matrix.
Matrix transpose_matrix() {
  Matrix t = Matrix::Zero(4, 4);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) t(i * 2 + j, j * 2 + i) = 1.0;
  }
  return t;
}

// Measure-and-prepare map x -> tr(s1 x) P + tr(s2 x) (1 - P) with
// a s1 + (1 - a) s2 = rho, a = phi(P): unital, CP, phi-preserving, and not
// commuting with the modular group when s1 does not commute with rho.
CpMap measure_prepare(const SpacePtr& sp) {
  const Matrix rho = sp->rho().block(0);
  Eigen::Vector2cd g(std::cos(0.4), Complex(0.0, std::sin(0.4)));
  const Matrix proj = g * g.adjoint();
  const double a = (g.adjoint() * rho * g)(0, 0).real();
  const Matrix h = mat2(0.0, Complex(0.05, 0.02), Complex(0.05, -0.02), 0.0);
  const Matrix s1 = rho + h;
  const Matrix s2 = (rho - a * s1) / (1.0 - a);
  const auto& st = sp->structure();
  Matrix m(4, 4);
  for (Eigen::Index c = 0; c < 4; ++c) {
    const Matrix x = Element::matrix_unit(st, c).block(0);
    const Matrix y = (s1 * x).trace() * proj +
                     (s2 * x).trace() * (Matrix::Identity(2, 2) - proj);
    m.col(c) = Element({y}).vec();
  }
  return CpMap(sp, sp, m);
}

}  // namespace

TEST_CASE("application") {
  FixtureRng rng(1);
  const BlockStructure s({2, 1});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  const Element x = random_element(s, rng);
  CHECK(max_abs_diff(CpMap::identity(sp).apply(x), x) == 0.0);

  const Element u = commuting_unitary(*sp, rng);
  const Element h = random_hermitian(s, rng);
  const Element y = CpMap::conjugation(sp, u).apply(h);
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> a(h.block(k)), b(y.block(k));
    CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
  }

  const BlockStructure m3({3});
  const SpacePtr sp3 = NcSpace::tracial(m3);
  std::vector<Matrix> ops;
  for (int i = 0; i < 3; ++i) ops.push_back(random_element(m3, rng).block(0));
  const CpMap kq = CpMap::kraus(sp3, sp3, ops);
  const Element z = random_element(m3, rng);
  Matrix direct = Matrix::Zero(3, 3);
  for (const auto& k : ops) direct += k * z.block(0) * k.adjoint();
  CHECK(gap(kq.apply(z).block(0), direct) < 1e-13);
  CHECK_THROWS_AS(CpMap(sp3, sp3, Matrix::Zero(4, 4)), ShapeError);
}

TEST_CASE("complete positivity") {
  FixtureRng rng(2);
  const BlockStructure s({2});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  const CpMap c1 = CpMap::conjugation(sp, commuting_unitary(*sp, rng));
  CHECK(is_completely_positive(c1).completely_positive);

  const CpWitness t = is_completely_positive(CpMap(sp, sp, transpose_matrix()));
  CHECK_FALSE(t.completely_positive);
  CHECK(t.min_choi_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));
  // Unnormalized Choi matrix sum E_ij (x) T(E_ij) is the swap: minimum -1.
  Matrix choi = Matrix::Zero(4, 4);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      Matrix e = Matrix::Zero(2, 2);
      e(i, j) = 1.0;
      choi.block(i * 2, j * 2, 2, 2) = e.transpose();
    }
  }
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(choi).eigenvalues().minCoeff() ==
        doctest::Approx(-1.0));

  const CpMap c2 = CpMap::conjugation(sp, commuting_unitary(*sp, rng));
  const std::vector<CpMap> maps = {c1, c2};
  const std::vector<double> w = {0.3, 0.7};
  CHECK(is_completely_positive(CpMap::combination(maps, w)).completely_positive);
}

TEST_CASE("stationarity") {
  FixtureRng rng(3);
  const BlockStructure s({2});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  CHECK(check_stationary(CpMap::conjugation(sp, commuting_unitary(*sp, rng))).stationary());

  const auto d = diag23();
  const auto swap = check_stationary(
      CpMap::conjugation(d, Element({mat2(0.0, 1.0, 1.0, 0.0)})));
  CHECK_FALSE(swap.stationary());
  CHECK_FALSE(swap.preserves_state);

  const auto mp = check_stationary(measure_prepare(d));
  CHECK(mp.preserves_state);
  CHECK_FALSE(mp.commutes_with_modular);

  // On a tracial space any state-preserving map is stationary.
  const SpacePtr tr = NcSpace::tracial(s);
  const Element u = random_element(s, rng);
  Eigen::HouseholderQR<Matrix> qr(u.block(0));
  const Matrix q = qr.householderQ();
  CHECK(check_stationary(CpMap::conjugation(tr, Element({q}))).stationary());
}

TEST_CASE("state adjoint") {
  FixtureRng rng(4);
  const BlockStructure s({1, 2});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  const CpMap sigma = stationary_automorphism(sp, rng);
  CHECK(gap(adjoint_wrt_states(sigma).matrix(), sigma.inverse().matrix()) < 1e-12);
  const CpMap id = CpMap::identity(sp);
  CHECK(gap(adjoint_wrt_states(id).matrix(), id.matrix()) < 1e-13);

  // Tracial M_3: compare with the defining linear system solved directly.
  const BlockStructure m3({3});
  const SpacePtr tr = NcSpace::tracial(m3);
  const CpMap q = stationary_map(tr, rng);
  const Matrix g = oracle::pairing(*tr);
  CHECK(gap(adjoint_wrt_states(q).matrix(), oracle::state_adjoint(q.matrix(), g, g)) < 1e-12);

  const CpMap qs = adjoint_wrt_states(stationary_map(sp, rng));
  CHECK(is_completely_positive(qs).completely_positive);
  CHECK(unital_residual(qs) < 1e-12);

  CHECK_THROWS_AS(adjoint_wrt_states(measure_prepare(diag23())), PreconditionError);
}

TEST_CASE("KMS adjoint") {
  FixtureRng rng(5);
  const BlockStructure s({2, 2});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  const CpMap q = stationary_map(sp, rng, 3, true);
  CHECK(gap(kms_adjoint(q).matrix(), adjoint_wrt_states(q).matrix()) < 1e-10);
  const CpMap id = CpMap::identity(sp);
  CHECK(gap(kms_adjoint(id).matrix(), id.matrix()) < 1e-12);

  // Non-modular example: tr(r^{1/2} R(b) r^{1/2} a) = tr(r^{1/2} b r^{1/2} Q(a)).
  const auto d = diag23();
  const CpMap mp = measure_prepare(d);
  const CpMap r = kms_adjoint(mp);
  const Matrix h = d->rho_power(0.5).block(0);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const Element a = Element::matrix_unit(d->structure(), i);
    for (Eigen::Index j = 0; j < 4; ++j) {
      const Element b = Element::matrix_unit(d->structure(), j);
      const Complex lhs = (h * r.apply(b).block(0) * h * a.block(0)).trace();
      const Complex rhs = (h * b.block(0) * h * mp.apply(a).block(0)).trace();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  CHECK(worst < 1e-12);
  CHECK(unital_residual(r) < 1e-12);
  CHECK(is_completely_positive(r).completely_positive);
}

TEST_CASE("Lp extension norm check") {
  FixtureRng rng(6);
  const BlockStructure s({1, 2});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  std::vector<Element> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(random_hermitian(s, rng));
  const double inf = std::numeric_limits<double>::infinity();
  const CpMap id = CpMap::identity(sp);
  const CpMap q = stationary_map(sp, rng);
  for (double p : {1.0, 2.0, 4.0, inf}) {
    const LpIndex ix = std::isinf(p) ? LpIndex::infinity() : LpIndex(p);
    const auto ri = lp_extension_norm_check(id, ix, xs);
    for (double v : ri.ratios) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    const auto rq = lp_extension_norm_check(q, ix, xs);
    CHECK(rq.pass);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double oracle_ratio =
          oracle::lp_norm(*sp, p, q.apply(xs[i])) / oracle::lp_norm(*sp, p, xs[i]);
      CHECK(rq.ratios[i] == doctest::Approx(oracle_ratio).epsilon(1e-10));
      CHECK(oracle_ratio <= 1.0 + 1e-10);
    }
  }
  // Conditional expectation, p = 2: orthogonal projection in GNS.
  const CpMap sigma = stationary_automorphism(sp, rng);
  const CpMap e = conditional_expectation(sp, fixed_point_algebra(sp, std::vector<CpMap>{sigma}));
  for (double v : lp_extension_norm_check(e, LpIndex(2.0), xs).ratios) CHECK(v <= 1.0 + 1e-12);

  // 2 * identity violates Q(1) <= 1.
  const CpMap twice(sp, sp, 2.0 * Matrix::Identity(sp->vec_dim(), sp->vec_dim()));
  CHECK_THROWS_AS(lp_extension_norm_check(twice, LpIndex(2.0), xs), PreconditionError);
}
