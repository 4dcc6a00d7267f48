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

#include "doctest.h"
#include "ncergo/errors.hpp"
#include "ncergo/fixtures.hpp"
#include "ncergo/subalgebra.hpp"

using namespace ncergo;

namespace {

Element unit2(Eigen::Index i, Eigen::Index j) {
  Matrix m = Matrix::Zero(2, 2);
  m(i, j) = 1.0;
  return Element({m});
}

SpacePtr diag23() {
  return NcSpace::diagonal(BlockStructure({2}), {(RVector(2) << 2.0 / 3, 1.0 / 3).finished()});
}

}  // namespace

TEST_CASE("whitening") {
  FixtureRng rng(11);
  const BlockStructure s({2, 1});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  const Element a = random_element(s, rng), b = random_element(s, rng);
  CHECK(max_abs_diff(unwhiten(*sp, whiten(*sp, a)), a) < 1e-12);
  const Complex ip = whiten(*sp, b).dot(whiten(*sp, a));
  CHECK(std::abs(ip - gns_inner(*sp, a, b)) < 1e-12);
}

TEST_CASE("fixed point algebras") {
  FixtureRng rng(12);
  const SpacePtr sp = make_space(BlockStructure({1, 2}), StateKind::kRandom, rng);
  const std::vector<CpMap> id = {CpMap::identity(sp)};
  CHECK(fixed_point_algebra(sp, id).dim() == sp->vec_dim());

  const SpacePtr c4 = NcSpace::tracial(BlockStructure({1, 1, 1, 1}));
  const std::vector<CpMap> shift = {CpMap::block_permutation(c4, {1, 2, 3, 0})};
  const Subalgebra f = fixed_point_algebra(c4, shift);
  CHECK(f.dim() == 1);
  CHECK(f.span_residual(Element::identity(c4->structure())) < 1e-12);

  const SpacePtr m2 = NcSpace::tracial(BlockStructure({2}));
  Matrix z = Matrix::Identity(2, 2);
  z(1, 1) = -1.0;
  const std::vector<CpMap> conj = {CpMap::conjugation(m2, Element({z}))};
  const Subalgebra diag = fixed_point_algebra(m2, conj);
  CHECK(diag.dim() == 2);
  CHECK(diag.span_residual(unit2(0, 0)) < 1e-12);
  CHECK(diag.span_residual(unit2(0, 1)) > 0.1);

  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const std::vector<CpMap> bad = {CpMap::conjugation(diag23(), Element({x}))};
  CHECK_THROWS_AS(fixed_point_algebra(diag23(), bad), PreconditionError);
}

TEST_CASE("span and generation") {
  const SpacePtr m2 = NcSpace::tracial(BlockStructure({2}));
  const std::vector<Element> e12 = {unit2(0, 1)};
  CHECK_THROWS_AS(span_subalgebra(m2, e12), VerificationError);
  const Subalgebra full = generate_subalgebra(m2, e12);
  CHECK(full.dim() == 4);
  CHECK(check_closure(full).closed(1e-12));
  CHECK_THROWS_AS(generate_subalgebra(m2, e12, 2), ResourceCapError);

  const std::vector<Element> e11 = {unit2(0, 0)};
  const Subalgebra d = span_subalgebra(m2, e11);
  CHECK(d.dim() == 2);
  CHECK(check_closure(d).closed(1e-12));
  CHECK(generate_subalgebra(m2, e11).dim() == 2);

  const SpacePtr m3 = NcSpace::tracial(BlockStructure({3}));
  Matrix p = Matrix::Zero(3, 3);
  p(2, 2) = 1.0;
  const std::vector<Element> proj = {Element({p})};
  CHECK(generate_subalgebra(m3, proj).dim() == 2);
}

TEST_CASE("conditional expectations") {
  FixtureRng rng(13);
  const BlockStructure s({2, 2});
  const SpacePtr sp = make_space(s, StateKind::kRandom, rng);
  const Element x = random_element(s, rng);

  const Subalgebra scalars = span_subalgebra(sp, {});
  const CpMap e1 = conditional_expectation(sp, scalars);
  const Element expect = state_eval(*sp, x) * Element::identity(s);
  CHECK(max_abs_diff(e1.apply(x), expect) < 1e-12);

  const std::vector<CpMap> id = {CpMap::identity(sp)};
  const CpMap ea = conditional_expectation(sp, fixed_point_algebra(sp, id));
  CHECK((ea.matrix() - Matrix::Identity(s.vec_dim(), s.vec_dim())).cwiseAbs().maxCoeff() <
        1e-11);

  // Diagonal subalgebra under a diagonal state: pinching.
  const SpacePtr d = diag23();
  const std::vector<Element> e11 = {unit2(0, 0)};
  const CpMap pinch = conditional_expectation(d, span_subalgebra(d, e11));
  Matrix y(2, 2);
  y << 1.0, Complex(2.0, 1.0), Complex(-3.0, 0.5), 4.0;
  Matrix want = y;
  want(0, 1) = want(1, 0) = 0.0;
  CHECK((pinch.apply(Element({y})).block(0) - want).cwiseAbs().maxCoeff() < 1e-12);

  // span{1, sigma_x} is not invariant under the modular group of diag(2/3, 1/3).
  Matrix sx = Matrix::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1.0;
  const std::vector<Element> gen = {Element({sx})};
  const Subalgebra nonmod = span_subalgebra(d, gen);
  CHECK(modular_invariance_residual(nonmod) > 1e-3);
  CHECK_THROWS_AS(conditional_expectation(d, nonmod), PreconditionError);
}
