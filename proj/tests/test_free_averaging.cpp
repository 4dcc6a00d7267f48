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
#include "oracles.hpp"

using namespace ncergo;

namespace {

double vec_gap(const Element& a, const Element& b) { return (a.vec() - b.vec()).cwiseAbs().maxCoeff(); }

FreeAction cyclic_action() {
  const SpacePtr c4 = NcSpace::tracial(BlockStructure({1, 1, 1, 1}));
  return permutation_action(c4, {{1, 2, 3, 0}, {1, 2, 3, 0}});
}

}  // namespace

TEST_CASE("Nevo-Stein system") {
  for (int d : {2, 3}) {
    const auto ns = TransitionSystem::nevo_stein(d);
    REQUIRE(ns.size() == std::size_t(2 * d));
    CHECK(ns.labels() == oracle::labels(d));
    for (std::size_t i = 0; i < ns.size(); ++i) {
      CHECK(ns.stationary(i) == doctest::Approx(1.0 / (2 * d)));
      for (std::size_t j = 0; j < ns.size(); ++j) {
        const double want = ns.label(j) == -ns.label(i) ? 0.0 : 1.0 / (2 * d - 1);
        CHECK(ns.p(i, j) == doctest::Approx(want));
      }
    }
    CHECK(ns.nevo_stein_rank() == d);
  }
  CHECK_THROWS_AS(TransitionSystem::nevo_stein(1), FixtureError);
  RMatrix bad = RMatrix::Constant(2, 2, 0.6);
  CHECK_THROWS_AS(TransitionSystem({1, 2}, bad, RVector::Constant(2, 0.5)), FixtureError);
  CHECK_THROWS_AS(TransitionSystem::nevo_stein(2).index_of(0), InvalidArgument);
}

TEST_CASE("word enumeration") {
  const auto ns = TransitionSystem::nevo_stein(2);
  CHECK(enumerate_words(ns, 4).size() == 108);
  const auto i3 = enumerate_words(ns, 3);
  CHECK(i3.size() == 36);
  CHECK(enumerate_words(ns, 0).size() == 1);
  double total = 0.0;
  for (const auto& w : i3) total += word_weight(ns, w);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(enumerate_sphere(2, 3) == oracle::reduced_words(2, 3));
  CHECK(enumerate_sphere(3, 2).size() == 30);
  CHECK_THROWS_AS(enumerate_words(ns, 12, 1000), ResourceCapError);
}

TEST_CASE("free action") {
  FixtureRng rng(21);
  const SpacePtr sp = make_space(BlockStructure({2}), StateKind::kRandom, rng);
  const FreeAction a = random_free_action(sp, 2, rng);
  const Element x = random_element(sp->structure(), rng);
  const Element y = a.sigma(1).apply(a.sigma(-2).apply(x));
  CHECK(vec_gap(a.apply_word({1, -2}, x), y) < 1e-13);
  CHECK(vec_gap(a.sigma(-1).apply(a.sigma(1).apply(x)), x) < 1e-12);

  const SpacePtr d = NcSpace::diagonal(BlockStructure({2}), {(RVector(2) << 0.7, 0.3).finished()});
  Matrix swap = Matrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  CHECK_THROWS_AS(FreeAction(d, {CpMap::conjugation(d, Element({swap}))}), PreconditionError);
}

TEST_CASE("sphere averages") {
  FixtureRng rng(22);
  for (int d : {2, 3}) {
    const SpacePtr sp = make_space(BlockStructure({1, 2}), StateKind::kRandom, rng);
    const FreeAction a = random_free_action(sp, d, rng);
    const auto p = BufetovOperator::from_action(a, TransitionSystem::nevo_stein(d));
    const Element x = random_element(sp->structure(), rng);
    for (int n = 0; n <= 4; ++n) {
      const Element ref = oracle::brute_sphere(a, n, x);
      CHECK(vec_gap(sphere_average_brute(a, n, x), ref) < 1e-12);
      CHECK(vec_gap(sphere_average_fast(p, n, x), ref) < 1e-12);
      const CVector viam = oracle::sphere_matrix(a, n) * x.vec();
      CHECK((viam - ref.vec()).cwiseAbs().maxCoeff() < 1e-12);
    }
    // P^n(x~) componentwise by words.
    auto pn = p.lift(x);
    for (int n = 1; n <= 3; ++n) {
      pn = p.apply(pn);
      const auto brute = word_power_brute(p, n, x);
      for (std::size_t i = 0; i < pn.size(); ++i) CHECK(vec_gap(pn[i], brute[i]) < 1e-12);
    }
    for (int n : {1, 2, 5}) {
      Element acc = Element::zero(sp->structure());
      for (int k = 0; k < n; ++k) acc += oracle::brute_sphere(a, k, x);
      acc = acc * Complex(1.0 / n);
      CHECK(vec_gap(cesaro_average(p, n, x), acc) < 1e-12);
    }
  }
  // Permutation action: sphere averages stay inside the commutative algebra.
  const FreeAction c = cyclic_action();
  const Element x = Element::from_vec(c.space()->structure(),
                                      (CVector(4) << 0.3, -1.2, 0.7, 2.0).finished());
  for (int n = 0; n <= 5; ++n) {
    CHECK(vec_gap(sphere_average_brute(c, n, x), oracle::brute_sphere(c, n, x)) < 1e-13);
  }
}

TEST_CASE("Bufetov operator") {
  FixtureRng rng(23);
  const SpacePtr sp = make_space(BlockStructure({2}), StateKind::kRandom, rng);
  const int d = 2;
  const FreeAction a = random_free_action(sp, d, rng);
  const auto ns = TransitionSystem::nevo_stein(d);
  const auto p = BufetovOperator::from_action(a, ns);
  const Matrix dense = oracle::bufetov_matrix(a);
  CHECK((p.materialize().matrix() - dense).cwiseAbs().maxCoeff() < 1e-13);

  BufetovOperator::Tuple b;
  for (int i = 0; i < 2 * d; ++i) b.push_back(random_element(sp->structure(), rng));
  const auto pb = p.apply(b);
  CHECK((oracle::pack(pb) - dense * oracle::pack(b)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(std::abs(p.state(pb) - p.state(b)) < 1e-13);
  const auto one = p.lift(Element::identity(sp->structure()));
  for (const auto& c : p.apply(one)) {
    CHECK(vec_gap(c, Element::identity(sp->structure())) < 1e-13);
  }

  const auto closed = bufetov_adjoint(p);
  CHECK(closed.form() == BufetovForm::kColumn);
  std::vector<CpMap> comps;
  for (int l : ns.labels()) comps.push_back(a.sigma(l));
  const BufetovOperator generic_p(ns, comps);
  const auto generic = bufetov_adjoint(generic_p);
  const auto cb = closed.apply(b), gb = generic.apply(b);
  for (std::size_t i = 0; i < cb.size(); ++i) CHECK(vec_gap(cb[i], gb[i]) < 1e-11);

  const Matrix g = oracle::tuple_pairing(*sp, d);
  const Matrix adj = oracle::state_adjoint(dense, g, g);
  CHECK((oracle::pack(cb) - adj * oracle::pack(b)).cwiseAbs().maxCoeff() < 1e-11);
}
