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
#include "ncergo/rota.hpp"
#include "oracles.hpp"

using namespace ncergo;

namespace {

using Tuple = BufetovOperator::Tuple;

FreeAction cyclic_action() {
  const SpacePtr c4 = NcSpace::tracial(BlockStructure({1, 1, 1, 1}));
  return permutation_action(c4, {{1, 2, 3, 0}, {1, 2, 3, 0}});
}

Element cyclic_x(const FreeAction& a) {
  return Element::from_vec(a.space()->structure(),
                           (CVector(4) << 0.3, -1.2, 0.7, 2.0).finished());
}

Tuple random_tuple(const FreeAction& a, FixtureRng& rng) {
  Tuple b;
  for (int i = 0; i < 2 * a.d(); ++i) b.push_back(random_element(a.space()->structure(), rng));
  return b;
}

}  // namespace

TEST_CASE("operator identities") {
  FixtureRng rng(41);
  for (int d : {2, 3}) {
    const SpacePtr sp = make_space(BlockStructure({1, 2}), StateKind::kRandom, rng);
    const FreeAction a = random_free_action(sp, d, rng);
    std::vector<Tuple> samples = {random_tuple(a, rng), random_tuple(a, rng)};
    for (const auto& r : identity_suite(a, 6, samples)) {
      INFO(r.check);
      CHECK(r.pass);
    }
    const SymmetryU u(a);
    const Tuple b = samples.front();
    const Tuple uub = u.apply(u.apply(b));
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(max_abs_diff(uub[i], b[i]) < 1e-12);
    // Dense check of P*P = c1 UP + c2 Id with the explicit coefficients.
    const Matrix p = oracle::bufetov_matrix(a);
    const Matrix g = oracle::tuple_pairing(*sp, d);
    const Matrix ps = oracle::state_adjoint(p, g, g);
    const double c1 = (2.0 * d - 2) / (2.0 * d - 1), c2 = 1.0 / (2.0 * d - 1);
    const Matrix rhs = c1 * oracle::symmetry_matrix(a) * p +
                       c2 * Matrix::Identity(p.rows(), p.cols());
    CHECK((ps * p - rhs).cwiseAbs().maxCoeff() < 1e-11);

    std::vector<Element> xs = {random_element(sp->structure(), rng)};
    for (int n = 1; n <= 4; ++n) {
      for (const auto& r : spherical_recursion_check(a, n, xs)) CHECK(r.pass);
    }
  }
}

TEST_CASE("Rota iterates against a dense oracle") {
  FixtureRng rng(42);
  for (bool cyclic : {true, false}) {
    const FreeAction a = cyclic ? cyclic_action()
                                : random_free_action(make_space(BlockStructure({2}),
                                                                StateKind::kRandom, rng),
                                                     2, rng);
    const auto p = BufetovOperator::from_action(a, TransitionSystem::nevo_stein(2));
    const Tuple x = random_tuple(a, rng);
    IterationOptions opts;
    opts.n_max = 12;
    opts.stop_on_convergence = false;
    const RotaResult r = rota_iterate(p, x, opts);
    CHECK(r.final_n == 12);
    CHECK(r.consecutive.points.size() == 12);

    const Matrix pd = oracle::bufetov_matrix(a);
    const Matrix g = oracle::tuple_pairing(*a.space(), 2);
    const Matrix ps = oracle::state_adjoint(pd, g, g);
    CVector v = oracle::pack(x);
    for (int k = 0; k < 12; ++k) v = ps * v;
    for (int k = 0; k < 12; ++k) v = pd * v;
    CHECK((oracle::pack(r.final_iterate) - v).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("even and invariant expectations") {
  const FreeAction c = cyclic_action();
  const Element x = cyclic_x(c);
  const CpMap e2 = even_expectation(c);
  const CpMap e = invariant_expectation(c);
  const Element y = e2.apply(x);
  // Classical values: averages over the even and the full orbit.
  const CVector want2 = (CVector(4) << 0.5, 0.4, 0.5, 0.4).finished();
  CHECK((y.vec() - want2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((e.apply(x).vec() - CVector::Constant(4, 0.45)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_abs_diff(e2.apply(e.apply(x)), e.apply(x)) < 1e-12);
  CHECK(s1_squared_residual(c, y) < 1e-12);

  FixtureRng rng(43);
  const SpacePtr sp = make_space(BlockStructure({2, 1}), StateKind::kRandom, rng);
  const FreeAction a = random_free_action(sp, 2, rng);
  const Element z = random_element(sp->structure(), rng);
  const Element ez = even_expectation(a).apply(z);
  for (int i : {-2, -1, 1, 2}) {
    for (int j : {-2, -1, 1, 2}) {
      if (j == -i) continue;
      CHECK(max_abs_diff(a.apply_word({i, j}, ez), ez) < 1e-10);
    }
  }
  const Element iz = invariant_expectation(a).apply(z);
  CHECK(max_abs_diff(a.sigma(1).apply(iz), iz) < 1e-10);
  CHECK(max_abs_diff(even_expectation(a).apply(iz), iz) < 1e-10);
}

TEST_CASE("convergence series") {
  const FreeAction c = cyclic_action();
  const Element x = cyclic_x(c);
  IterationOptions opts;
  opts.n_max = 200;
  opts.stop_on_convergence = false;
  const LimitResult s = even_sphere_limit(c, x, opts);
  CHECK(s.series.points.size() == 201);
  CHECK(s.series.points.back().dist_op < 1e-8);
  REQUIRE(s.series.converged_at.has_value());

  opts.n_max = 100;
  const LimitResult ce = cesaro_limit(c, x, opts);
  CHECK(ce.series.points.size() == 100);
  // Error decays like 1/n.
  const double e50 = ce.series.points[49].dist_op, e100 = ce.series.points[99].dist_op;
  CHECK(e100 < e50);
  CHECK(e100 * 100 == doctest::Approx(e50 * 50).epsilon(0.2));

  const SpacePtr sp = c.space();
  const SeriesPoint pt = element_distance(*sp, 3, x, Element::zero(sp->structure()));
  CHECK(pt.n == 3);
  CHECK(pt.dist_op == doctest::Approx(2.0));
  CHECK(pt.dist_l1 == doctest::Approx((0.3 + 1.2 + 0.7 + 2.0) / 4));
}
