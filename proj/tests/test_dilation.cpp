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
#include "ncergo/dilation.hpp"
#include "ncergo/errors.hpp"
#include "ncergo/fixtures.hpp"

using namespace ncergo;

namespace {

using Tuple = DilationTower::Tuple;

Tuple random_tuple(const DilationTower& t, int n, FixtureRng& rng) {
  Tuple b;
  for (std::size_t i = 0; i < t.level_size(n); ++i) {
    b.push_back(random_element(t.base()->structure(), rng));
  }
  return b;
}

// phi_n(a c) summed by hand from the weights.
Complex paired(const DilationTower& t, int n, const Tuple& a, const Tuple& c) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += t.weight(n, i) * state_eval(*t.base(), a[i] * c[i]);
  }
  return acc;
}

struct Fixture {
  FixtureRng rng{31};
  SpacePtr space = make_space(BlockStructure({2}), StateKind::kRandom, rng);
  FreeAction action = random_free_action(space, 2, rng);
  DilationTower tower{action, 2};
};

}  // namespace

TEST_CASE("tower shape and maps") {
  Fixture f;
  const auto& t = f.tower;
  CHECK(t.level_size(0) == 4);
  CHECK(t.level_size(1) == 12);
  CHECK(t.level_size(2) == 36);
  const auto& ls = t.system().labels();

  const Tuple b = random_tuple(t, 0, f.rng);
  const Tuple al = t.alpha(1, b), be = t.beta(1, b);
  for (std::size_t k = 0; k < t.level_size(1); ++k) {
    const Word& w = t.words(1)[k];
    CHECK(max_abs_diff(al[k], b[w[0]]) == 0.0);
    CHECK(max_abs_diff(be[k], f.action.sigma(ls[w[0]]).apply(b[w[1]])) < 1e-14);
  }
  CHECK(std::abs(t.state(1, al) - t.state(0, b)) < 1e-13);
  CHECK(std::abs(t.state(1, be) - t.state(0, b)) < 1e-13);
  CHECK(tuple_distance(t.alpha_star(1, al), b) < 1e-13);

  const Tuple c = random_tuple(t, 2, f.rng);
  const Tuple a1 = random_tuple(t, 1, f.rng);
  CHECK(std::abs(paired(t, 1, a1, t.alpha_star(2, c)) - paired(t, 2, t.alpha(2, a1), c)) < 1e-13);
  CHECK(std::abs(paired(t, 1, a1, t.beta_star(2, c)) - paired(t, 2, t.beta(2, a1), c)) < 1e-13);
}

TEST_CASE("embeddings") {
  Fixture f;
  const auto& t = f.tower;
  const Tuple b = random_tuple(t, 0, f.rng);
  for (int r = 0; r <= 2; ++r) {
    for (int q = 0; q <= r; ++q) {
      CHECK(tuple_distance(t.embed_J(q, r, b), t.embed_J_composed(q, r, b)) < 1e-12);
    }
  }
  CHECK(tuple_distance(t.embed_J(0, 2, b), t.alpha_chain(0, 2, b)) == 0.0);
  CHECK(tuple_distance(t.embed_J(2, 2, b), t.beta_chain(0, 2, b)) < 1e-13);

  const auto p = BufetovOperator::from_action(f.action, t.system());
  Tuple pn = b;
  for (int n = 1; n <= 2; ++n) {
    pn = p.apply(pn);
    CHECK(tuple_distance(power_via_tower(t, n, b), pn) < 1e-12);
  }
}

TEST_CASE("expectations and covariance") {
  Fixture f;
  const auto& t = f.tower;
  const Tuple c = random_tuple(t, 2, f.rng);
  CHECK(tuple_distance(t.expect_past(2, 2, c), c) < 1e-13);
  const Tuple e1 = t.expect_past(1, 2, c);
  CHECK(tuple_distance(t.expect_past(1, 2, e1), e1) < 1e-13);
  CHECK(tuple_distance(e1, t.expect_past_projection(1, 2, c)) < 1e-9);
  CHECK(tuple_distance(t.expect_future(1, 2, c), t.expect_future_projection(1, 2, c)) < 1e-9);

  const Tuple b = random_tuple(t, 0, f.rng);
  const auto p = BufetovOperator::from_action(f.action, t.system());
  // E_{1]} J_2(b) = J_1(P b).
  CHECK(tuple_distance(t.expect_past(1, 2, t.embed_J(2, 2, b)), t.embed_J(1, 2, p.apply(b))) < 1e-12);
  CHECK(tuple_distance(t.expect_future(0, 2, t.embed_J(0, 2, b)), t.embed_J(0, 2, b)) < 1e-12);

  for (auto [n, q] : {std::pair{0, 1}, {1, 1}, {0, 2}}) {
    CHECK(check_covariance(t, n, q, 2).pass);
  }
}

TEST_CASE("resource caps") {
  Fixture f;
  CHECK_THROWS_AS(DilationTower(f.action, 6, 1000), ResourceCapError);
  const DilationTower deep(f.action, 6);
  CHECK(deep.level_vec_dim(6) > kDenseDimCap);
  CHECK_THROWS_AS(deep.generated_subalgebra(0, 1, 6), ResourceCapError);
}
