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

#include "ncergo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "ncergo/dilation.hpp"
#include "ncergo/experiment.hpp"
#include "ncergo/fixtures.hpp"
#include "ncergo/rota.hpp"

namespace ncergo::cli {
namespace {

using nlohmann::json;
using BTuple = BufetovOperator::Tuple;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

double worst(const std::vector<ResidualRecord>& rs) {
  double w = 0.0;
  for (const auto& r : rs) w = std::max(w, r.residual);
  return w;
}

bool all_pass(const std::vector<ResidualRecord>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const auto& r) { return r.pass; });
}

void finish(CriterionResult& c) {
  c.pass = all_pass(c.records);
  std::size_t failed = 0;
  for (const auto& r : c.records) failed += r.pass ? 0 : 1;
  c.detail = std::to_string(c.records.size()) + " checks, " + std::to_string(failed) +
             " failed, worst residual " + sci(worst(c.records));
}

BTuple random_tuple(std::size_t m, const BlockStructure& s, FixtureRng& rng) {
  BTuple t;
  for (std::size_t i = 0; i < m; ++i) t.push_back(random_element(s, rng));
  return t;
}

// 4-point cyclic fixture: C^4, uniform state, both generators the shift.
FreeAction cyclic_fixture() {
  const BlockStructure s({1, 1, 1, 1});
  SpacePtr space = NcSpace::tracial(s);
  const std::vector<int> shift = {1, 2, 3, 0};
  return permutation_action(space, {shift, shift});
}

Element cyclic_vector(const std::vector<double>& v) {
  std::vector<Matrix> blocks;
  for (double x : v) blocks.push_back(Matrix::Constant(1, 1, Complex(x, 0.0)));
  return Element(std::move(blocks));
}

// ---------------------------------------------------------------------------

CriterionResult criterion1(std::uint64_t seed) {
  CriterionResult c{1, "Bufetov reduction: brute sphere average = fast", false, "", {}, 0};
  FixtureRng rng(seed);
  const BlockStructure s({2});
  for (StateKind kind : {StateKind::kTracial, StateKind::kRandom}) {
    const SpacePtr space = make_space(s, kind, rng);
    const FreeAction action = random_free_action(space, 2, rng);
    const auto p = BufetovOperator::from_action(action, TransitionSystem::nevo_stein(2));
    std::vector<Element> xs;
    for (int i = 0; i < 20; ++i) xs.push_back(random_element(s, rng));
    for (int n = 1; n <= 5; ++n) {
      double w = 0.0;
      for (const auto& x : xs) {
        w = std::max(w, op_distance(sphere_average_brute(action, n, x),
                                    sphere_average_fast(p, n, x)));
      }
      c.records.push_back(make_record(
          kind == StateKind::kTracial ? "tracial: brute vs fast" : "random state: brute vs fast",
          {n}, w, 1e-10));
    }
  }
  finish(c);
  return c;
}

CriterionResult criterion2(std::uint64_t seed) {
  CriterionResult c{2, "Identity suite for d = 2, 3", false, "", {}, 0};
  FixtureRng rng(seed);
  const BlockStructure s({2});
  for (int d : {2, 3}) {
    const SpacePtr space = make_space(s, StateKind::kRandom, rng);
    const FreeAction action = random_free_action(space, d, rng);
    std::vector<BTuple> tuples;
    for (int i = 0; i < 3; ++i) tuples.push_back(random_tuple(2 * std::size_t(d), s, rng));
    std::vector<Element> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(random_element(s, rng));
    auto recs = identity_suite(action, 4, tuples, 1e-10);
    for (int n = 1; n <= 4; ++n) {
      const auto more = spherical_recursion_check(action, n, xs, 1e-10);
      recs.insert(recs.end(), more.begin(), more.end());
    }
    for (auto& r : recs) {
      r.check = "d=" + std::to_string(d) + ": " + r.check;
      c.records.push_back(std::move(r));
    }
  }
  finish(c);
  return c;
}

CriterionResult criterion3(std::uint64_t seed) {
  CriterionResult c{3, "Dilation equalities at depth 3", false, "", {}, 0};
  FixtureRng rng(seed);
  const BlockStructure s({2});
  const SpacePtr space = make_space(s, StateKind::kRandom, rng);
  const FreeAction action = random_free_action(space, 2, rng);
  constexpr int r = 3;
  constexpr double tol = 1e-9;
  const DilationTower tower(action, r);
  const auto p = BufetovOperator::from_action(action, tower.system());
  const auto ps = bufetov_adjoint(p);
  const auto nb = tower.level_vec_dim(0);

  for (int n = 0; n <= r; ++n) {
    for (int q = n; q <= r; ++q) {
      double w = 0.0;
      for (Eigen::Index i = 0; i < nb; ++i) {
        const BTuple b = tower.basis_tuple(0, i);
        BTuple pb = b;
        for (int k = 0; k < q - n; ++k) pb = p.apply(pb);
        w = std::max(w, tuple_distance(tower.expect_past(n, r, tower.embed_J(q, r, b)),
                                       tower.embed_J(n, r, pb)));
      }
      c.records.push_back(make_record("E_{n]} J_q = J_n P^{q-n}", {n, q}, w, tol));
    }
  }
  for (int n = 0; n <= r; ++n) {
    double w = 0.0;
    for (Eigen::Index i = 0; i < nb; ++i) {
      const BTuple b = tower.basis_tuple(0, i);
      BTuple pb = b;
      for (int k = 0; k < n; ++k) pb = ps.apply(pb);
      w = std::max(w, tuple_distance(tower.expect_future(n, r, tower.embed_J(0, r, b)),
                                     tower.embed_J(n, r, pb)));
    }
    c.records.push_back(make_record("E_{[n} J_0 = J_n (P*)^n", {n}, w, tol));
  }
  for (int n = 0; n <= r; ++n) {
    for (int q = 0; n + q <= r; ++q) {
      c.records.push_back(check_covariance(tower, n, q, r, tol));
    }
  }
  for (int n = 0; n <= r; ++n) {
    const Subalgebra fut = tower.generated_subalgebra(n, r, r);
    double w = 0.0;
    for (Eigen::Index i = 0; i < tower.level_vec_dim(r); ++i) {
      const BTuple cc = tower.basis_tuple(r, i);
      w = std::max(w, tuple_distance(tower.expect_future(n, r, cc),
                                     tower.unpack(r, fut.project(tower.pack(r, cc)))));
    }
    c.records.push_back(make_record("expect_future: beta path = GNS projection", {n}, w, tol));
  }
  finish(c);
  return c;
}

CriterionResult criterion4(std::uint64_t seed) {
  CriterionResult c{4, "Adjoint correctness", false, "", {}, 0};
  FixtureRng rng(seed);
  const std::vector<std::vector<int>> shapes = {{2}, {1, 2}, {2, 2}, {3, 1}, {1, 1, 2}};
  double pairing = 0.0, involution = 0.0, kms = 0.0;
  for (int m = 0; m < 20; ++m) {
    const BlockStructure s(shapes[std::size_t(m) % shapes.size()]);
    const SpacePtr space = make_space(s, StateKind::kRandom, rng);
    const CpMap q = stationary_map(space, rng, 3, m % 2 == 1);
    const CpMap qs = adjoint_wrt_states(q);
    for (Eigen::Index ia = 0; ia < s.vec_dim(); ++ia) {
      const Element a = Element::matrix_unit(s, ia);
      const Element qa = q.apply(a);
      for (Eigen::Index ib = 0; ib < s.vec_dim(); ++ib) {
        const Element b = Element::matrix_unit(s, ib);
        pairing = std::max(pairing, std::abs(state_eval(*space, qs.apply(b) * a) -
                                             state_eval(*space, b * qa)));
      }
    }
    involution = std::max(
        involution, (adjoint_wrt_states(qs).matrix() - q.matrix()).cwiseAbs().maxCoeff());
    kms = std::max(kms, (kms_adjoint(q).matrix() - qs.matrix()).cwiseAbs().maxCoeff());
  }
  c.records.push_back(make_record("defining pairing on matrix units", {20}, pairing, 1e-11));
  c.records.push_back(make_record("(Q*)* = Q", {20}, involution, 1e-10));
  c.records.push_back(make_record("kms adjoint = state adjoint", {20}, kms, 1e-10));

  const BlockStructure m2({2});
  const SpacePtr space = make_space(m2, StateKind::kRandom, rng);
  Matrix t = Matrix::Zero(4, 4);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) t(i * 2 + j, j * 2 + i) = 1.0;
  }
  const CpWitness w = is_completely_positive(CpMap(space, space, t));
  // Residual is the Choi minimum itself, required below -0.1.
  c.records.push_back({"transpose flagged non-CP", {}, w.min_choi_eigenvalue, -0.1,
                       !w.completely_positive && w.min_choi_eigenvalue < -0.1});
  finish(c);
  return c;
}

CriterionResult criterion5(std::uint64_t seed) {
  CriterionResult c{5, "Lp contraction", false, "", {}, 0};
  FixtureRng rng(seed);
  const BlockStructure s({1, 2});
  const SpacePtr space = make_space(s, StateKind::kRandom, rng);
  std::vector<Element> samples;
  for (int i = 0; i < 50; ++i) samples.push_back(random_hermitian(s, rng));
  const double inf = std::numeric_limits<double>::infinity();
  for (double p : {1.0, 2.0, 4.0, inf}) {
    double ratio = 0.0;
    for (int m = 0; m < 10; ++m) {
      FixtureRng map_rng(seed * 1000 + std::uint64_t(m));
      const CpMap q = stationary_map(space, map_rng, 3, m % 2 == 1);
      const auto rep = lp_extension_norm_check(
          q, std::isinf(p) ? LpIndex::infinity() : LpIndex(p), samples);
      ratio = std::max(ratio, rep.max_ratio);
    }
    c.records.push_back(make_record("max norm ratio - 1", {std::isinf(p) ? -1 : int(p)},
                                    std::max(0.0, ratio - 1.0), 1e-10));
  }
  finish(c);
  return c;
}

// Classical oracle for the Rota iteration on the cyclic fixture: B is the
// function space on 16 states (label, point) and P a stochastic matrix.
RVector classical_rota_limit(const TransitionSystem& sys, const RVector& x0, int n) {
  const int m = static_cast<int>(sys.size());
  const int pts = 4;
  const int d = m / 2;
  RMatrix k = RMatrix::Zero(m * pts, m * pts);
  for (int i = 0; i < m; ++i) {
    const int li = sys.label(std::size_t(i));
    const int step = li > 0 ? 1 : pts - 1;
    for (int v = 0; v < pts; ++v) {
      for (int j = 0; j < m; ++j) {
        if (sys.label(std::size_t(j)) == -li) continue;
        k(i * pts + v, j * pts + (v + step) % pts) += 1.0 / (2 * d - 1);
      }
    }
  }
  // Uniform invariant measure, so the adjoint is the transpose.
  const RMatrix ks = k.transpose();
  RVector y = x0;
  for (int j = 0; j < n; ++j) y = ks * y;
  for (int j = 0; j < n; ++j) y = k * y;
  return y;
}

CriterionResult criterion6(std::uint64_t) {
  CriterionResult c{6, "Convergence on the 4-point cyclic fixture", false, "", {}, 0};
  const FreeAction action = cyclic_fixture();
  const std::vector<double> xv = {0.3, -1.2, 0.7, 2.0};
  const Element x = cyclic_vector(xv);

  IterationOptions o;
  o.stop_on_convergence = false;
  o.n_max = 200;
  o.tol_conv = 1e-8;
  const LimitResult even = even_sphere_limit(action, x, o);
  const Element e2 = cyclic_vector({(xv[0] + xv[2]) / 2, (xv[1] + xv[3]) / 2,
                                    (xv[0] + xv[2]) / 2, (xv[1] + xv[3]) / 2});
  const auto p = BufetovOperator::from_action(action, TransitionSystem::nevo_stein(2));
  const Element s400 = sphere_average_fast(p, 2 * o.n_max, x);
  c.records.push_back(make_record("(a) |s_2n(x) - E2(x)| at n = 200", {o.n_max},
                                  op_distance(s400, e2), 1e-8));
  c.records.push_back(make_record("(a) library E2 = classical E2", {},
                                  op_distance(even.limit, e2), 1e-10));
  c.records.push_back(make_record("(a) s_1^2(E2 x) = E2 x", {},
                                  s1_squared_residual(action, even.limit), 1e-11));

  const double mean = (xv[0] + xv[1] + xv[2] + xv[3]) / 4;
  const Element ef = cyclic_vector({mean, mean, mean, mean});
  const Element c2000 = cesaro_average(p, 2000, x);
  c.records.push_back(make_record("(b) |c_n(x) - E(x)| at n = 2000", {2000},
                                  op_distance(c2000, ef), 1e-6));

  const TransitionSystem& sys = p.system();
  const int m = static_cast<int>(sys.size());
  RVector flat(m * 4);
  BTuple xt;
  for (int i = 0; i < m; ++i) {
    std::vector<double> comp(4);
    for (int v = 0; v < 4; ++v) {
      comp[std::size_t(v)] = xv[std::size_t((v + i) % 4)] * (1.0 + 0.1 * i);
      flat(i * 4 + v) = comp[std::size_t(v)];
    }
    xt.push_back(cyclic_vector(comp));
  }
  IterationOptions ro;
  ro.n_max = 100;
  ro.stop_on_convergence = false;
  const RotaResult rota = rota_iterate(p, xt, ro);
  const RVector oracle = classical_rota_limit(sys, flat, 400);
  double w = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int v = 0; v < 4; ++v) {
      w = std::max(w, std::abs(rota.final_iterate[std::size_t(i)].block(std::size_t(v))(0, 0) -
                               Complex(oracle(i * 4 + v), 0.0)));
    }
  }
  c.records.push_back(make_record("(c) Rota iterate vs classical oracle", {ro.n_max}, w, 1e-8));
  finish(c);
  return c;
}

CriterionResult criterion7(std::uint64_t seed) {
  CriterionResult c{7, "Fast sphere average outruns brute force", false, "", {}, 0};
  FixtureRng rng(seed);
  const BlockStructure s({2});
  const SpacePtr space = make_space(s, StateKind::kRandom, rng);
  const FreeAction action = random_free_action(space, 2, rng);
  const auto p = BufetovOperator::from_action(action, TransitionSystem::nevo_stein(2));
  const Element x = random_element(s, rng);

  auto t0 = Clock::now();
  const Element fast12 = sphere_average_fast(p, 12, x);
  const double t_fast = seconds_since(t0);
  t0 = Clock::now();
  const Element brute8 = sphere_average_brute(action, 8, x);
  const double t_brute = seconds_since(t0);
  (void)fast12;
  const Element fast8 = sphere_average_fast(p, 8, x);
  c.records.push_back(make_record("s_8 brute vs fast", {8}, op_distance(brute8, fast8), 1e-10));
  finish(c);
  const bool faster = t_fast < t_brute;
  c.pass = c.pass && faster;
  c.detail += faster ? ", fast(n=12) beat brute(n=8)" : ", fast(n=12) was NOT faster than brute(n=8)";
  return c;
}

CriterionResult criterion8(std::uint64_t seed) {
  CriterionResult c{8, "Determinism of the experiment harness", false, "", {}, 0};
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kIdentities;
  cfg.fixture.seed = seed;
  cfg.parameters.n_max = 2;
  cfg.parameters.samples = 2;
  const json a = canonical(run(cfg).to_json());
  const json b = canonical(run(cfg).to_json());
  c.records.push_back(make_record("identical canonical reports", {}, a == b ? 0.0 : 1.0, 0.0));
  finish(c);
  return c;
}

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  static const std::function<CriterionResult(std::uint64_t)> table[] = {
      criterion1, criterion2, criterion3, criterion4,
      criterion5, criterion6, criterion7, criterion8};
  if (id < 1 || id > 8) throw InvalidArgument("criterion id must be in [1, 8]");
  const auto t0 = Clock::now();
  CriterionResult r = table[id - 1](seed);
  r.wall_time_s = seconds_since(t0);
  return r;
}

VerifyReport run_verify(std::uint64_t seed, bool quiet) {
  VerifyReport rep;
  rep.seed = seed;
  for (int id = 1; id <= 8; ++id) {
    rep.criteria.push_back(run_criterion(id, seed));
    if (!quiet) {
      const auto& c = rep.criteria.back();
      std::cout << (c.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": "
                << c.detail << "\n";
    }
  }
  return rep;
}

bool VerifyReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
}

json VerifyReport::to_json() const {
  json cs = json::array();
  double total = 0.0;
  for (const auto& c : criteria) {
    json recs = json::array();
    for (const auto& r : c.records) recs.push_back(record_to_json(r));
    cs.push_back({{"id", c.id},
                  {"name", c.name},
                  {"pass", c.pass},
                  {"checks", recs},
                  {"wall_times", {{"total_s", c.wall_time_s}}}});
    total += c.wall_time_s;
  }
  return {{"seed", seed},
          {"pass", pass()},
          {"criteria", cs},
          {"wall_times", {{"total_s", total}}}};
}

}  // namespace ncergo::cli
