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

#include "ncergo/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include "ncergo/dilation.hpp"
#include "ncergo/subalgebra.hpp"

namespace ncergo::cli {
namespace {

using nlohmann::json;
using BTuple = BufetovOperator::Tuple;

constexpr std::pair<ExperimentKind, std::string_view> kExperimentNames[] = {
    {ExperimentKind::kIdentities, "identities"},
    {ExperimentKind::kDilation, "dilation"},
    {ExperimentKind::kRota, "rota"},
    {ExperimentKind::kS2n, "s2n"},
    {ExperimentKind::kCesaro, "cesaro"},
    {ExperimentKind::kBufetovVsBrute, "bufetov-vs-brute"},
};

constexpr std::pair<StateKind, std::string_view> kStateNames[] = {
    {StateKind::kTracial, "tracial"},
    {StateKind::kRandom, "random"},
    {StateKind::kNearDegenerate, "near-degenerate"},
    {StateKind::kClustered, "clustered"},
};

constexpr std::pair<ActionMode, std::string_view> kActionNames[] = {
    {ActionMode::kRandomUnitary, "random-unitary"},
    {ActionMode::kPermutation, "permutation"},
    {ActionMode::kUserSupplied, "user-supplied"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E e) {
  for (const auto& [k, v] : table) {
    if (k == e) return v;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse_enum(const std::pair<E, std::string_view> (&table)[N],
             const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key + " must be a string");
  const auto s = j.get<std::string>();
  for (const auto& [k, v] : table) {
    if (v == s) return k;
  }
  std::string allowed;
  for (const auto& [k, v] : table) allowed += (allowed.empty() ? "" : "|") + std::string(v);
  throw ConfigError(key + ": unknown value \"" + s + "\" (expected " + allowed + ")");
}

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key + " must be an integer");
  return j.get<int>();
}

double get_positive(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key + " must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key + " must be positive");
  return v;
}

Matrix parse_matrix(const json& j, const std::string& key) {
  require_keys(j, key, {"re", "im"});
  if (!j.contains("re") || !j["re"].is_array()) {
    throw ConfigError(key + ".re must be a matrix");
  }
  const auto& re = j["re"];
  const auto rows = static_cast<Eigen::Index>(re.size());
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = re[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw ConfigError(key + " must be square");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      double im = 0.0;
      if (j.contains("im")) {
        im = j["im"].at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
      }
      m(r, c) = Complex(row[static_cast<std::size_t>(c)].get<double>(), im);
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ii = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

json p_to_json(double p) {
  return std::isinf(p) ? json("inf") : json(p);
}

LpIndex to_lp(double p) {
  return std::isinf(p) ? LpIndex::infinity() : LpIndex(p);
}

// ---------------------------------------------------------------------------
// Experiment helpers

struct Context {
  const ExperimentConfig& config;
  Fixture fixture;
  FixtureRng rng;
  RunReport report;

  int n_max(int fallback) const {
    return config.parameters.n_max.value_or(fallback);
  }
  int samples(int fallback) const {
    return config.parameters.samples.value_or(fallback);
  }
  double tolerance(double fallback) const {
    return config.parameters.tolerance.value_or(fallback);
  }
  double tol_conv(double fallback) const {
    return config.parameters.tol_conv.value_or(fallback);
  }
  void add(ResidualRecord r) { report.checks.push_back(std::move(r)); }
  void add(const std::vector<ResidualRecord>& rs) {
    report.checks.insert(report.checks.end(), rs.begin(), rs.end());
  }
  void suite(std::string s) { report.suites.push_back(std::move(s)); }
  void series(ConvergenceSeries s) {
    const std::string ext =
        config.output.format == OutputFormat::kCsv ? ".csv" : ".json";
    std::string file = config.output.name + "_" + s.label + ext;
    report.series.push_back({std::move(s), std::move(file)});
  }
};

BTuple random_tuple(std::size_t size, const BlockStructure& s, FixtureRng& rng) {
  BTuple t;
  for (std::size_t i = 0; i < size; ++i) t.push_back(random_element(s, rng));
  return t;
}

double tuple_gap(const BTuple& a, const BTuple& b) { return tuple_distance(a, b); }

double matrix_gap(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Max over matrix-unit pairs of |phi(R(b) a) - psi(b Q(a))|.
double adjoint_pairing_residual(const CpMap& q, const CpMap& r) {
  const auto& ss = q.source()->structure();
  const auto& ts = q.target()->structure();
  double worst = 0.0;
  for (Eigen::Index ia = 0; ia < ss.vec_dim(); ++ia) {
    const Element a = Element::matrix_unit(ss, ia);
    const Element qa = q.apply(a);
    for (Eigen::Index ib = 0; ib < ts.vec_dim(); ++ib) {
      const Element b = Element::matrix_unit(ts, ib);
      const Complex lhs = state_eval(*q.source(), r.apply(b) * a);
      const Complex rhs = state_eval(*q.target(), b * qa);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

void maps_suite(Context& ctx, const std::vector<Element>& hermitian_samples) {
  const auto& action = ctx.fixture.action;
  const double tol = ctx.tolerance(tol::kIdentity);
  for (int i = 1; i <= action.d(); ++i) {
    const CpMap& s = action.sigma(i);
    const auto st = check_stationary(s);
    ctx.add(make_record("stationary sigma", {i},
                        std::max(st.state_residual, st.modular_residual), tol));
    const auto cp = is_completely_positive(s);
    ctx.add(make_record("Choi positivity sigma", {i},
                        std::max(0.0, -cp.min_choi_eigenvalue), tol::kChoi));
    const CpMap adj = adjoint_wrt_states(s);
    ctx.add(make_record("state adjoint pairing", {i},
                        adjoint_pairing_residual(s, adj), 1e-11));
    ctx.add(make_record("adjoint involution", {i},
                        matrix_gap(adjoint_wrt_states(adj).matrix(), s.matrix()),
                        tol));
    const double kappa = whitening_condition(*action.space());
    ctx.add(make_record("kms adjoint = state adjoint", {i},
                        matrix_gap(kms_adjoint(s).matrix(), adj.matrix()),
                        tol * kappa * kappa));
    ctx.add(make_record("adjoint = inverse", {i},
                        matrix_gap(adj.matrix(), action.sigma(-i).matrix()), tol));
    for (double p : ctx.config.parameters.p_values) {
      const auto rep = lp_extension_norm_check(s, to_lp(p), hermitian_samples);
      ctx.add(make_record("Lp contraction", {i, std::isinf(p) ? -1 : int(p)},
                          std::max(0.0, rep.max_ratio - 1.0), 1e-10));
    }
  }
  ctx.suite("nc-maps/stationarity");
  ctx.suite("nc-maps/choi");
  ctx.suite("nc-maps/state-adjoint");
  ctx.suite("nc-maps/kms-adjoint");
  ctx.suite("nc-maps/lp-contraction");
}

void expectation_suite(Context& ctx, const CpMap& e, const std::string& name) {
  const double tol = ctx.tolerance(tol::kIdentity);
  const auto& m = e.matrix();
  ctx.add(make_record(name + " idempotent", {}, matrix_gap(m * m, m), tol));
  const auto& space = *e.source();
  const double kappa = whitening_condition(space);
  const auto st = check_stationary(e);
  ctx.add(make_record(name + " state preserving", {}, st.state_residual, tol));
  ctx.add(make_record(name + " modular commutation", {}, st.modular_residual,
                      tol * std::max(1.0, kappa)));
  ctx.add(make_record(name + " self-adjoint", {},
                      matrix_gap(kms_adjoint(e).matrix(), m), tol * std::max(1.0, kappa)));
  ctx.suite("nc-maps/conditional-expectation");
  ctx.suite("nc-maps/fixed-point-algebra");
}

void run_identities(Context& ctx) {
  const auto& action = ctx.fixture.action;
  const auto& s = ctx.fixture.space->structure();
  const int n_max = ctx.n_max(4);
  const int ns = ctx.samples(5);
  const double tol = ctx.tolerance(tol::kIdentity);
  const std::size_t m = 2 * static_cast<std::size_t>(action.d());
  std::vector<BTuple> tuples;
  for (int i = 0; i < ns; ++i) tuples.push_back(random_tuple(m, s, ctx.rng));
  std::vector<Element> xs;
  for (int i = 0; i < ns; ++i) xs.push_back(random_element(s, ctx.rng));
  std::vector<Element> herm;
  for (int i = 0; i < ns; ++i) herm.push_back(random_hermitian(s, ctx.rng));

  ctx.add(identity_suite(action, n_max, tuples, tol));
  ctx.suite("rota/identities");
  for (int n = 1; n <= n_max; ++n) {
    ctx.add(spherical_recursion_check(action, n, xs, tol));
  }
  ctx.suite("rota/spherical-recursion");

  maps_suite(ctx, herm);

  const auto p = BufetovOperator::from_action(
      action, TransitionSystem::nevo_stein(action.d()));
  const auto closed = bufetov_adjoint(p).materialize();
  const auto generic = adjoint_wrt_states(p.materialize());
  ctx.add(make_record("Bufetov adjoint closed form", {},
                      matrix_gap(closed.matrix(), generic.matrix()), tol));
  double inv = 0.0;
  for (const auto& b : tuples) inv = std::max(inv, std::abs(p.state(p.apply(b)) - p.state(b)));
  ctx.add(make_record("phi_B invariance", {}, inv, 1e-11));
  ctx.suite("free-averaging/bufetov-adjoint");
  ctx.suite("free-averaging/state-invariance");

  const CpMap e2 = even_expectation(action);
  expectation_suite(ctx, e2, "even expectation");
  const CpMap e = invariant_expectation(action);
  expectation_suite(ctx, e, "invariant expectation");
  double inside = 0.0;
  for (const auto& x : xs) {
    inside = std::max(inside, max_abs_diff(e2.apply(e.apply(x)), e.apply(x)));
  }
  ctx.add(make_record("invariant range inside even range", {}, inside, tol));
}

void run_dilation(Context& ctx) {
  const auto& action = ctx.fixture.action;
  const int r = ctx.config.parameters.depth;
  const double tol = ctx.tolerance(tol::kDilation);
  const double tight = 1e-11;
  const DilationTower tower(action, r);
  if (tower.level_vec_dim(r) > kDenseDimCap) {
    throw ResourceCapError("level " + std::to_string(r) + " has dimension " +
                           std::to_string(tower.level_vec_dim(r)) +
                           ", above the dense cap of " + std::to_string(kDenseDimCap));
  }
  const auto& s = ctx.fixture.space->structure();
  const int ns = ctx.samples(2);
  auto rnd = [&](int level) { return random_tuple(tower.level_size(level), s, ctx.rng); };

  for (int n = 1; n < r; ++n) {
    double worst = 0.0;
    for (int k = 0; k < ns; ++k) {
      const BTuple b = rnd(n - 1);
      worst = std::max(worst, tuple_gap(tower.alpha(n + 1, tower.beta(n, b)),
                                        tower.beta(n + 1, tower.alpha(n, b))));
    }
    ctx.add(make_record("alpha beta intertwining", {n}, worst, tight));
  }
  ctx.suite("dilation/intertwining");

  for (int n = 1; n <= r; ++n) {
    double wa = 0.0, wb = 0.0;
    for (Eigen::Index i = 0; i < tower.level_vec_dim(n - 1); ++i) {
      const BTuple e = tower.basis_tuple(n - 1, i);
      const Complex base = tower.state(n - 1, e);
      wa = std::max(wa, std::abs(tower.state(n, tower.alpha(n, e)) - base));
      wb = std::max(wb, std::abs(tower.state(n, tower.beta(n, e)) - base));
    }
    ctx.add(make_record("phi_n o alpha_n = phi_{n-1}", {n}, wa, tight));
    ctx.add(make_record("phi_n o beta_n = phi_{n-1}", {n}, wb, tight));
  }
  ctx.suite("dilation/state-chain");

  auto product = [](const BTuple& a, const BTuple& b) {
    BTuple out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] * b[i]);
    return out;
  };
  for (int n = 1; n <= r; ++n) {
    double pa = 0.0, pb = 0.0, ia = 0.0, ib = 0.0;
    for (int k = 0; k < ns; ++k) {
      const BTuple a = rnd(n - 1);
      const BTuple b = rnd(n);
      pa = std::max(pa, std::abs(tower.state(n, product(tower.alpha(n, a), b)) -
                                 tower.state(n - 1, product(a, tower.alpha_star(n, b)))));
      pb = std::max(pb, std::abs(tower.state(n, product(tower.beta(n, a), b)) -
                                 tower.state(n - 1, product(a, tower.beta_star(n, b)))));
      ia = std::max(ia, tuple_gap(tower.alpha_star(n, tower.alpha(n, a)), a));
      ib = std::max(ib, tuple_gap(tower.beta_star(n, tower.beta(n, a)), a));
    }
    ctx.add(make_record("alpha* pairing", {n}, pa, tight));
    ctx.add(make_record("beta* pairing", {n}, pb, tight));
    ctx.add(make_record("alpha* o alpha = id", {n}, ia, tight));
    ctx.add(make_record("beta* o beta = id", {n}, ib, tight));
  }
  ctx.suite("dilation/adjoint-pairings");

  for (int q = 0; q <= r; ++q) {
    double worst = 0.0;
    for (int k = 0; k < ns; ++k) {
      const BTuple b = rnd(0);
      worst = std::max(worst, tuple_gap(tower.embed_J(q, r, b),
                                        tower.embed_J_composed(q, r, b)));
    }
    ctx.add(make_record("J_q closed form = composition", {q, r}, worst, tight));
  }
  ctx.suite("dilation/embedding");

  const auto p = BufetovOperator::from_action(action, tower.system());
  const auto ps = bufetov_adjoint(p);
  const auto nb = tower.level_vec_dim(0);
  for (int n = 0; n <= r; ++n) {
    for (int q = n; q <= r; ++q) {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < nb; ++i) {
        const BTuple b = tower.basis_tuple(0, i);
        BTuple pb = b;
        for (int k = 0; k < q - n; ++k) pb = p.apply(pb);
        worst = std::max(worst,
                         tuple_gap(tower.expect_past(n, r, tower.embed_J(q, r, b)),
                                   tower.embed_J(n, r, pb)));
      }
      ctx.add(make_record("E_{n]} J_q = J_n P^{q-n}", {n, q, r}, worst, tol));
    }
  }
  ctx.suite("dilation/past-expectation");
  for (int n = 0; n <= r; ++n) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < nb; ++i) {
      const BTuple b = tower.basis_tuple(0, i);
      BTuple pb = b;
      for (int k = 0; k < n; ++k) pb = ps.apply(pb);
      worst = std::max(worst,
                       tuple_gap(tower.expect_future(n, r, tower.embed_J(0, r, b)),
                                 tower.embed_J(n, r, pb)));
    }
    ctx.add(make_record("E_{[n} J_0 = J_n (P*)^n", {n, r}, worst, tol));
  }
  ctx.suite("dilation/future-expectation");

  for (int n = 0; n <= r; ++n) {
    const Subalgebra fut = tower.generated_subalgebra(n, r, r);
    const Subalgebra past = tower.generated_subalgebra(0, n, r);
    double wf = 0.0, wp = 0.0;
    for (Eigen::Index i = 0; i < tower.level_vec_dim(r); ++i) {
      const BTuple c = tower.basis_tuple(r, i);
      const Element pc = tower.pack(r, c);
      wf = std::max(wf, tuple_gap(tower.expect_future(n, r, c),
                                  tower.unpack(r, fut.project(pc))));
      wp = std::max(wp, tuple_gap(tower.expect_past(n, r, c),
                                  tower.unpack(r, past.project(pc))));
    }
    ctx.add(make_record("E_{[n} beta path = generated projection", {n, r}, wf, tol));
    ctx.add(make_record("E_{n]} alpha path = generated projection", {n, r}, wp, tol));
    ctx.add(make_record("B_{[n} modular invariance", {n, r},
                        modular_invariance_residual(fut), tol::kIdentity));
    ctx.add(make_record("B_{n]} modular invariance", {n, r},
                        modular_invariance_residual(past), tol::kIdentity));
  }
  ctx.suite("dilation/dual-path");

  for (int n = 0; n <= r; ++n) {
    for (int q = 0; n + q <= r; ++q) {
      ctx.add(check_covariance(tower, n, q, r, tol));
    }
  }
  ctx.suite("dilation/covariance");

  for (int n = 1; n <= r; ++n) {
    double worst = 0.0;
    for (int k = 0; k < ns; ++k) {
      const BTuple b = rnd(0);
      BTuple pb = b;
      for (int j = 0; j < n; ++j) pb = p.apply(pb);
      worst = std::max(worst, tuple_gap(power_via_tower(tower, n, b), pb));
    }
    ctx.add(make_record("P^n = alpha* chain o beta chain", {n}, worst, tol::kIdentity));
  }
  ctx.suite("dilation/power-chain");
}

IterationOptions iteration(const Context& ctx, int n_max, double tol_conv) {
  IterationOptions o;
  o.n_max = ctx.n_max(n_max);
  o.tol_conv = ctx.tol_conv(tol_conv);
  o.stop_on_convergence = false;
  o.p = to_lp(ctx.config.parameters.p_values.empty()
                  ? std::numeric_limits<double>::infinity()
                  : ctx.config.parameters.p_values.back());
  return o;
}

void convergence_record(Context& ctx, const std::string& name,
                        const ConvergenceSeries& s, const IterationOptions& o) {
  // Residual: the smallest primary-norm distance reached; pass iff the
  // series crossed tol_conv at some n <= n_max.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pt : s.points) {
    const double v = o.p.is_infinite() ? pt.dist_op
                     : o.p.value() == 1.0 ? pt.dist_l1
                                          : pt.dist_l2;
    best = std::min(best, v);
  }
  ctx.add(make_record(name, {o.n_max}, best, o.tol_conv));
}

void run_rota(Context& ctx) {
  const auto& action = ctx.fixture.action;
  const auto p = BufetovOperator::from_action(
      action, TransitionSystem::nevo_stein(action.d()));
  const auto o = iteration(ctx, 50, 1e-8);
  const BTuple x = random_tuple(p.system().size(), ctx.fixture.space->structure(), ctx.rng);
  const RotaResult res = rota_iterate(p, x, o);
  convergence_record(ctx, "Rota consecutive distance", res.consecutive, o);
  ctx.series(res.consecutive);
  ctx.suite("rota/alternating");
}

void run_s2n(Context& ctx) {
  const auto& action = ctx.fixture.action;
  const auto o = iteration(ctx, 200, 1e-8);
  const Element x = random_element(ctx.fixture.space->structure(), ctx.rng);
  const LimitResult res = even_sphere_limit(action, x, o);
  convergence_record(ctx, "s_2n -> E2 distance", res.series, o);
  ctx.add(make_record("s_1^2 E2(x) = E2(x)", {}, s1_squared_residual(action, res.limit),
                      1e-11));
  expectation_suite(ctx, even_expectation(action), "even expectation");
  ctx.series(res.series);
  ctx.suite("rota/even-limit");
}

void run_cesaro(Context& ctx) {
  const auto& action = ctx.fixture.action;
  const auto o = iteration(ctx, 2000, 1e-6);
  const Element x = random_element(ctx.fixture.space->structure(), ctx.rng);
  const LimitResult res = cesaro_limit(action, x, o);
  convergence_record(ctx, "c_n -> E distance", res.series, o);
  const CpMap e2 = even_expectation(action);
  ctx.add(make_record("invariant limit inside even range", {},
                      max_abs_diff(e2.apply(res.limit), res.limit),
                      ctx.tolerance(tol::kIdentity)));
  expectation_suite(ctx, invariant_expectation(action), "invariant expectation");
  ctx.series(res.series);
  ctx.suite("rota/cesaro-limit");
  ctx.suite("free-averaging/cesaro");
}

void run_bufetov_vs_brute(Context& ctx) {
  const auto& action = ctx.fixture.action;
  const auto& s = ctx.fixture.space->structure();
  const auto p = BufetovOperator::from_action(
      action, TransitionSystem::nevo_stein(action.d()));
  const int n_max = ctx.n_max(5);
  const int ns = ctx.samples(20);
  const double tol = ctx.tolerance(tol::kIdentity);
  std::vector<Element> xs;
  for (int i = 0; i < ns; ++i) xs.push_back(random_element(s, ctx.rng));
  for (int n = 0; n <= n_max; ++n) {
    double sphere = 0.0, words = 0.0;
    for (const auto& x : xs) {
      sphere = std::max(sphere, op_distance(sphere_average_brute(action, n, x),
                                            sphere_average_fast(p, n, x)));
      BTuple pw = p.lift(x);
      for (int k = 0; k < n; ++k) pw = p.apply(pw);
      words = std::max(words, tuple_gap(word_power_brute(p, n, x), pw));
    }
    ctx.add(make_record("sphere average brute = fast", {n}, sphere, tol));
    ctx.add(make_record("P^n componentwise = word expansion", {n}, words, tol));
  }
  double ces = 0.0;
  for (const auto& x : xs) {
    Element acc = Element::zero(s);
    for (int k = 0; k < n_max; ++k) acc += sphere_average_brute(action, k, x);
    acc *= Complex(1.0 / n_max);
    ces = std::max(ces, op_distance(acc, cesaro_average(p, n_max, x)));
  }
  ctx.add(make_record("Cesaro fast = brute sum", {n_max}, ces, tol));
  ctx.suite("free-averaging/brute-vs-fast");
  ctx.suite("free-averaging/word-expansion");
  ctx.suite("free-averaging/cesaro");
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string_view experiment_name(ExperimentKind kind) {
  return name_of(kExperimentNames, kind);
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  for (const auto& [k, v] : kExperimentNames) {
    if (v == name) return k;
  }
  return std::nullopt;
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> all = [] {
    std::vector<ExperimentKind> v;
    for (const auto& [k, name] : kExperimentNames) v.push_back(k);
    return v;
  }();
  return all;
}

const std::vector<std::string>& suite_registry() {
  static const std::vector<std::string> suites = {
      "nc-maps/stationarity",         "nc-maps/choi",
      "nc-maps/state-adjoint",        "nc-maps/kms-adjoint",
      "nc-maps/lp-contraction",       "nc-maps/conditional-expectation",
      "nc-maps/fixed-point-algebra",  "free-averaging/brute-vs-fast",
      "free-averaging/word-expansion", "free-averaging/cesaro",
      "free-averaging/bufetov-adjoint", "free-averaging/state-invariance",
      "dilation/intertwining",        "dilation/state-chain",
      "dilation/adjoint-pairings",    "dilation/embedding",
      "dilation/past-expectation",    "dilation/future-expectation",
      "dilation/dual-path",           "dilation/covariance",
      "dilation/power-chain",         "rota/identities",
      "rota/spherical-recursion",     "rota/alternating",
      "rota/even-limit",              "rota/cesaro-limit",
  };
  return suites;
}

// ---------------------------------------------------------------------------
// Config

ExperimentConfig parse_config(const json& j) {
  require_keys(j, "config", {"fixture", "experiment", "parameters", "output"});
  ExperimentConfig c;
  if (!j.contains("experiment")) throw ConfigError("config: missing \"experiment\"");
  c.experiment = parse_enum(kExperimentNames, j["experiment"], "experiment");

  if (j.contains("fixture")) {
    const auto& f = j["fixture"];
    require_keys(f, "fixture", {"block_dims", "state", "d", "action",
                                "permutations", "unitaries", "seed"});
    if (f.contains("block_dims")) {
      if (!f["block_dims"].is_array() || f["block_dims"].empty()) {
        throw ConfigError("fixture.block_dims must be a nonempty array");
      }
      c.fixture.block_dims.clear();
      for (const auto& v : f["block_dims"]) {
        const int d = get_int(v, "fixture.block_dims[]");
        if (d < 1 || d > 16) throw ConfigError("fixture.block_dims entries must be in [1, 16]");
        c.fixture.block_dims.push_back(d);
      }
    }
    if (f.contains("state")) c.fixture.state = parse_enum(kStateNames, f["state"], "fixture.state");
    if (f.contains("d")) c.fixture.d = get_int(f["d"], "fixture.d");
    if (f.contains("action")) {
      c.fixture.action = parse_enum(kActionNames, f["action"], "fixture.action");
    }
    if (f.contains("permutations")) {
      if (!f["permutations"].is_array()) throw ConfigError("fixture.permutations must be an array");
      for (const auto& p : f["permutations"]) {
        if (!p.is_array()) throw ConfigError("fixture.permutations entries must be arrays");
        std::vector<int> perm;
        for (const auto& v : p) perm.push_back(get_int(v, "fixture.permutations[][]"));
        c.fixture.permutations.push_back(std::move(perm));
      }
    }
    if (f.contains("unitaries")) {
      if (!f["unitaries"].is_array()) throw ConfigError("fixture.unitaries must be an array");
      for (const auto& g : f["unitaries"]) {
        if (!g.is_array()) throw ConfigError("fixture.unitaries entries must be arrays of blocks");
        std::vector<Matrix> blocks;
        for (const auto& b : g) blocks.push_back(parse_matrix(b, "fixture.unitaries block"));
        c.fixture.unitaries.push_back(std::move(blocks));
      }
    }
    if (f.contains("seed")) {
      const auto& sd = f["seed"];
      if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<std::int64_t>() < 0))
        throw ConfigError("fixture.seed must be a nonnegative integer");
      c.fixture.seed = f["seed"].get<std::uint64_t>();
    }
  }
  if (c.fixture.d < 2) {
    throw ConfigError("degenerate transition system: d = " + std::to_string(c.fixture.d) +
                      " (need d >= 2)");
  }
  if (c.fixture.action == ActionMode::kPermutation) {
    if (c.fixture.permutations.empty()) {
      std::vector<int> shift;
      const int m = static_cast<int>(c.fixture.block_dims.size());
      for (int k = 0; k < m; ++k) shift.push_back((k + 1) % m);
      c.fixture.permutations.assign(static_cast<std::size_t>(c.fixture.d), shift);
    }
    if (static_cast<int>(c.fixture.permutations.size()) != c.fixture.d) {
      throw ConfigError("fixture.permutations needs one permutation per generator");
    }
  }
  if (c.fixture.action == ActionMode::kUserSupplied &&
      static_cast<int>(c.fixture.unitaries.size()) != c.fixture.d) {
    throw ConfigError("fixture.unitaries needs one unitary per generator");
  }

  if (j.contains("parameters")) {
    const auto& p = j["parameters"];
    require_keys(p, "parameters", {"n_max", "depth", "p", "tolerance", "tol_conv", "samples"});
    if (p.contains("n_max")) {
      c.parameters.n_max = get_int(p["n_max"], "parameters.n_max");
      if (*c.parameters.n_max < 1) throw ConfigError("parameters.n_max must be >= 1");
    }
    if (p.contains("depth")) {
      c.parameters.depth = get_int(p["depth"], "parameters.depth");
      if (c.parameters.depth < 0) throw ConfigError("parameters.depth must be >= 0");
    }
    if (p.contains("p")) {
      if (!p["p"].is_array()) throw ConfigError("parameters.p must be an array");
      c.parameters.p_values.clear();
      for (const auto& v : p["p"]) {
        if (v.is_string() && v.get<std::string>() == "inf") {
          c.parameters.p_values.push_back(std::numeric_limits<double>::infinity());
        } else if (v.is_number() && v.get<double>() >= 1.0) {
          c.parameters.p_values.push_back(v.get<double>());
        } else {
          throw ConfigError("parameters.p entries must be numbers >= 1 or \"inf\"");
        }
      }
    }
    if (p.contains("tolerance")) c.parameters.tolerance = get_positive(p["tolerance"], "parameters.tolerance");
    if (p.contains("tol_conv")) c.parameters.tol_conv = get_positive(p["tol_conv"], "parameters.tol_conv");
    if (p.contains("samples")) {
      c.parameters.samples = get_int(p["samples"], "parameters.samples");
      if (*c.parameters.samples < 1) throw ConfigError("parameters.samples must be >= 1");
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    require_keys(o, "output", {"dir", "format", "name"});
    if (o.contains("dir")) c.output.dir = o["dir"].get<std::string>();
    if (o.contains("format")) {
      const auto f = o["format"].get<std::string>();
      if (f == "json") c.output.format = OutputFormat::kJson;
      else if (f == "csv") c.output.format = OutputFormat::kCsv;
      else throw ConfigError("output.format must be json or csv");
    }
    if (o.contains("name")) c.output.name = o["name"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json f = {
      {"block_dims", c.fixture.block_dims},
      {"state", name_of(kStateNames, c.fixture.state)},
      {"d", c.fixture.d},
      {"action", name_of(kActionNames, c.fixture.action)},
      {"seed", c.fixture.seed},
  };
  if (!c.fixture.permutations.empty()) f["permutations"] = c.fixture.permutations;
  if (!c.fixture.unitaries.empty()) {
    json us = json::array();
    for (const auto& g : c.fixture.unitaries) {
      json blocks = json::array();
      for (const auto& b : g) blocks.push_back(matrix_to_json(b));
      us.push_back(blocks);
    }
    f["unitaries"] = us;
  }
  json p = {{"depth", c.parameters.depth}};
  json ps = json::array();
  for (double v : c.parameters.p_values) ps.push_back(p_to_json(v));
  p["p"] = ps;
  if (c.parameters.n_max) p["n_max"] = *c.parameters.n_max;
  if (c.parameters.tolerance) p["tolerance"] = *c.parameters.tolerance;
  if (c.parameters.tol_conv) p["tol_conv"] = *c.parameters.tol_conv;
  if (c.parameters.samples) p["samples"] = *c.parameters.samples;
  return {
      {"fixture", f},
      {"experiment", experiment_name(c.experiment)},
      {"parameters", p},
      {"output",
       {{"format", c.output.format == OutputFormat::kCsv ? "csv" : "json"},
        {"name", c.output.name}}},
  };
}

Fixture build_fixture(const FixtureSpec& spec, FixtureRng& rng) {
  const BlockStructure s(spec.block_dims);
  SpacePtr space = make_space(s, spec.state, rng);
  switch (spec.action) {
    case ActionMode::kRandomUnitary:
      return {space, random_free_action(space, spec.d, rng)};
    case ActionMode::kPermutation:
      return {space, permutation_action(space, spec.permutations)};
    case ActionMode::kUserSupplied: {
      std::vector<CpMap> gens;
      for (const auto& blocks : spec.unitaries) {
        const Element u(blocks);
        if (!u.conforms(s)) throw ConfigError("user unitary does not match block_dims");
        const Element uu = u * u.adjoint();
        if (max_abs_diff(uu, Element::identity(s)) > 1e-10) {
          throw FixtureError("user-supplied matrix is not unitary");
        }
        gens.push_back(CpMap::conjugation(space, u));
      }
      return {space, FreeAction(space, std::move(gens))};
    }
  }
  throw ConfigError("unknown action mode");
}

// ---------------------------------------------------------------------------
// Running

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ResidualRecord& r) { return r.pass; });
}

json record_to_json(const ResidualRecord& r) {
  return {{"check", r.check},
          {"indices", r.indices},
          {"residual", r.residual},
          {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

json series_to_json(const ConvergenceSeries& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    pts.push_back({{"n", p.n}, {"dist_op", p.dist_op}, {"dist_L1", p.dist_l1},
                   {"dist_L2", p.dist_l2}});
  }
  return {{"label", s.label},
          {"converged_at", s.converged_at ? json(*s.converged_at) : json(nullptr)},
          {"points", pts}};
}

ConvergenceSeries series_from_json(const json& j) {
  ConvergenceSeries s;
  s.label = j.at("label").get<std::string>();
  if (!j.at("converged_at").is_null()) s.converged_at = j["converged_at"].get<int>();
  for (const auto& p : j.at("points")) {
    s.points.push_back({p.at("n").get<int>(), p.at("dist_op").get<double>(),
                        p.at("dist_L1").get<double>(), p.at("dist_L2").get<double>()});
  }
  return s;
}

json RunReport::to_json() const {
  json checks_j = json::array();
  for (const auto& r : checks) checks_j.push_back(record_to_json(r));
  json series_j = json::array();
  for (const auto& s : series) {
    json e = series_to_json(s.series);
    e["file"] = s.file;
    series_j.push_back(e);
  }
  return {{"experiment", experiment},
          {"config", config},
          {"pass", pass()},
          {"checks", checks_j},
          {"series", series_j},
          {"suites", suites},
          {"wall_times", {{"total_s", wall_time_s}}}};
}

RunReport run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  FixtureRng rng(config.fixture.seed);
  Fixture fixture = build_fixture(config.fixture, rng);
  Context ctx{config, std::move(fixture), std::move(rng), {}};
  ctx.report.config = config_to_json(config);
  ctx.report.experiment = std::string(experiment_name(config.experiment));
  switch (config.experiment) {
    case ExperimentKind::kIdentities: run_identities(ctx); break;
    case ExperimentKind::kDilation: run_dilation(ctx); break;
    case ExperimentKind::kRota: run_rota(ctx); break;
    case ExperimentKind::kS2n: run_s2n(ctx); break;
    case ExperimentKind::kCesaro: run_cesaro(ctx); break;
    case ExperimentKind::kBufetovVsBrute: run_bufetov_vs_brute(ctx); break;
  }
  std::sort(ctx.report.suites.begin(), ctx.report.suites.end());
  ctx.report.suites.erase(std::unique(ctx.report.suites.begin(), ctx.report.suites.end()),
                          ctx.report.suites.end());
  ctx.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::move(ctx.report);
}

json canonical(json report) {
  if (report.is_object()) {
    report.erase("wall_times");
    for (auto& [k, v] : report.items()) v = canonical(v);
  } else if (report.is_array()) {
    for (auto& v : report) v = canonical(v);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Files

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void emit_series(const ConvergenceSeries& series, const std::filesystem::path& path,
                 OutputFormat format) {
  if (format == OutputFormat::kJson) {
    write_atomic(path, series_to_json(series).dump(2) + "\n");
    return;
  }
  std::string out = "n,dist_op,dist_L1,dist_L2\n";
  for (const auto& p : series.points) {
    out += std::to_string(p.n) + "," + format17(p.dist_op) + "," +
           format17(p.dist_l1) + "," + format17(p.dist_l2) + "\n";
  }
  write_atomic(path, out);
}

ConvergenceSeries parse_series(const std::filesystem::path& path, OutputFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  if (format == OutputFormat::kJson) {
    json j;
    in >> j;
    return series_from_json(j);
  }
  ConvergenceSeries s;
  s.label = path.stem().string();
  std::string line;
  std::getline(in, line);
  if (line != "n,dist_op,dist_L1,dist_L2") {
    throw std::runtime_error("unexpected CSV header in " + path.string());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw std::runtime_error("malformed CSV row: " + line);
    s.points.push_back({std::stoi(cells[0]), std::stod(cells[1]), std::stod(cells[2]),
                        std::stod(cells[3])});
  }
  return s;
}

std::filesystem::path write_outputs(const RunReport& report, const OutputSpec& output) {
  std::filesystem::create_directories(output.dir);
  for (const auto& s : report.series) {
    emit_series(s.series, output.dir / s.file, output.format);
  }
  const auto path = output.dir / (output.name + "_report.json");
  write_atomic(path, report.to_json().dump(2) + "\n");
  return path;
}

}  // namespace ncergo::cli
