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

#include "ncergo/rota.hpp"

#include <algorithm>
#include <cmath>

#include "ncergo/errors.hpp"

namespace ncergo {
namespace {

using BTuple = BufetovOperator::Tuple;

BTuple combine(Complex a, const BTuple& x, Complex b, const BTuple& y) {
  BTuple out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(a * x[i] + b * y[i]);
  return out;
}

double frobenius(const BTuple& x) {
  double acc = 0.0;
  for (const auto& e : x) acc += e.frobenius_norm() * e.frobenius_norm();
  return std::sqrt(acc);
}

double relative_gap(const BTuple& lhs, const BTuple& rhs, const BTuple& input) {
  double acc = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double d = frobenius_distance(lhs[i], rhs[i]);
    acc += d * d;
  }
  return std::sqrt(acc) / std::max(1.0, frobenius(input));
}

BTuple power(const BufetovOperator& p, int k, BTuple b) {
  for (int i = 0; i < k; ++i) b = p.apply(b);
  return b;
}

BufetovOperator nevo_stein_operator(const FreeAction& action) {
  return BufetovOperator::from_action(action,
                                      TransitionSystem::nevo_stein(action.d()));
}

void record(ConvergenceSeries& s, const SeriesPoint& pt, double primary,
            const IterationOptions& opts, bool& stop) {
  s.points.push_back(pt);
  if (!s.converged_at && primary < opts.tol_conv) {
    s.converged_at = pt.n;
    stop = opts.stop_on_convergence;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SymmetryU

SymmetryU::SymmetryU(FreeAction action)
    : action_(std::move(action)),
      system_(TransitionSystem::nevo_stein(action_.d())) {}

BTuple SymmetryU::apply(const BTuple& b) const {
  if (b.size() != system_.size()) throw ShapeError("tuple size mismatch");
  BTuple out;
  out.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const int label = system_.label(i);
    out.push_back(action_.sigma(label).apply(b[system_.index_of(-label)]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Identities

std::vector<ResidualRecord> identity_suite(const FreeAction& action, int n_max,
                                           std::span<const BTuple> samples,
                                           double tolerance) {
  if (n_max < 1) throw InvalidArgument("identity suite needs n_max >= 1");
  const BufetovOperator p = nevo_stein_operator(action);
  const BufetovOperator ps = bufetov_adjoint(p);
  const SymmetryU u(action);
  const double d = action.d();
  const Complex c1 = (2 * d - 2) / (2 * d - 1);
  const Complex c2 = 1.0 / (2 * d - 1);
  const Complex o1 = (2 * d - 1) / (2 * d - 2);
  const Complex o2 = 1.0 / (2 * d - 2);

  double r_u2 = 0.0, r_upu = 0.0, r_psp = 0.0;
  std::vector<double> r_rec(static_cast<std::size_t>(n_max), 0.0);
  std::vector<double> r_odd_left(static_cast<std::size_t>(n_max), 0.0);
  std::vector<double> r_odd_right(static_cast<std::size_t>(n_max), 0.0);
  for (const auto& b : samples) {
    r_u2 = std::max(r_u2, relative_gap(u.apply(u.apply(b)), b, b));
    r_upu = std::max(r_upu, relative_gap(u.apply(ps.apply(u.apply(b))),
                                         p.apply(b), b));
    r_psp = std::max(r_psp,
                     relative_gap(ps.apply(p.apply(b)),
                                  combine(c1, u.apply(p.apply(b)), c2, b), b));
    const BTuple ub = u.apply(b);
    for (int n = 1; n <= n_max; ++n) {
      const auto k = static_cast<std::size_t>(n - 1);
      const BTuple odd = power(p, 2 * n - 1, b);
      const BTuple psn_pn = power(ps, n, power(p, n, b));
      const BTuple psm_pm = power(ps, n - 1, power(p, n - 1, b));
      r_rec[k] = std::max(
          r_rec[k], relative_gap(psn_pn, combine(c1, u.apply(odd), c2, psm_pm), b));
      r_odd_left[k] = std::max(
          r_odd_left[k],
          relative_gap(odd,
                       combine(o1, u.apply(psn_pn), -o2, u.apply(psm_pm)), b));
      const BTuple pn_psn_u = power(p, n, power(ps, n, ub));
      const BTuple pm_psm_u = power(p, n - 1, power(ps, n - 1, ub));
      r_odd_right[k] = std::max(
          r_odd_right[k],
          relative_gap(odd, combine(o1, pn_psn_u, -o2, pm_psm_u), b));
    }
  }
  std::vector<ResidualRecord> out;
  out.push_back(make_record("U^2 = Id", {}, r_u2, tolerance));
  out.push_back(make_record("U P* U = P", {}, r_upu, tolerance));
  out.push_back(make_record("P* P = c1 U P + c2 Id", {}, r_psp, tolerance));
  for (int n = 1; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n - 1);
    out.push_back(make_record("(P*)^n P^n recursion", {n}, r_rec[k], tolerance));
    out.push_back(make_record("odd power, U (P*)^n P^n form", {n},
                              r_odd_left[k], tolerance));
    out.push_back(make_record("odd power, P^n (P*)^n U form", {n},
                              r_odd_right[k], tolerance));
  }
  return out;
}

std::vector<ResidualRecord> spherical_recursion_check(
    const FreeAction& action, int n, std::span<const Element> xs,
    double tolerance) {
  if (n < 1) throw InvalidArgument("spherical recursion needs n >= 1");
  const BufetovOperator p = nevo_stein_operator(action);
  const double d = action.d();
  const Complex a = (2 * d - 1) / (2 * d);
  const Complex b = 1.0 / (2 * d);
  auto s = [&](int k, const Element& x) { return sphere_average_fast(p, k, x); };
  double r1 = 0.0, r2 = 0.0;
  for (const auto& x : xs) {
    const double scale = std::max(1.0, x.frobenius_norm());
    const Element lhs1 = s(1, s(n, x));
    const Element rhs1 = a * s(n + 1, x) + b * s(n - 1, x);
    r1 = std::max(r1, frobenius_distance(lhs1, rhs1) / scale);
    const Element lhs2 = s(1, s(1, s(2 * n, x)));
    const Element rhs2 = a * a * s(2 * n + 2, x) +
                         Complex(2.0) * a * b * s(2 * n, x) +
                         b * b * s(2 * n - 2, x);
    r2 = std::max(r2, frobenius_distance(lhs2, rhs2) / scale);
  }
  return {make_record("s_1 o s_n recursion", {n}, r1, tolerance),
          make_record("s_1^2 o s_2n expansion", {n}, r2, tolerance)};
}

// ---------------------------------------------------------------------------
// Distances

SeriesPoint element_distance(const NcSpace& space, int n, const Element& a,
                             const Element& b) {
  const Element diff = a - b;
  return {n, diff.op_norm(), lp_norm(space, LpIndex(1.0), diff),
          lp_norm(space, LpIndex(2.0), diff)};
}

double primary_distance(const NcSpace& space, LpIndex p, const Element& a,
                        const Element& b) {
  return lp_norm(space, p, a - b);
}

// ---------------------------------------------------------------------------
// Rota

RotaResult rota_iterate(const BufetovOperator& p, const BTuple& x,
                        const IterationOptions& opts,
                        const std::optional<BTuple>& limit) {
  if (opts.n_max < 0) throw InvalidArgument("n_max must be nonnegative");
  const BufetovOperator ps = bufetov_adjoint(p);
  const SpacePtr big = p.enlarged_space();
  RotaResult out;
  out.consecutive.label = "rota_consecutive";
  out.to_limit.label = "rota_to_limit";
  std::optional<Element> lim;
  if (limit) lim = p.pack(*limit);
  BTuple y = x;
  std::optional<Element> prev;
  bool stop = false;
  for (int n = 0; n <= opts.n_max && !stop; ++n) {
    const Element z = p.pack(power(p, n, y));
    if (lim) {
      record(out.to_limit, element_distance(*big, n, z, *lim),
             primary_distance(*big, opts.p, z, *lim), opts, stop);
    }
    if (prev) {
      bool stop_consecutive = false;
      record(out.consecutive, element_distance(*big, n, z, *prev),
             primary_distance(*big, opts.p, z, *prev), opts, stop_consecutive);
      if (!lim) stop = stop_consecutive;
    }
    prev = z;
    out.final_n = n;
    if (!stop && n < opts.n_max) y = ps.apply(y);
  }
  out.final_iterate = p.unpack(*prev);
  return out;
}

// ---------------------------------------------------------------------------
// Limits

CpMap even_expectation(const FreeAction& action) {
  const auto sys = TransitionSystem::nevo_stein(action.d());
  std::vector<CpMap> maps;
  for (int i : sys.labels()) {
    for (int j : sys.labels()) {
      if (j == -i) continue;
      maps.push_back(action.sigma(i).compose(action.sigma(j)));
    }
  }
  const Subalgebra sub = fixed_point_algebra(action.space(), maps);
  return conditional_expectation(action.space(), sub);
}

CpMap invariant_expectation(const FreeAction& action) {
  std::vector<CpMap> maps;
  for (int i = 1; i <= action.d(); ++i) maps.push_back(action.sigma(i));
  const Subalgebra sub = fixed_point_algebra(action.space(), maps);
  return conditional_expectation(action.space(), sub);
}

LimitResult even_sphere_limit(const FreeAction& action, const Element& x,
                              const IterationOptions& opts) {
  const CpMap e2 = even_expectation(action);
  const BufetovOperator p = nevo_stein_operator(action);
  const auto& space = *action.space();
  LimitResult out{{"s2n_to_even_limit", {}, std::nullopt}, e2.apply(x)};
  BTuple b = p.lift(x);
  bool stop = false;
  for (int n = 0; n <= opts.n_max && !stop; ++n) {
    const Element s = p.average(b);
    record(out.series, element_distance(space, n, s, out.limit),
           primary_distance(space, opts.p, s, out.limit), opts, stop);
    if (!stop && n < opts.n_max) b = p.apply(p.apply(b));
  }
  return out;
}

LimitResult cesaro_limit(const FreeAction& action, const Element& x,
                         const IterationOptions& opts) {
  const CpMap e = invariant_expectation(action);
  const BufetovOperator p = nevo_stein_operator(action);
  const auto& space = *action.space();
  LimitResult out{{"cesaro_to_invariant_limit", {}, std::nullopt}, e.apply(x)};
  BTuple b = p.lift(x);
  Element sum = Element::zero(space.structure());
  bool stop = false;
  for (int n = 1; n <= opts.n_max && !stop; ++n) {
    sum += p.average(b);
    const Element c = sum * Complex(1.0 / n);
    record(out.series, element_distance(space, n, c, out.limit),
           primary_distance(space, opts.p, c, out.limit), opts, stop);
    if (!stop && n < opts.n_max) b = p.apply(b);
  }
  return out;
}

double s1_squared_residual(const FreeAction& action, const Element& y) {
  const BufetovOperator p = nevo_stein_operator(action);
  return max_abs_diff(sphere_average_fast(p, 1, sphere_average_fast(p, 1, y)), y);
}

}  // namespace ncergo
