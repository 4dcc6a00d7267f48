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

#pragma once

// Operator identities of the Nevo-Stein Markov operator, the Rota
// alternating sequence P^n (P*)^n, and convergence experiments for sphere
// and Cesaro averages against their conditional-expectation limits.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncergo/free_averaging.hpp"
#include "ncergo/report.hpp"
#include "ncergo/subalgebra.hpp"

namespace ncergo {

/// U(b)_i = sigma_i(b_{-i}) on B = A^{|I|}.
class SymmetryU {
 public:
  explicit SymmetryU(FreeAction action);
  BufetovOperator::Tuple apply(const BufetovOperator::Tuple& b) const;

 private:
  FreeAction action_;
  TransitionSystem system_;
};

struct SeriesPoint {
  int n = 0;
  double dist_op = 0.0;
  double dist_l1 = 0.0;
  double dist_l2 = 0.0;

  bool operator==(const SeriesPoint&) const = default;
};

struct ConvergenceSeries {
  std::string label;
  std::vector<SeriesPoint> points;
  /// First n whose distance in the primary norm fell below tol_conv.
  std::optional<int> converged_at;

  bool operator==(const ConvergenceSeries&) const = default;
};

struct IterationOptions {
  int n_max = 200;
  double tol_conv = 1e-8;
  /// Stop at the first point below tol_conv; the series so far is kept.
  bool stop_on_convergence = true;
  /// Norm used for convergence detection.
  LpIndex p = LpIndex::infinity();
};

/// Residuals of U^2 = Id, U P* U = P, P*P = c1 UP + c2 Id, the (P*)^n P^n
/// recursion and both odd-power formulas for 1 <= n <= n_max, each the max
/// over `samples` of ||lhs - rhs||_F / max(1, ||b||_F). The action must
/// come with a Nevo-Stein system (d >= 2).
std::vector<ResidualRecord> identity_suite(const FreeAction& action, int n_max,
                                           std::span<const BufetovOperator::Tuple> samples,
                                           double tolerance = tol::kIdentity);

/// s_1 o s_n = ((2d-1)/2d) s_{n+1} + (1/2d) s_{n-1} and the squared form
/// s_1^2 o s_{2n} = a^2 s_{2n+2} + 2ab s_{2n} + b^2 s_{2n-2}, through the
/// fast sphere averages, over `xs`. Requires n >= 1.
std::vector<ResidualRecord> spherical_recursion_check(
    const FreeAction& action, int n, std::span<const Element> xs,
    double tolerance = tol::kIdentity);

/// Distances between two elements of A in the operator, L^1 and L^2 norms.
SeriesPoint element_distance(const NcSpace& space, int n, const Element& a,
                             const Element& b);
double primary_distance(const NcSpace& space, LpIndex p, const Element& a,
                        const Element& b);

struct RotaResult {
  /// Distance between consecutive iterates, from n = 1.
  ConvergenceSeries consecutive;
  /// Distance to the supplied limit, from n = 0; empty without a limit.
  ConvergenceSeries to_limit;
  BufetovOperator::Tuple final_iterate;
  int final_n = 0;
};

/// The sequence P^n (P*)^n (x) for n = 0..n_max, with (P*)^n x kept
/// incrementally and P^n reapplied (O(n^2) map applications in total).
/// Distances are measured on the enlarged space (A^{|I|}, phi_B). Stops
/// on the consecutive distance when no limit is given, otherwise on the
/// distance to the limit.
RotaResult rota_iterate(const BufetovOperator& p, const BufetovOperator::Tuple& x,
                        const IterationOptions& opts,
                        const std::optional<BufetovOperator::Tuple>& limit = std::nullopt);

/// The phi-preserving expectation onto the fixed points of
/// {sigma_i o sigma_j : j != -i} (even words).
CpMap even_expectation(const FreeAction& action);
/// The phi-preserving expectation onto the F_d-invariant elements.
CpMap invariant_expectation(const FreeAction& action);

struct LimitResult {
  ConvergenceSeries series;
  Element limit;
};

/// ||s_{2n}(x) - E^{(2)}(x)|| for n = 0..n_max.
LimitResult even_sphere_limit(const FreeAction& action, const Element& x,
                              const IterationOptions& opts);

/// ||c_n(x) - E(x)|| for n = 1..n_max, E onto the F_d-invariants.
LimitResult cesaro_limit(const FreeAction& action, const Element& x,
                         const IterationOptions& opts);

/// max-entry residual of s_1(s_1(y)) = y.
double s1_squared_residual(const FreeAction& action, const Element& y);

}  // namespace ncergo
