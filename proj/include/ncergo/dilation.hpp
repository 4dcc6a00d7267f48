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

// The finite stages B_0, ..., B_r of the Kolmogorov dilation of the
// Markov operator of a free action. Level n is the product algebra of maps
// I(n+1) -> A with the state phi_n(b) = sum_w p_n(w) phi(b_w); elements are
// tuples indexed by the words of I(n+1) in lexicographic order.
//
//   alpha_n(b)_w = b_{w_0 ... w_{n-1}}        B_{n-1} -> B_n
//   beta_n(b)_w  = sigma_{w_0}(b_{w_1 ... w_n})
//   J_q(b)_w     = sigma_{w_0 ... w_{q-1}}(b_{w_q})   (at any level r >= q)

#include <map>
#include <vector>

#include "ncergo/free_averaging.hpp"
#include "ncergo/report.hpp"
#include "ncergo/subalgebra.hpp"

namespace ncergo {

inline constexpr std::size_t kDefaultComponentCap = 10'000;

class DilationTower {
 public:
  using Tuple = std::vector<Element>;

  /// Levels 0..depth over the Nevo-Stein system of the action. Throws
  /// ResourceCapError if level `depth` has more than `component_cap`
  /// components.
  DilationTower(FreeAction action, int depth,
                std::size_t component_cap = kDefaultComponentCap);

  int depth() const { return depth_; }
  const FreeAction& action() const { return action_; }
  const TransitionSystem& system() const { return system_; }
  const SpacePtr& base() const { return action_.space(); }

  /// I(n+1), the index words of level n.
  const std::vector<Word>& words(int n) const;
  std::size_t level_size(int n) const { return words(n).size(); }
  /// p_n(w) for the idx-th word of level n.
  double weight(int n, std::size_t idx) const;

  /// phi_n(b).
  Complex state(int n, const Tuple& b) const;
  Tuple one(int n) const;
  /// Level n as one block algebra (blocks per word, rho = p_n(w) rho_A),
  /// built on first use.
  SpacePtr level_space(int n) const;
  Element pack(int n, const Tuple& b) const;
  Tuple unpack(int n, const Element& x) const;

  Tuple alpha(int n, const Tuple& b) const;
  Tuple beta(int n, const Tuple& b) const;
  /// phi_{n-1}(a alpha_n*(b)) = phi_n(alpha_n(a) b).
  Tuple alpha_star(int n, const Tuple& b) const;
  /// phi_{n-1}(a beta_n*(b)) = phi_n(beta_n(a) b).
  Tuple beta_star(int n, const Tuple& b) const;

  /// alpha_to o ... o alpha_{from+1}: B_from -> B_to.
  Tuple alpha_chain(int from, int to, const Tuple& b) const;
  /// beta_to o ... o beta_{from+1}: B_from -> B_to.
  Tuple beta_chain(int from, int to, const Tuple& b) const;

  /// J_q(b) at level r from the closed formula; b in B = B_0.
  Tuple embed_J(int q, int r, const Tuple& b) const;
  /// J_q(b) at level r as alpha_r o ... o alpha_{q+1} o beta_q o ... o beta_1.
  Tuple embed_J_composed(int q, int r, const Tuple& b) const;

  /// E_{n]} at level r: alpha chain up after alpha* chain down to level n.
  Tuple expect_past(int n, int r, const Tuple& c) const;
  /// E_{[n} at level r: beta chain from level r-n, after its adjoint.
  Tuple expect_future(int n, int r, const Tuple& c) const;

  /// Subalgebra of level r generated by J_lo(B), ..., J_hi(B).
  Subalgebra generated_subalgebra(int lo, int hi, int r) const;
  /// E_{[n} as the GNS projection onto generated_subalgebra(n, r, r).
  Tuple expect_future_projection(int n, int r, const Tuple& c) const;
  /// E_{n]} as the GNS projection onto generated_subalgebra(0, n, r).
  Tuple expect_past_projection(int n, int r, const Tuple& c) const;

  /// The standard basis of level n: one matrix unit in one component.
  Tuple basis_tuple(int n, Eigen::Index index) const;
  Eigen::Index level_vec_dim(int n) const;

 private:
  void require_level(int n, int lo) const;
  void require_tuple(int n, const Tuple& b) const;

  FreeAction action_;
  TransitionSystem system_;
  int depth_;
  std::vector<std::vector<Word>> words_;
  std::vector<std::vector<double>> weights_;
  // For level n >= 1 and word index: prefix / suffix index at level n-1.
  std::vector<std::vector<std::size_t>> prefix_;
  std::vector<std::vector<std::size_t>> suffix_;
  mutable std::map<int, SpacePtr> spaces_;
};

/// Maximum tuple distance sqrt(sum_w ||a_w - b_w||_F^2).
double tuple_distance(const DilationTower::Tuple& a,
                      const DilationTower::Tuple& b);

/// alpha_1* o ... o alpha_n* o beta_n o ... o beta_1 (b), which equals P^n(b).
DilationTower::Tuple power_via_tower(const DilationTower& tower, int n,
                                     const DilationTower::Tuple& b);

/// beta^q o E_{n]} = E_{n+q]} o beta^q with beta^q realized as the beta
/// chain from level m = r - q to r, over the standard basis of B_m.
/// Requires n + q <= r.
ResidualRecord check_covariance(const DilationTower& tower, int n, int q,
                                int r, double tolerance = tol::kDilation);

}  // namespace ncergo
