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

// Averages over spheres of a free group acting by automorphisms, and the
// Markov operator on A^{|I|} that reduces them to a linear recursion.
//
// Index sets are stored by position: a transition system over labels
// l_0 < l_1 < ... holds p(ij) for positions i, j, and words are sequences of
// positions. The Nevo-Stein system uses labels -d..-1, 1..d in that order.

#include <cstddef>
#include <optional>
#include <vector>

#include "ncergo/cp_map.hpp"

namespace ncergo {

inline constexpr std::size_t kDefaultWordCap = 1'000'000;

class TransitionSystem {
 public:
  /// Throws FixtureError unless p is row stochastic (1e-14), the vector is
  /// strictly positive, sums to one and is stationary (1e-13).
  TransitionSystem(std::vector<int> labels, RMatrix p, RVector stationary);

  /// p(ij) = 0 if i = -j, 1/(2d-1) otherwise; p(i) = 1/(2d). Throws
  /// FixtureError for d < 2.
  static TransitionSystem nevo_stein(int d);

  std::size_t size() const { return labels_.size(); }
  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  /// Position of `label`; InvalidArgument if absent.
  std::size_t index_of(int label) const;
  double p(std::size_t i, std::size_t j) const { return p_(i, j); }
  double stationary(std::size_t i) const { return stationary_(i); }
  const RMatrix& matrix() const { return p_; }
  const RVector& stationary() const { return stationary_; }
  /// d for a Nevo-Stein system.
  std::optional<int> nevo_stein_rank() const { return nevo_stein_d_; }

 private:
  std::vector<int> labels_;
  RMatrix p_;
  RVector stationary_;
  std::optional<int> nevo_stein_d_;
};

using Word = std::vector<std::size_t>;

/// I(n): words of length n with p_{n-1}(w) != 0, in lexicographic order of
/// positions. I(0) is the empty word. ResourceCapError beyond `cap` words.
std::vector<Word> enumerate_words(const TransitionSystem& system, int n,
                                  std::size_t cap = kDefaultWordCap);

/// p_{n-1}(w) = p(w_0) p(w_0 w_1) ... p(w_{n-2} w_{n-1}); 1 for the empty word.
double word_weight(const TransitionSystem& system, const Word& w);

/// Reduced words of length n in F_d as label sequences.
std::vector<std::vector<int>> enumerate_sphere(
    int d, int n, std::size_t cap = kDefaultWordCap);

/// Stationary automorphisms sigma_1..sigma_d with sigma_{-i} = sigma_i^{-1}.
class FreeAction {
 public:
  /// Throws PreconditionError if a generator is not a stationary,
  /// invertible endomorphism of `space`, or if sigma_i o sigma_{-i} differs
  /// from the identity by more than 1e-11.
  FreeAction(SpacePtr space, std::vector<CpMap> generators);

  const SpacePtr& space() const { return space_; }
  int d() const { return static_cast<int>(generators_.size()); }
  /// sigma_label for label in {-d..-1, 1..d}.
  const CpMap& sigma(int label) const;
  /// sigma_{w_0} o ... o sigma_{w_{n-1}}(x): the last letter acts first.
  Element apply_word(const std::vector<int>& labels, const Element& x) const;

 private:
  SpacePtr space_;
  std::vector<CpMap> generators_;
  std::vector<CpMap> inverses_;
};

enum class BufetovForm {
  /// P(b)_i = P_i(sum_j p(ij) b_j).
  kRow,
  /// P(b)_i = sum_j [p(j) p(ji) / p(i)] P_j(b_j).
  kColumn,
};

/// The Markov operator on B = A^{|I|}. Elements of B are tuples of
/// Elements indexed by position; B carries the state
/// phi_B(b) = sum_i p(i) phi(b_i).
class BufetovOperator {
 public:
  using Tuple = std::vector<Element>;

  /// components[i] acts on A for position i; all are endomorphisms of one
  /// space.
  BufetovOperator(TransitionSystem system, std::vector<CpMap> components,
                  BufetovForm form = BufetovForm::kRow);
  /// Row form with P_i = sigma_{label(i)}; the system must be Nevo-Stein of
  /// the action's rank.
  static BufetovOperator from_action(const FreeAction& action,
                                     TransitionSystem system);

  const TransitionSystem& system() const { return system_; }
  const std::vector<CpMap>& components() const { return components_; }
  BufetovForm form() const { return form_; }
  const SpacePtr& space() const { return components_.front().source(); }
  /// The action this operator was built from, if any.
  const std::optional<FreeAction>& action() const { return action_; }

  Tuple apply(const Tuple& b) const;
  /// x~ = (x, ..., x).
  Tuple lift(const Element& x) const;
  /// sum_i p(i) b_i.
  Element average(const Tuple& b) const;
  /// phi_B(b).
  Complex state(const Tuple& b) const;

  /// A^{|I|} as one block algebra with rho_B = (+)_i p(i) rho.
  SpacePtr enlarged_space() const;
  Element pack(const Tuple& b) const;
  Tuple unpack(const Element& packed) const;
  /// The operator as a CpMap on enlarged_space().
  CpMap materialize() const;

 private:
  void require_tuple(const Tuple& b) const;

  TransitionSystem system_;
  std::vector<CpMap> components_;
  BufetovForm form_;
  std::optional<FreeAction> action_;
  mutable SpacePtr enlarged_;
};

/// s_n(x) = (1/#S_n) sum_{|w| = n} sigma_w(x) by enumeration.
Element sphere_average_brute(const FreeAction& action, int n, const Element& x,
                             std::size_t cap = kDefaultWordCap);

/// P^n(x~) for a row-form operator by enumeration:
/// component i is (1/p(i)) sum_{w in I(n), w_0 = i} p_{n-1}(w) P_w(x).
BufetovOperator::Tuple word_power_brute(const BufetovOperator& p, int n,
                                        const Element& x,
                                        std::size_t cap = kDefaultWordCap);

/// sum_i p(i) P^n(x~)_i through n applications of P.
Element sphere_average_fast(const BufetovOperator& p, int n, const Element& x);

/// (1/n) sum_{k<n} sum_i p(i) P^k(x~)_i with one running power.
Element cesaro_average(const BufetovOperator& p, int n, const Element& x);

/// The adjoint with respect to phi_B. For an operator built from an action
/// the closed formula with sigma_j* = sigma_{-j} is used; otherwise the
/// components are replaced by their state adjoints. The form flips.
/// PreconditionError if a component is not stationary.
BufetovOperator bufetov_adjoint(const BufetovOperator& p);

}  // namespace ncergo
