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

#include "ncergo/free_averaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncergo/errors.hpp"

namespace ncergo {

// ---------------------------------------------------------------------------
// TransitionSystem

TransitionSystem::TransitionSystem(std::vector<int> labels, RMatrix p,
                                   RVector stationary)
    : labels_(std::move(labels)),
      p_(std::move(p)),
      stationary_(std::move(stationary)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (n == 0) throw FixtureError("empty index set");
  if (p_.rows() != n || p_.cols() != n || stationary_.size() != n) {
    throw FixtureError("transition data does not match the index set");
  }
  if ((p_.array() < 0.0).any()) throw FixtureError("negative transition");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(p_.row(i).sum() - 1.0) > 1e-14) {
      throw FixtureError("transition matrix row " + std::to_string(i) +
                         " does not sum to 1");
    }
  }
  if ((stationary_.array() <= 0.0).any()) {
    throw FixtureError("stationary distribution must be strictly positive");
  }
  if (std::abs(stationary_.sum() - 1.0) > 1e-13) {
    throw FixtureError("stationary distribution does not sum to 1");
  }
  const RVector moved = p_.transpose() * stationary_;
  if ((moved - stationary_).cwiseAbs().maxCoeff() > 1e-13) {
    throw FixtureError("distribution is not stationary for the matrix");
  }
}

TransitionSystem TransitionSystem::nevo_stein(int d) {
  if (d < 2) {
    throw FixtureError("degenerate transition system: d = " +
                       std::to_string(d) + " (need d >= 2)");
  }
  const int m = 2 * d;
  std::vector<int> labels;
  for (int i = -d; i <= d; ++i) {
    if (i != 0) labels.push_back(i);
  }
  RMatrix p(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      p(i, j) = labels[i] == -labels[j] ? 0.0 : 1.0 / (2.0 * d - 1.0);
    }
  }
  TransitionSystem out(std::move(labels), std::move(p),
                       RVector::Constant(m, 1.0 / m));
  out.nevo_stein_d_ = d;
  return out;
}

std::size_t TransitionSystem::index_of(int label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw InvalidArgument("label " + std::to_string(label) +
                          " is not in the index set");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------
// Words

std::vector<Word> enumerate_words(const TransitionSystem& system, int n,
                                  std::size_t cap) {
  if (n < 0) throw InvalidArgument("word length must be nonnegative");
  std::vector<Word> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  const std::size_t m = system.size();
  Word w;
  w.reserve(static_cast<std::size_t>(n));
  auto dfs = [&](auto&& self) -> void {
    if (w.size() == static_cast<std::size_t>(n)) {
      if (out.size() >= cap) {
        throw ResourceCapError("word enumeration exceeds the cap of " +
                               std::to_string(cap));
      }
      out.push_back(w);
      return;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!w.empty() && system.p(w.back(), j) == 0.0) continue;
      w.push_back(j);
      self(self);
      w.pop_back();
    }
  };
  dfs(dfs);
  return out;
}

double word_weight(const TransitionSystem& system, const Word& w) {
  if (w.empty()) return 1.0;
  double p = system.stationary(w[0]);
  for (std::size_t k = 1; k < w.size(); ++k) p *= system.p(w[k - 1], w[k]);
  return p;
}

std::vector<std::vector<int>> enumerate_sphere(int d, int n, std::size_t cap) {
  const auto sys = TransitionSystem::nevo_stein(d);
  std::vector<std::vector<int>> out;
  for (const auto& w : enumerate_words(sys, n, cap)) {
    std::vector<int> labels;
    labels.reserve(w.size());
    for (auto i : w) labels.push_back(sys.label(i));
    out.push_back(std::move(labels));
  }
  return out;
}

// ---------------------------------------------------------------------------
// FreeAction

FreeAction::FreeAction(SpacePtr space, std::vector<CpMap> generators)
    : space_(std::move(space)), generators_(std::move(generators)) {
  if (generators_.empty()) throw InvalidArgument("action needs generators");
  const auto n = space_->vec_dim();
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const auto& g = generators_[i];
    const std::string name = "sigma_" + std::to_string(i + 1);
    if (!(g.source()->structure() == space_->structure()) ||
        !(g.target()->structure() == space_->structure())) {
      throw PreconditionError(name + " is not an endomorphism of the space");
    }
    if (!check_stationary(g).stationary()) {
      throw PreconditionError(name + " is not stationary");
    }
    CpMap inv = g.inverse();
    const double r =
        (g.matrix() * inv.matrix() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (r > 1e-11) {
      throw PreconditionError(name + " o inverse differs from the identity by " +
                              std::to_string(r));
    }
    inverses_.push_back(std::move(inv));
  }
}

const CpMap& FreeAction::sigma(int label) const {
  const int d = this->d();
  if (label == 0 || label < -d || label > d) {
    throw InvalidArgument("generator label " + std::to_string(label) +
                          " out of range");
  }
  const auto k = static_cast<std::size_t>(std::abs(label) - 1);
  return label > 0 ? generators_[k] : inverses_[k];
}

Element FreeAction::apply_word(const std::vector<int>& labels,
                               const Element& x) const {
  Element y = x;
  for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
    y = sigma(*it).apply(y);
  }
  return y;
}

// ---------------------------------------------------------------------------
// BufetovOperator

BufetovOperator::BufetovOperator(TransitionSystem system,
                                 std::vector<CpMap> components,
                                 BufetovForm form)
    : system_(std::move(system)), components_(std::move(components)), form_(form) {
  if (components_.size() != system_.size()) {
    throw ShapeError("one component map per index is required");
  }
  const auto& s = components_.front().source()->structure();
  for (const auto& c : components_) {
    if (!(c.source()->structure() == s) || !(c.target()->structure() == s)) {
      throw ShapeError("components must be endomorphisms of one space");
    }
  }
}

BufetovOperator BufetovOperator::from_action(const FreeAction& action,
                                             TransitionSystem system) {
  if (system.nevo_stein_rank() != action.d()) {
    throw InvalidArgument("transition system does not match the action rank");
  }
  std::vector<CpMap> comps;
  for (int label : system.labels()) comps.push_back(action.sigma(label));
  BufetovOperator out(std::move(system), std::move(comps), BufetovForm::kRow);
  out.action_ = action;
  return out;
}

void BufetovOperator::require_tuple(const Tuple& b) const {
  if (b.size() != system_.size()) {
    throw ShapeError("tuple has " + std::to_string(b.size()) +
                     " components, expected " + std::to_string(system_.size()));
  }
  for (const auto& x : b) {
    if (!x.conforms(space()->structure())) {
      throw ShapeError("tuple component does not conform to the space");
    }
  }
}

BufetovOperator::Tuple BufetovOperator::apply(const Tuple& b) const {
  require_tuple(b);
  const std::size_t m = system_.size();
  const auto& s = space()->structure();
  Tuple out;
  out.reserve(m);
  if (form_ == BufetovForm::kRow) {
    for (std::size_t i = 0; i < m; ++i) {
      Element mix = Element::zero(s);
      for (std::size_t j = 0; j < m; ++j) {
        const double w = system_.p(i, j);
        if (w != 0.0) mix += Complex(w) * b[j];
      }
      out.push_back(components_[i].apply(mix));
    }
  } else {
    Tuple moved;
    moved.reserve(m);
    for (std::size_t j = 0; j < m; ++j) moved.push_back(components_[j].apply(b[j]));
    for (std::size_t i = 0; i < m; ++i) {
      Element acc = Element::zero(s);
      for (std::size_t j = 0; j < m; ++j) {
        const double w = system_.stationary(j) * system_.p(j, i) /
                         system_.stationary(i);
        if (w != 0.0) acc += Complex(w) * moved[j];
      }
      out.push_back(std::move(acc));
    }
  }
  return out;
}

BufetovOperator::Tuple BufetovOperator::lift(const Element& x) const {
  if (!x.conforms(space()->structure())) {
    throw ShapeError("element does not conform to the space");
  }
  return Tuple(system_.size(), x);
}

Element BufetovOperator::average(const Tuple& b) const {
  require_tuple(b);
  Element acc = Element::zero(space()->structure());
  for (std::size_t i = 0; i < b.size(); ++i) {
    acc += Complex(system_.stationary(i)) * b[i];
  }
  return acc;
}

Complex BufetovOperator::state(const Tuple& b) const {
  return state_eval(*space(), average(b));
}

SpacePtr BufetovOperator::enlarged_space() const {
  if (enlarged_) return enlarged_;
  const auto& s = space()->structure();
  std::vector<int> dims;
  std::vector<Matrix> rho;
  for (std::size_t i = 0; i < system_.size(); ++i) {
    for (std::size_t k = 0; k < s.num_blocks(); ++k) {
      dims.push_back(s.block_dim(k));
      rho.push_back(system_.stationary(i) * space()->rho().block(k));
    }
  }
  enlarged_ = std::make_shared<const NcSpace>(BlockStructure(std::move(dims)),
                                              Element(std::move(rho)));
  return enlarged_;
}

Element BufetovOperator::pack(const Tuple& b) const {
  require_tuple(b);
  std::vector<Matrix> blocks;
  for (const auto& x : b) {
    for (const auto& blk : x.blocks()) blocks.push_back(blk);
  }
  return Element(std::move(blocks));
}

BufetovOperator::Tuple BufetovOperator::unpack(const Element& packed) const {
  const std::size_t nb = space()->structure().num_blocks();
  if (packed.num_blocks() != nb * system_.size()) {
    throw ShapeError("packed element has the wrong number of blocks");
  }
  Tuple out;
  for (std::size_t i = 0; i < system_.size(); ++i) {
    std::vector<Matrix> blocks(packed.blocks().begin() + i * nb,
                               packed.blocks().begin() + (i + 1) * nb);
    out.emplace_back(std::move(blocks));
  }
  require_tuple(out);
  return out;
}

CpMap BufetovOperator::materialize() const {
  const auto n = space()->vec_dim();
  const auto m = static_cast<Eigen::Index>(system_.size());
  Matrix big = Matrix::Zero(n * m, n * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (form_ == BufetovForm::kRow) {
        big.block(i * n, j * n, n, n) =
            system_.p(ui, uj) * components_[ui].matrix();
      } else {
        big.block(i * n, j * n, n, n) =
            (system_.stationary(uj) * system_.p(uj, ui) /
             system_.stationary(ui)) *
            components_[uj].matrix();
      }
    }
  }
  const auto big_space = enlarged_space();
  return CpMap(big_space, big_space, std::move(big));
}

// ---------------------------------------------------------------------------
// Averages

Element sphere_average_brute(const FreeAction& action, int n, const Element& x,
                             std::size_t cap) {
  const auto words = enumerate_sphere(action.d(), n, cap);
  Element acc = Element::zero(action.space()->structure());
  for (const auto& w : words) acc += action.apply_word(w, x);
  return acc * Complex(1.0 / static_cast<double>(words.size()));
}

BufetovOperator::Tuple word_power_brute(const BufetovOperator& p, int n,
                                        const Element& x, std::size_t cap) {
  if (p.form() != BufetovForm::kRow) {
    throw InvalidArgument("word expansion applies to the row form");
  }
  if (n == 0) return p.lift(x);
  const auto& sys = p.system();
  BufetovOperator::Tuple out(sys.size(), Element::zero(p.space()->structure()));
  for (const auto& w : enumerate_words(sys, n, cap)) {
    Element y = x;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      y = p.components()[*it].apply(y);
    }
    out[w[0]] += Complex(word_weight(sys, w) / sys.stationary(w[0])) * y;
  }
  return out;
}

Element sphere_average_fast(const BufetovOperator& p, int n, const Element& x) {
  if (n < 0) throw InvalidArgument("sphere radius must be nonnegative");
  auto b = p.lift(x);
  for (int k = 0; k < n; ++k) b = p.apply(b);
  return p.average(b);
}

Element cesaro_average(const BufetovOperator& p, int n, const Element& x) {
  if (n < 1) throw InvalidArgument("Cesaro index must be positive");
  auto b = p.lift(x);
  Element acc = Element::zero(p.space()->structure());
  for (int k = 0; k < n; ++k) {
    acc += p.average(b);
    if (k + 1 < n) b = p.apply(b);
  }
  return acc * Complex(1.0 / n);
}

BufetovOperator bufetov_adjoint(const BufetovOperator& p) {
  std::vector<CpMap> comps;
  const auto& sys = p.system();
  if (p.action()) {
    for (int label : sys.labels()) comps.push_back(p.action()->sigma(-label));
  } else {
    for (const auto& c : p.components()) comps.push_back(adjoint_wrt_states(c));
  }
  const auto form = p.form() == BufetovForm::kRow ? BufetovForm::kColumn
                                                  : BufetovForm::kRow;
  return BufetovOperator(sys, std::move(comps), form);
}

}  // namespace ncergo
