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

#include "ncergo/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncergo/errors.hpp"

namespace ncergo {
namespace {

using Tuple = DilationTower::Tuple;

std::vector<int> word_labels(const TransitionSystem& sys, const Word& w,
                             std::size_t begin, std::size_t end) {
  std::vector<int> out;
  for (std::size_t k = begin; k < end; ++k) out.push_back(sys.label(w[k]));
  return out;
}

}  // namespace

DilationTower::DilationTower(FreeAction action, int depth,
                             std::size_t component_cap)
    : action_(std::move(action)),
      system_(TransitionSystem::nevo_stein(action_.d())),
      depth_(depth) {
  if (depth < 0) throw InvalidArgument("tower depth must be nonnegative");
  for (int n = 0; n <= depth; ++n) {
    std::vector<Word> ws;
    try {
      ws = enumerate_words(system_, n + 1, component_cap);
    } catch (const ResourceCapError&) {
      throw ResourceCapError("tower level " + std::to_string(n) +
                             " exceeds the component cap of " +
                             std::to_string(component_cap));
    }
    std::vector<double> wt;
    for (const auto& w : ws) wt.push_back(word_weight(system_, w));
    words_.push_back(std::move(ws));
    weights_.push_back(std::move(wt));
  }
  prefix_.resize(static_cast<std::size_t>(depth) + 1);
  suffix_.resize(static_cast<std::size_t>(depth) + 1);
  for (int n = 1; n <= depth; ++n) {
    std::map<Word, std::size_t> index;
    const auto& lower = words_[static_cast<std::size_t>(n) - 1];
    for (std::size_t i = 0; i < lower.size(); ++i) index.emplace(lower[i], i);
    for (const auto& w : words_[static_cast<std::size_t>(n)]) {
      const Word pre(w.begin(), w.end() - 1);
      const Word suf(w.begin() + 1, w.end());
      prefix_[static_cast<std::size_t>(n)].push_back(index.at(pre));
      suffix_[static_cast<std::size_t>(n)].push_back(index.at(suf));
    }
  }
}

void DilationTower::require_level(int n, int lo) const {
  if (n < lo || n > depth_) {
    throw InvalidArgument("tower level " + std::to_string(n) +
                          " outside [" + std::to_string(lo) + ", " +
                          std::to_string(depth_) + "]");
  }
}

void DilationTower::require_tuple(int n, const Tuple& b) const {
  if (b.size() != level_size(n)) {
    throw ShapeError("tuple of size " + std::to_string(b.size()) +
                     " does not match level " + std::to_string(n));
  }
  for (const auto& x : b) {
    if (!x.conforms(base()->structure())) {
      throw ShapeError("tuple component does not conform to the base space");
    }
  }
}

const std::vector<Word>& DilationTower::words(int n) const {
  require_level(n, 0);
  return words_[static_cast<std::size_t>(n)];
}

double DilationTower::weight(int n, std::size_t idx) const {
  require_level(n, 0);
  return weights_[static_cast<std::size_t>(n)][idx];
}

Complex DilationTower::state(int n, const Tuple& b) const {
  require_level(n, 0);
  require_tuple(n, b);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    acc += weight(n, i) * state_eval(*base(), b[i]);
  }
  return acc;
}

Tuple DilationTower::one(int n) const {
  return Tuple(level_size(n), Element::identity(base()->structure()));
}

SpacePtr DilationTower::level_space(int n) const {
  require_level(n, 0);
  if (auto it = spaces_.find(n); it != spaces_.end()) return it->second;
  const auto& s = base()->structure();
  std::vector<int> dims;
  std::vector<Matrix> rho;
  for (std::size_t i = 0; i < level_size(n); ++i) {
    for (std::size_t k = 0; k < s.num_blocks(); ++k) {
      dims.push_back(s.block_dim(k));
      rho.push_back(weight(n, i) * base()->rho().block(k));
    }
  }
  auto sp = std::make_shared<const NcSpace>(BlockStructure(std::move(dims)),
                                            Element(std::move(rho)));
  spaces_.emplace(n, sp);
  return sp;
}

Element DilationTower::pack(int n, const Tuple& b) const {
  require_tuple(n, b);
  std::vector<Matrix> blocks;
  for (const auto& x : b) {
    for (const auto& blk : x.blocks()) blocks.push_back(blk);
  }
  return Element(std::move(blocks));
}

Tuple DilationTower::unpack(int n, const Element& x) const {
  const std::size_t nb = base()->structure().num_blocks();
  if (x.num_blocks() != nb * level_size(n)) {
    throw ShapeError("packed element does not match level " + std::to_string(n));
  }
  Tuple out;
  for (std::size_t i = 0; i < level_size(n); ++i) {
    out.emplace_back(std::vector<Matrix>(x.blocks().begin() + i * nb,
                                         x.blocks().begin() + (i + 1) * nb));
  }
  return out;
}

Tuple DilationTower::alpha(int n, const Tuple& b) const {
  require_level(n, 1);
  require_tuple(n - 1, b);
  Tuple out;
  for (auto i : prefix_[static_cast<std::size_t>(n)]) out.push_back(b[i]);
  return out;
}

Tuple DilationTower::beta(int n, const Tuple& b) const {
  require_level(n, 1);
  require_tuple(n - 1, b);
  const auto& ws = words(n);
  Tuple out;
  for (std::size_t k = 0; k < ws.size(); ++k) {
    const int label = system_.label(ws[k][0]);
    out.push_back(action_.sigma(label).apply(
        b[suffix_[static_cast<std::size_t>(n)][k]]));
  }
  return out;
}

Tuple DilationTower::alpha_star(int n, const Tuple& b) const {
  require_level(n, 1);
  require_tuple(n, b);
  Tuple out(level_size(n - 1), Element::zero(base()->structure()));
  const auto& ws = words(n);
  for (std::size_t k = 0; k < ws.size(); ++k) {
    const auto& w = ws[k];
    const double p = system_.p(w[w.size() - 2], w.back());
    out[prefix_[static_cast<std::size_t>(n)][k]] += Complex(p) * b[k];
  }
  return out;
}

Tuple DilationTower::beta_star(int n, const Tuple& b) const {
  require_level(n, 1);
  require_tuple(n, b);
  Tuple out(level_size(n - 1), Element::zero(base()->structure()));
  const auto& ws = words(n);
  for (std::size_t k = 0; k < ws.size(); ++k) {
    const auto& w = ws[k];
    const double c =
        system_.stationary(w[0]) * system_.p(w[0], w[1]) / system_.stationary(w[1]);
    const int label = system_.label(w[0]);
    out[suffix_[static_cast<std::size_t>(n)][k]] +=
        Complex(c) * action_.sigma(-label).apply(b[k]);
  }
  return out;
}

Tuple DilationTower::alpha_chain(int from, int to, const Tuple& b) const {
  if (from > to) throw InvalidArgument("alpha chain must go up");
  Tuple x = b;
  for (int m = from + 1; m <= to; ++m) x = alpha(m, x);
  return x;
}

Tuple DilationTower::beta_chain(int from, int to, const Tuple& b) const {
  if (from > to) throw InvalidArgument("beta chain must go up");
  Tuple x = b;
  for (int m = from + 1; m <= to; ++m) x = beta(m, x);
  return x;
}

Tuple DilationTower::embed_J(int q, int r, const Tuple& b) const {
  require_level(r, 0);
  if (q < 0 || q > r) throw InvalidArgument("J_q needs 0 <= q <= r");
  require_tuple(0, b);
  Tuple out;
  for (const auto& w : words(r)) {
    out.push_back(action_.apply_word(
        word_labels(system_, w, 0, static_cast<std::size_t>(q)),
        b[w[static_cast<std::size_t>(q)]]));
  }
  return out;
}

Tuple DilationTower::embed_J_composed(int q, int r, const Tuple& b) const {
  require_level(r, 0);
  if (q < 0 || q > r) throw InvalidArgument("J_q needs 0 <= q <= r");
  return alpha_chain(q, r, beta_chain(0, q, b));
}

Tuple DilationTower::expect_past(int n, int r, const Tuple& c) const {
  require_level(r, 0);
  if (n < 0 || n > r) throw InvalidArgument("E_{n]} needs 0 <= n <= r");
  Tuple x = c;
  for (int m = r; m > n; --m) x = alpha_star(m, x);
  return alpha_chain(n, r, x);
}

Tuple DilationTower::expect_future(int n, int r, const Tuple& c) const {
  require_level(r, 0);
  if (n < 0 || n > r) throw InvalidArgument("E_{[n} needs 0 <= n <= r");
  Tuple x = c;
  for (int m = r; m > r - n; --m) x = beta_star(m, x);
  return beta_chain(r - n, r, x);
}

Subalgebra DilationTower::generated_subalgebra(int lo, int hi, int r) const {
  require_level(r, 0);
  if (lo < 0 || lo > hi || hi > r) {
    throw InvalidArgument("generated subalgebra needs 0 <= lo <= hi <= r");
  }
  if (level_vec_dim(r) > kDenseDimCap) {
    throw ResourceCapError("level " + std::to_string(r) + " has dimension " +
                           std::to_string(level_vec_dim(r)) +
                           ", above the dense cap of " +
                           std::to_string(kDenseDimCap));
  }
  // B is generated by the block units and the matrix units E_{j,j+1} of
  // each component.
  const auto& s = base()->structure();
  std::vector<Tuple> b_gens;
  for (std::size_t i = 0; i < level_size(0); ++i) {
    for (std::size_t k = 0; k < s.num_blocks(); ++k) {
      const int d = s.block_dim(k);
      for (int j = -1; j < d - 1; ++j) {
        Tuple t(level_size(0), Element::zero(s));
        if (j < 0) {
          t[i].block(k).setIdentity();
        } else {
          t[i].block(k)(j, j + 1) = 1.0;
        }
        b_gens.push_back(std::move(t));
      }
    }
  }
  std::vector<Element> gens;
  for (int k = lo; k <= hi; ++k) {
    for (const auto& g : b_gens) gens.push_back(pack(r, embed_J(k, r, g)));
  }
  return generate_subalgebra(level_space(r), gens);
}

Tuple DilationTower::expect_future_projection(int n, int r,
                                              const Tuple& c) const {
  const Subalgebra sub = generated_subalgebra(n, r, r);
  return unpack(r, sub.project(pack(r, c)));
}

Tuple DilationTower::expect_past_projection(int n, int r, const Tuple& c) const {
  const Subalgebra sub = generated_subalgebra(0, n, r);
  return unpack(r, sub.project(pack(r, c)));
}

Eigen::Index DilationTower::level_vec_dim(int n) const {
  return static_cast<Eigen::Index>(level_size(n)) * base()->vec_dim();
}

Tuple DilationTower::basis_tuple(int n, Eigen::Index index) const {
  const auto per = base()->vec_dim();
  if (index < 0 || index >= level_vec_dim(n)) {
    throw InvalidArgument("basis index out of range");
  }
  Tuple out(level_size(n), Element::zero(base()->structure()));
  out[static_cast<std::size_t>(index / per)] =
      Element::matrix_unit(base()->structure(), index % per);
  return out;
}

double tuple_distance(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) throw ShapeError("tuples differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = frobenius_distance(a[i], b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

Tuple power_via_tower(const DilationTower& tower, int n, const Tuple& b) {
  Tuple x = tower.beta_chain(0, n, b);
  for (int m = n; m >= 1; --m) x = tower.alpha_star(m, x);
  return x;
}

ResidualRecord check_covariance(const DilationTower& tower, int n, int q, int r,
                                double tolerance) {
  if (n < 0 || q < 0 || n + q > r) {
    throw InvalidArgument("covariance check needs n + q <= r");
  }
  const int m = r - q;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < tower.level_vec_dim(m); ++i) {
    const Tuple c = tower.basis_tuple(m, i);
    const Tuple lhs = tower.beta_chain(m, r, tower.expect_past(n, m, c));
    const Tuple rhs = tower.expect_past(n + q, r, tower.beta_chain(m, r, c));
    worst = std::max(worst, tuple_distance(lhs, rhs));
  }
  return make_record("covariance", {n, q, r}, worst, tolerance);
}

}  // namespace ncergo
