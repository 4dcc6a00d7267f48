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

// Reference computations for tests, written directly from definitions and
// kept separate from the library's fast paths.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ncergo/free_averaging.hpp"

namespace oracle {

using ncergo::Complex;
using ncergo::Element;
using ncergo::FreeAction;
using ncergo::Matrix;
using ncergo::NcSpace;
using CVec = Eigen::VectorXcd;

// phi(x) = sum_k sum_ij rho_k(i, j) x_k(j, i).
inline Complex trace_state(const NcSpace& space, const Element& x) {
  Complex acc = 0.0;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) {
    const Matrix& r = space.rho().block(k);
    const Matrix& b = x.block(k);
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      for (Eigen::Index j = 0; j < r.cols(); ++j) acc += r(i, j) * b(j, i);
    }
  }
  return acc;
}

// Labels -d..-1, 1..d in the order the Nevo-Stein system uses.
inline std::vector<int> labels(int d) {
  std::vector<int> out;
  for (int i = -d; i <= d; ++i) {
    if (i != 0) out.push_back(i);
  }
  return out;
}

inline void extend(int d, int n, std::vector<int>& w,
                   std::vector<std::vector<int>>& out) {
  if (static_cast<int>(w.size()) == n) {
    out.push_back(w);
    return;
  }
  for (int l : labels(d)) {
    if (!w.empty() && w.back() == -l) continue;
    w.push_back(l);
    extend(d, n, w, out);
    w.pop_back();
  }
}

inline std::vector<std::vector<int>> reduced_words(int d, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> w;
  extend(d, n, w, out);
  return out;
}

// Average of sigma_w(x) over all reduced words of length n.
inline Element brute_sphere(const FreeAction& a, int n, const Element& x) {
  const auto words = reduced_words(a.d(), n);
  Element acc = Element::zero(a.space()->structure());
  for (const auto& w : words) {
    Element y = x;
    for (auto it = w.rbegin(); it != w.rend(); ++it) y = a.sigma(*it).apply(y);
    acc += y;
  }
  return acc * Complex(1.0 / static_cast<double>(words.size()));
}

// Matrix of s_n by dynamic programming over the first letter.
inline Matrix sphere_matrix(const FreeAction& a, int n) {
  const auto ls = labels(a.d());
  const auto dim = a.space()->vec_dim();
  if (n == 0) return Matrix::Identity(dim, dim);
  std::vector<Matrix> t;
  for (int l : ls) t.push_back(a.sigma(l).matrix());
  for (int k = 1; k < n; ++k) {
    std::vector<Matrix> next;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      Matrix acc = Matrix::Zero(dim, dim);
      for (std::size_t j = 0; j < ls.size(); ++j) {
        if (ls[j] != -ls[i]) acc += t[j];
      }
      next.push_back(a.sigma(ls[i]).matrix() * acc);
    }
    t = std::move(next);
  }
  Matrix s = Matrix::Zero(dim, dim);
  for (const auto& m : t) s += m;
  const double count = 2.0 * a.d() * std::pow(2.0 * a.d() - 1.0, n - 1);
  return s / count;
}

// Dense Bufetov operator on the concatenated tuple vector:
// P(b)_i = sigma_i(sum_j p(ij) b_j) with the Nevo-Stein weights.
inline Matrix bufetov_matrix(const FreeAction& a) {
  const auto ls = labels(a.d());
  const auto dim = a.space()->vec_dim();
  const auto m = static_cast<Eigen::Index>(ls.size());
  Matrix p = Matrix::Zero(m * dim, m * dim);
  const double w = 1.0 / (2.0 * a.d() - 1.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (ls[std::size_t(j)] == -ls[std::size_t(i)]) continue;
      p.block(i * dim, j * dim, dim, dim) = w * a.sigma(ls[std::size_t(i)]).matrix();
    }
  }
  return p;
}

// U(b)_i = sigma_i(b_{-i}).
inline Matrix symmetry_matrix(const FreeAction& a) {
  const auto ls = labels(a.d());
  const auto dim = a.space()->vec_dim();
  const auto m = static_cast<Eigen::Index>(ls.size());
  Matrix u = Matrix::Zero(m * dim, m * dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (ls[std::size_t(j)] == -ls[std::size_t(i)]) {
        u.block(i * dim, j * dim, dim, dim) = a.sigma(ls[std::size_t(i)]).matrix();
      }
    }
  }
  return u;
}

// Bilinear pairing matrix of phi(y a) built entry by entry from rho.
inline Matrix pairing(const NcSpace& space) {
  const auto& s = space.structure();
  const auto n = s.vec_dim();
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Element y = Element::matrix_unit(s, i);
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = trace_state(space, y * Element::matrix_unit(s, j));
    }
  }
  return g;
}

// Solves phi_src(R(b) a) = phi_tgt(b M(a)) for R given both pairings.
inline Matrix state_adjoint(const Matrix& m, const Matrix& g_src, const Matrix& g_tgt) {
  return g_src.transpose().fullPivLu().solve(m.transpose() * g_tgt.transpose());
}

// Pairing on the tuple space with the uniform stationary weights.
inline Matrix tuple_pairing(const NcSpace& space, int d) {
  const Matrix g = pairing(space);
  const auto dim = g.rows();
  const Eigen::Index m = 2 * d;
  Matrix out = Matrix::Zero(m * dim, m * dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.block(i * dim, i * dim, dim, dim) = g / static_cast<double>(m);
  }
  return out;
}

inline CVec pack(const std::vector<Element>& t) {
  const auto dim = t.front().vec().size();
  CVec v(dim * static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    v.segment(static_cast<Eigen::Index>(i) * dim, dim) = t[i].vec();
  }
  return v;
}

// ||rho^{1/2p} x rho^{1/2p}||_{S_p}, from an eigendecomposition of each block.
inline double lp_norm(const NcSpace& space, double p, const Element& x) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& b : x.blocks()) {
      m = std::max(m, Eigen::JacobiSVD<Matrix>(b).singularValues()(0));
    }
    return m;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(space.rho().block(k));
    const Eigen::VectorXd pw = es.eigenvalues().array().pow(1.0 / (2.0 * p));
    const Matrix w = es.eigenvectors() * pw.cast<Complex>().asDiagonal() *
                     es.eigenvectors().adjoint();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Matrix>(w * x.block(k) * w).singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv(i), p);
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace oracle
