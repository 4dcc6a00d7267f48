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

#include "ncergo/subalgebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ncergo/errors.hpp"

namespace ncergo {
namespace {

constexpr double kRankTol = 1e-9;
constexpr Eigen::Index kChunk = 256;

Element left_multiply_vec(const BlockStructure& s, const Element& g,
                          const CVector& w) {
  return g * Element::from_vec(s, w);
}

// Appends to q[:, 0:rank) the parts of c's columns orthogonal to the current
// span, block-projecting the chunk first and then Gram-Schmidt within it.
// Candidates are measured against max(own norm, scale), so near-zero
// products are not promoted to basis vectors.
void extend_orthonormal(Matrix& q, Eigen::Index& rank, Matrix c,
                        Eigen::Index cap, double scale = 0.0) {
  if (c.cols() == 0) return;
  const RVector norms = c.colwise().norm().transpose();
  for (int pass = 0; pass < 2 && rank > 0; ++pass) {
    const auto basis = q.leftCols(rank);
    c.noalias() -= basis * (basis.adjoint() * c);
  }
  const Eigen::Index start = rank;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    if (norms(j) <= 1e-300) continue;
    CVector v = c.col(j);
    for (int pass = 0; pass < 2 && rank > start; ++pass) {
      const auto fresh = q.middleCols(start, rank - start);
      v.noalias() -= fresh * (fresh.adjoint() * v);
    }
    const double n = v.norm();
    if (n <= kRankTol * std::max(norms(j), scale)) continue;
    if (rank >= cap) {
      throw ResourceCapError("subalgebra dimension exceeds the cap of " +
                             std::to_string(cap));
    }
    q.col(rank++) = v / n;
  }
}

Subalgebra orthonormal_span(SpacePtr space, const std::vector<Element>& xs) {
  const auto n = space->vec_dim();
  Matrix c(n, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    c.col(static_cast<Eigen::Index>(i)) = whiten(*space, xs[i]);
  }
  Matrix q(n, n);
  Eigen::Index rank = 0;
  const double scale = c.cols() ? c.colwise().norm().maxCoeff() : 0.0;
  for (Eigen::Index j = 0; j < c.cols(); j += kChunk) {
    extend_orthonormal(q, rank, c.middleCols(j, std::min(kChunk, c.cols() - j)),
                       n, scale);
  }
  return Subalgebra(std::move(space), q.leftCols(rank));
}

}  // namespace

CVector whiten(const NcSpace& space, const Element& x) {
  if (!x.conforms(space.structure())) {
    throw ShapeError("element does not conform to the space");
  }
  return (x * space.rho_power(0.5)).vec();
}

Element unwhiten(const NcSpace& space, const CVector& w) {
  return Element::from_vec(space.structure(), w) * space.rho_power(-0.5);
}

// ---------------------------------------------------------------------------
// Subalgebra

Subalgebra::Subalgebra(SpacePtr ambient, Matrix whitened_basis)
    : ambient_(std::move(ambient)), whitened_(std::move(whitened_basis)) {
  if (whitened_.rows() != ambient_->vec_dim()) {
    throw ShapeError("subalgebra basis has the wrong length");
  }
}

Element Subalgebra::basis(Eigen::Index i) const {
  return unwhiten(*ambient_, whitened_.col(i));
}

std::vector<Element> Subalgebra::basis() const {
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(dim()));
  for (Eigen::Index i = 0; i < dim(); ++i) out.push_back(basis(i));
  return out;
}

Element Subalgebra::project(const Element& x) const {
  const CVector w = whiten(*ambient_, x);
  return unwhiten(*ambient_, whitened_ * (whitened_.adjoint() * w));
}

double Subalgebra::span_residual(const Element& x) const {
  const CVector w = whiten(*ambient_, x);
  const CVector r = w - whitened_ * (whitened_.adjoint() * w);
  return r.norm() / std::max(1.0, w.norm());
}

Matrix Subalgebra::projection_matrix() const {
  const auto& s = ambient_->structure();
  const auto n = s.vec_dim();
  // Whitening acts as x -> x rho^{1/2}: vec(x R) = (R^T (x) I) vec(x).
  const Element half = ambient_->rho_power(0.5);
  const Element inv_half = ambient_->rho_power(-0.5);
  Matrix w = Matrix::Zero(n, n);
  Matrix winv = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const int d = s.block_dim(k);
    const auto off = s.vec_offset(k);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        w.block(off + a * d, off + b * d, d, d) =
            half.block(k)(b, a) * Matrix::Identity(d, d);
        winv.block(off + a * d, off + b * d, d, d) =
            inv_half.block(k)(b, a) * Matrix::Identity(d, d);
      }
    }
  }
  return winv * whitened_ * (whitened_.adjoint() * w);
}

// ---------------------------------------------------------------------------
// Checks

ClosureReport check_closure(const Subalgebra& sub, Eigen::Index max_pairs_dim) {
  ClosureReport r;
  const auto& s = sub.ambient()->structure();
  r.identity_residual = sub.span_residual(Element::identity(s));
  const auto basis = sub.basis();
  for (const auto& b : basis) {
    r.adjoint_residual = std::max(r.adjoint_residual,
                                  sub.span_residual(b.adjoint()));
  }
  const auto m = std::min<Eigen::Index>(sub.dim(), max_pairs_dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& a = basis[static_cast<std::size_t>(i)];
      const auto& b = basis[static_cast<std::size_t>(j)];
      r.product_residual = std::max(r.product_residual,
                                    sub.span_residual(a * b));
    }
  }
  return r;
}

double modular_invariance_residual(const Subalgebra& sub) {
  const Element l = sub.ambient()->log_rho();
  double worst = 0.0;
  for (const auto& b : sub.basis()) {
    worst = std::max(worst, sub.span_residual(l * b - b * l));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Constructions

Subalgebra span_subalgebra(SpacePtr space, std::span<const Element> spanning) {
  std::vector<Element> xs;
  xs.push_back(Element::identity(space->structure()));
  xs.insert(xs.end(), spanning.begin(), spanning.end());
  Subalgebra sub = orthonormal_span(space, xs);
  const auto c = check_closure(sub, sub.dim());
  if (!c.closed(tol::kSpan)) {
    throw VerificationError(
        "span is not a unital *-subalgebra (identity " +
        std::to_string(c.identity_residual) + ", adjoint " +
        std::to_string(c.adjoint_residual) + ", product " +
        std::to_string(c.product_residual) + ")");
  }
  return sub;
}

Subalgebra generate_subalgebra(SpacePtr space,
                               std::span<const Element> generators,
                               Eigen::Index cap) {
  const auto& s = space->structure();
  const auto n = space->vec_dim();
  if (n > kDenseDimCap) {
    throw ResourceCapError("ambient dimension " + std::to_string(n) +
                           " exceeds the dense cap of " +
                           std::to_string(kDenseDimCap));
  }
  if (cap <= 0 || cap > n) cap = n;
  std::vector<Element> gens;
  for (const auto& g : generators) {
    if (!g.conforms(s)) throw ShapeError("generator does not conform");
    gens.push_back(g);
  }
  const std::size_t given = gens.size();
  for (std::size_t i = 0; i < given; ++i) {
    Element a = gens[i].adjoint();
    const bool present = std::any_of(
        gens.begin(), gens.begin() + static_cast<std::ptrdiff_t>(given),
        [&](const Element& h) { return max_abs_diff(a, h) == 0.0; });
    if (!present) gens.push_back(std::move(a));
  }
  Matrix q(n, cap);
  Eigen::Index rank = 0;
  {
    Matrix c(n, static_cast<Eigen::Index>(gens.size()) + 1);
    c.col(0) = whiten(*space, Element::identity(s));
    for (std::size_t i = 0; i < gens.size(); ++i) {
      c.col(static_cast<Eigen::Index>(i) + 1) = whiten(*space, gens[i]);
    }
    const double col_scale = c.colwise().norm().maxCoeff();
    extend_orthonormal(q, rank, std::move(c), cap, col_scale);
  }
  double scale = 1.0;
  for (const auto& g : gens) scale = std::max(scale, g.op_norm());
  // Left multiplication commutes with whitening, so candidates are formed
  // directly on whitened vectors.
  Eigen::Index frontier_begin = 0;
  while (frontier_begin < rank && rank < n) {
    const Eigen::Index frontier_end = rank;
    Matrix chunk(n, kChunk);
    Eigen::Index filled = 0;
    for (const auto& g : gens) {
      for (Eigen::Index i = frontier_begin; i < frontier_end; ++i) {
        chunk.col(filled++) = left_multiply_vec(s, g, q.col(i)).vec();
        if (filled == kChunk) {
          extend_orthonormal(q, rank, chunk, cap, scale);
          filled = 0;
        }
      }
    }
    extend_orthonormal(q, rank, chunk.leftCols(filled), cap, scale);
    frontier_begin = frontier_end;
  }
  return Subalgebra(std::move(space), q.leftCols(rank));
}

Subalgebra fixed_point_algebra(SpacePtr space, std::span<const CpMap> maps) {
  if (maps.empty()) throw InvalidArgument("fixed_point_algebra needs maps");
  const auto n = space->vec_dim();
  Matrix stacked(n * static_cast<Eigen::Index>(maps.size()), n);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& m = maps[i];
    if (!(m.source()->structure() == space->structure()) ||
        !(m.target()->structure() == space->structure())) {
      throw ShapeError("fixed_point_algebra: map is not an endomorphism");
    }
    const auto st = check_stationary(m);
    if (!st.stationary()) {
      throw PreconditionError("fixed_point_algebra: map " + std::to_string(i) +
                              " is not stationary");
    }
    stacked.middleRows(static_cast<Eigen::Index>(i) * n, n) =
        m.matrix() - Matrix::Identity(n, n);
  }
  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double thr = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  std::vector<Element> fixed;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = i < sv.size() ? sv(i) : 0.0;
    if (v <= thr) {
      fixed.push_back(Element::from_vec(space->structure(), svd.matrixV().col(i)));
    }
  }
  return span_subalgebra(std::move(space), fixed);
}

CpMap conditional_expectation(SpacePtr space, const Subalgebra& sub) {
  if (!(sub.ambient()->structure() == space->structure())) {
    throw ShapeError("subalgebra lives in a different space");
  }
  const double inv = modular_invariance_residual(sub);
  if (inv > tol::kIdentity) {
    throw PreconditionError(
        "subalgebra is not invariant under the modular group (residual " +
        std::to_string(inv) + "); no state-preserving expectation exists");
  }
  CpMap e(space, space, sub.projection_matrix());
  const Matrix& m = e.matrix();
  const auto& s = space->structure();
  auto fail = [](const std::string& what, double v) {
    std::ostringstream os;
    os << "conditional expectation is not " << what << " (residual "
       << std::scientific << v << ")";
    throw VerificationError(os.str());
  };
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (const double r = (m * m - m).cwiseAbs().maxCoeff() / scale;
      r > tol::kIdentity) {
    fail("idempotent", r);
  }
  if (const double r = unital_residual(e); r > tol::kIdentity) fail("unital", r);
  if (const double r = check_stationary(e).state_residual; r > tol::kIdentity) {
    fail("state preserving", r);
  }
  // The projection is built through rho^{1/2}; its positivity and bimodule
  // residuals scale with that conditioning.
  const double kappa = whitening_condition(*space);
  if (const auto cp = is_completely_positive(e);
      cp.min_choi_eigenvalue < -tol::kChoi * kappa) {
    fail("completely positive", -cp.min_choi_eigenvalue);
  }
  const auto n = s.vec_dim();
  const Eigen::Index stride = std::max<Eigen::Index>(1, n / 16);
  for (Eigen::Index i = 0; i < n; i += stride) {
    const Element x = Element::matrix_unit(s, i);
    const Element ex = e.apply(x.adjoint() * x);
    for (const auto& b : ex.blocks()) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.adjoint()),
                                               Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -tol::kChoi * kappa) {
        fail("positive", -es.eigenvalues().minCoeff());
      }
    }
  }
  const double bimodule_tol = tol::kIdentity * kappa;
  const auto basis = sub.basis();
  const std::size_t nb = std::min<std::size_t>(basis.size(), 6);
  for (std::size_t ia = 0; ia < nb; ++ia) {
    for (std::size_t ib = 0; ib < nb; ++ib) {
      const auto& a = basis[ia];
      const auto& b = basis[ib];
      for (Eigen::Index i = 0; i < n; i += stride) {
        const Element x = Element::matrix_unit(s, i);
        const double r = max_abs_diff(e.apply(a * x * b), a * e.apply(x) * b) /
                         std::max(1.0, a.op_norm() * b.op_norm());
        if (r > bimodule_tol) fail("a bimodule map", r);
      }
    }
  }
  return e.verified();
}

}  // namespace ncergo
