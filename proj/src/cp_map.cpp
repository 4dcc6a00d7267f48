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

#include "ncergo/cp_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ncergo/errors.hpp"
#include "ncergo/kernels.hpp"

namespace ncergo {
namespace {

bool same_space(const NcSpace& a, const NcSpace& b) {
  if (&a == &b) return true;
  if (!(a.structure() == b.structure())) return false;
  return max_abs_diff(a.rho(), b.rho()) <= 1e-14;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Minimum eigenvalue over the blocks of the Hermitian part of x, and the
// largest anti-Hermitian entry.
std::pair<double, double> hermitian_min_eig(const Element& x) {
  double lo = std::numeric_limits<double>::infinity();
  double skew = 0.0;
  for (const auto& b : x.blocks()) {
    Matrix h = 0.5 * (b + b.adjoint());
    skew = std::max(skew, (b - b.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return {lo, skew};
}

// Density of the functional x -> g vec(x).
Element density_of(const BlockStructure& s, const Eigen::RowVectorXcd& g) {
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const int d = s.block_dim(k);
    const Eigen::Index off = s.vec_offset(k);
    Matrix b(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) b(i, j) = g(off + j + i * d);
    }
    blocks.push_back(std::move(b));
  }
  return Element(std::move(blocks));
}

double modular_scale(const NcSpace& s) {
  return std::max(1.0, s.modular_generator().cwiseAbs().maxCoeff());
}

// Unitary change of vec coordinates into the eigenbasis of rho:
// x -> V^* x V per block. There the pairing and modular matrices are
// monomial.
Matrix eigen_change(const NcSpace& space) {
  const auto& st = space.structure();
  const auto n = space.vec_dim();
  Matrix c = Matrix::Zero(n, n);
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < st.num_blocks(); ++k) {
    const Matrix& v = space.eigenvectors(k);
    const auto d2 = v.rows() * v.rows();
    c.block(off, off, d2, d2) = kron(v.transpose(), v.adjoint());
    off += d2;
  }
  return c;
}

// log(lambda_i) - log(lambda_j) for each matrix unit E_ij of the eigenbasis,
// in vec order.
RVector modular_frequencies(const NcSpace& space) {
  RVector w(space.vec_dim());
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < space.structure().num_blocks(); ++k) {
    const RVector& ev = space.eigenvalues(k);
    const auto d = ev.size();
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        w(off + j * d + i) = std::log(ev(i)) - std::log(ev(j));
      }
    }
    off += d * d;
  }
  return w;
}

// Solves A X = B for A with one dominant entry per row, dividing entrywise.
Matrix solve_monomial(const Matrix& a, const Matrix& b) {
  Matrix x = Matrix::Zero(a.cols(), b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    Eigen::Index c = 0;
    a.row(r).cwiseAbs().maxCoeff(&c);
    x.row(c) = b.row(r) / a(r, c);
  }
  return x;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// CpMap

CpMap::CpMap(SpacePtr source, SpacePtr target, Matrix matrix)
    : source_(std::move(source)),
      target_(std::move(target)),
      matrix_(std::move(matrix)) {
  if (!source_ || !target_) throw InvalidArgument("null space");
  if (matrix_.rows() != target_->vec_dim() ||
      matrix_.cols() != source_->vec_dim()) {
    throw ShapeError("map matrix is " + std::to_string(matrix_.rows()) + "x" +
                     std::to_string(matrix_.cols()) + ", expected " +
                     std::to_string(target_->vec_dim()) + "x" +
                     std::to_string(source_->vec_dim()));
  }
}

CpMap CpMap::identity(SpacePtr space) {
  const auto n = space->vec_dim();
  return CpMap(space, space, Matrix::Identity(n, n));
}

CpMap CpMap::conjugation(SpacePtr space, const Element& u) {
  const auto& s = space->structure();
  if (!u.conforms(s)) throw ShapeError("unitary does not conform to space");
  Matrix m = Matrix::Zero(s.vec_dim(), s.vec_dim());
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const int d = s.block_dim(k);
    const auto off = s.vec_offset(k);
    // vec(u x u*) = (conj(u) (x) u) vec(x)
    m.block(off, off, d * d, d * d) = kron(u.block(k).conjugate(), u.block(k));
  }
  return CpMap(space, space, std::move(m));
}

CpMap CpMap::kraus(SpacePtr source, SpacePtr target,
                   std::span<const Matrix> ops) {
  const auto& ss = source->structure();
  const auto& ts = target->structure();
  for (const auto& k : ops) {
    if (k.rows() != ts.total_dim() || k.cols() != ss.total_dim()) {
      throw ShapeError("Kraus operator has the wrong shape");
    }
  }
  Matrix m(ts.vec_dim(), ss.vec_dim());
  for (Eigen::Index c = 0; c < ss.vec_dim(); ++c) {
    const Matrix e = Element::matrix_unit(ss, c).to_ambient();
    Matrix acc = Matrix::Zero(ts.total_dim(), ts.total_dim());
    for (const auto& k : ops) acc += k * e * k.adjoint();
    m.col(c) = Element::from_ambient(ts, acc).vec();
  }
  return CpMap(std::move(source), std::move(target), std::move(m));
}

CpMap CpMap::block_permutation(SpacePtr space, std::vector<int> perm) {
  const auto& s = space->structure();
  if (perm.size() != s.num_blocks()) {
    throw ShapeError("permutation length differs from the block count");
  }
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] != static_cast<int>(k)) {
      throw InvalidArgument("not a permutation of the blocks");
    }
  }
  Matrix m = Matrix::Zero(s.vec_dim(), s.vec_dim());
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const auto from = static_cast<std::size_t>(perm[k]);
    if (s.block_dim(k) != s.block_dim(from)) {
      throw ShapeError("permuted blocks differ in size");
    }
    const int d = s.block_dim(k);
    for (int i = 0; i < d * d; ++i) {
      m(s.vec_offset(k) + i, s.vec_offset(from) + i) = 1.0;
    }
  }
  return CpMap(space, space, std::move(m));
}

CpMap CpMap::combination(std::span<const CpMap> maps,
                         std::span<const double> weights) {
  if (maps.empty() || maps.size() != weights.size()) {
    throw InvalidArgument("combination needs one weight per map");
  }
  Matrix m = Matrix::Zero(maps[0].matrix().rows(), maps[0].matrix().cols());
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (!same_space(*maps[i].source(), *maps[0].source()) ||
        !same_space(*maps[i].target(), *maps[0].target())) {
      throw ShapeError("combined maps act between different spaces");
    }
    m += weights[i] * maps[i].matrix();
  }
  return CpMap(maps[0].source(), maps[0].target(), std::move(m));
}

CpMap CpMap::verified() const {
  CpMap out = *this;
  auto flag = [](bool b) { return b ? Verified::kTrue : Verified::kFalse; };
  out.flags_.unital = flag(unital_residual(*this) <= tol::kIdentity);
  out.flags_.completely_positive =
      flag(is_completely_positive(*this).completely_positive);
  const auto st = check_stationary(*this);
  out.flags_.preserves_state = flag(st.preserves_state);
  out.flags_.commutes_with_modular = flag(st.commutes_with_modular);
  return out;
}

Element CpMap::apply(const Element& x) const {
  if (!x.conforms(source_->structure())) {
    throw ShapeError("element does not conform to the map source");
  }
  const CVector v = x.vec();
  CVector y(matrix_.rows());
  kernels::matvec(static_cast<std::size_t>(matrix_.rows()),
                  static_cast<std::size_t>(matrix_.cols()), matrix_.data(),
                  v.data(), y.data());
  return Element::from_vec(target_->structure(), y);
}

CpMap CpMap::compose(const CpMap& inner) const {
  if (!same_space(*inner.target(), *source_)) {
    throw ShapeError("composition: inner target is not the outer source");
  }
  return CpMap(inner.source(), target_, matrix_ * inner.matrix());
}

CpMap CpMap::inverse() const {
  if (matrix_.rows() != matrix_.cols()) {
    throw PreconditionError("non-square map has no inverse");
  }
  Eigen::FullPivLU<Matrix> lu(matrix_);
  if (!lu.isInvertible()) throw PreconditionError("map is not invertible");
  return CpMap(target_, source_, lu.inverse());
}

// ---------------------------------------------------------------------------
// Checks

CpWitness is_completely_positive(const CpMap& q) {
  const auto& ss = q.source()->structure();
  const auto& ts = q.target()->structure();
  const Matrix& m = q.matrix();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ss.num_blocks(); ++k) {
    const int dk = ss.block_dim(k);
    const auto ok = ss.vec_offset(k);
    for (std::size_t l = 0; l < ts.num_blocks(); ++l) {
      const int el = ts.block_dim(l);
      const auto ol = ts.vec_offset(l);
      Matrix c(dk * el, dk * el);
      for (int a = 0; a < dk; ++a) {
        for (int b = 0; b < dk; ++b) {
          const auto col = ok + a + b * dk;
          for (int r = 0; r < el; ++r) {
            for (int s = 0; s < el; ++s) {
              c(a * el + r, b * el + s) = m(ol + r + s * el, col) / double(dk);
            }
          }
        }
      }
      const double skew = (c - c.adjoint()).cwiseAbs().maxCoeff();
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c + c.adjoint()),
                                               Eigen::EigenvaluesOnly);
      lo = std::min({lo, es.eigenvalues().minCoeff(), -skew});
    }
  }
  return {lo > -tol::kChoi, lo};
}

double unital_residual(const CpMap& q) {
  const auto one_src = Element::identity(q.source()->structure());
  const auto one_tgt = Element::identity(q.target()->structure());
  return max_abs_diff(q.apply(one_src), one_tgt);
}

StationarityReport check_stationary(const CpMap& q) {
  StationarityReport r;
  const auto& src = *q.source();
  const auto& tgt = *q.target();
  const Eigen::RowVectorXcd pulled = tgt.state_functional() * q.matrix();
  r.state_residual = (pulled - src.state_functional()).cwiseAbs().maxCoeff();
  const Matrix comm = q.matrix() * src.modular_generator() -
                      tgt.modular_generator() * q.matrix();
  const double m_scale =
      q.matrix().size() ? std::max(1.0, q.matrix().cwiseAbs().maxCoeff()) : 1.0;
  r.modular_residual = (comm.size() ? comm.cwiseAbs().maxCoeff() : 0.0) /
                       (std::max(modular_scale(src), modular_scale(tgt)) * m_scale);
  r.preserves_state = r.state_residual <= tol::kIdentity;
  r.commutes_with_modular =
      r.modular_residual <= tol::kIdentity * std::max(whitening_condition(src),
                                                      whitening_condition(tgt));
  return r;
}

CpMap adjoint_wrt_states(const CpMap& q) {
  const auto st = check_stationary(q);
  if (!st.stationary()) {
    throw PreconditionError(
        "state adjoint requires a stationary map (state residual " +
        fmt(st.state_residual) + ", modular residual " +
        fmt(st.modular_residual) + ")");
  }
  const auto& src = *q.source();
  const auto& tgt = *q.target();
  const Matrix cs = eigen_change(src);
  const Matrix ct = eigen_change(tgt);
  const Matrix gs = cs.conjugate() * src.pairing_matrix() * cs.adjoint();
  const Matrix gt = ct.conjugate() * tgt.pairing_matrix() * ct.adjoint();
  Matrix m = ct * q.matrix() * cs.adjoint();
  // Drop the part of M that moves modular frequency; for a stationary map it
  // is rounding noise, which the adjoint would amplify by eigenvalue ratios.
  const RVector ws = modular_frequencies(src);
  const RVector wt = modular_frequencies(tgt);
  double dropped = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(wt(i) - ws(j)) > 1e-8) {
        dropped = std::max(dropped, std::abs(m(i, j)));
        m(i, j) = 0.0;
      }
    }
  }
  if (dropped > 1e-9) {
    throw PreconditionError("state adjoint: map moves modular frequency by " +
                            fmt(dropped));
  }
  // R^T G_src = G_tgt M
  const Matrix r = solve_monomial(gs.transpose(), m.transpose() * gt.transpose());
  return CpMap(q.target(), q.source(), cs.adjoint() * r * ct);
}

CpMap kms_adjoint(const CpMap& q) {
  const auto st = check_stationary(q);
  if (!st.preserves_state) {
    throw PreconditionError("KMS adjoint requires psi o Q = phi (residual " +
                            fmt(st.state_residual) + ")");
  }
  const auto& src = *q.source();
  const auto& tgt = *q.target();
  const Matrix cs = eigen_change(src);
  const Matrix ct = eigen_change(tgt);
  const Matrix s = cs * src.imaginary_modular_matrix(-0.5) * cs.adjoint();
  const Matrix t = ct * tgt.imaginary_modular_matrix(0.5) * ct.adjoint();
  const Matrix gs = cs.conjugate() * src.pairing_matrix() * cs.adjoint();
  const Matrix gt = ct.conjugate() * tgt.pairing_matrix() * ct.adjoint();
  const Matrix m = ct * q.matrix() * cs.adjoint();
  // R^T G_src S = T^T G_tgt M
  const Matrix r = solve_monomial((gs * s).transpose(),
                                  m.transpose() * gt.transpose() * t);
  return CpMap(q.target(), q.source(), cs.adjoint() * r * ct);
}

ContractionReport lp_extension_norm_check(const CpMap& q, LpIndex p,
                                          std::span<const Element> samples) {
  const auto cp = is_completely_positive(q);
  if (!cp.completely_positive) {
    throw PreconditionError("map is not completely positive (Choi " +
                            fmt(cp.min_choi_eigenvalue) + ")");
  }
  const auto& ts = q.target()->structure();
  const auto& ss = q.source()->structure();
  const Element defect =
      Element::identity(ts) - q.apply(Element::identity(ss));
  const auto [unit_lo, unit_skew] = hermitian_min_eig(defect);
  if (unit_lo < -tol::kChoi || unit_skew > tol::kChoi) {
    throw PreconditionError("Q(1) <= 1 fails (min eigenvalue of 1 - Q(1) " +
                            fmt(unit_lo) + ")");
  }
  const Eigen::RowVectorXcd pulled =
      q.target()->state_functional() * q.matrix();
  const Element state_defect = q.source()->rho() - density_of(ss, pulled);
  const auto [st_lo, st_skew] = hermitian_min_eig(state_defect);
  if (st_lo < -tol::kChoi || st_skew > tol::kChoi) {
    throw PreconditionError("psi o Q <= phi fails (min eigenvalue " +
                            fmt(st_lo) + ")");
  }
  ContractionReport r;
  for (const auto& a : samples) {
    const double before = lp_norm(*q.source(), p, a);
    if (before <= 1e-300) continue;
    const double after = lp_norm(*q.target(), p, q.apply(a));
    r.ratios.push_back(after / before);
    r.max_ratio = std::max(r.max_ratio, after / before);
  }
  r.pass = r.max_ratio <= 1.0 + 1e-10;
  return r;
}

}  // namespace ncergo
