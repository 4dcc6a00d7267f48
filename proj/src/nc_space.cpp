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

#include "ncergo/nc_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ncergo/errors.hpp"
#include "ncergo/kernels.hpp"

namespace ncergo {
namespace {

// kron(a, b) for small dense blocks.
Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// BlockStructure

BlockStructure::BlockStructure(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ShapeError("block structure must be nonempty");
  for (int d : dims_) {
    if (d < 1) throw ShapeError("block sizes must be positive");
    vec_offsets_.push_back(vec_dim_);
    ambient_offsets_.push_back(total_dim_);
    vec_dim_ += static_cast<Eigen::Index>(d) * d;
    total_dim_ += d;
  }
}

bool BlockStructure::is_commutative() const {
  return std::all_of(dims_.begin(), dims_.end(), [](int d) { return d == 1; });
}

// ---------------------------------------------------------------------------
// Element

Element::Element(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.rows() != b.cols()) throw ShapeError("element blocks must be square");
  }
}

Element Element::identity(const BlockStructure& s) {
  std::vector<Matrix> blocks;
  blocks.reserve(s.num_blocks());
  for (int d : s.dims()) blocks.push_back(Matrix::Identity(d, d));
  return Element(std::move(blocks));
}

Element Element::zero(const BlockStructure& s) {
  std::vector<Matrix> blocks;
  blocks.reserve(s.num_blocks());
  for (int d : s.dims()) blocks.push_back(Matrix::Zero(d, d));
  return Element(std::move(blocks));
}

Element Element::from_vec(const BlockStructure& s, const CVector& v) {
  if (v.size() != s.vec_dim()) {
    throw ShapeError("vector length " + std::to_string(v.size()) +
                     " does not match vec_dim " + std::to_string(s.vec_dim()));
  }
  std::vector<Matrix> blocks;
  blocks.reserve(s.num_blocks());
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const int d = s.block_dim(k);
    blocks.push_back(
        Eigen::Map<const Matrix>(v.data() + s.vec_offset(k), d, d));
  }
  return Element(std::move(blocks));
}

Element Element::matrix_unit(const BlockStructure& s, Eigen::Index index) {
  if (index < 0 || index >= s.vec_dim()) {
    throw ShapeError("matrix unit index out of range");
  }
  CVector v = CVector::Zero(s.vec_dim());
  v(index) = 1.0;
  return from_vec(s, v);
}

Element Element::from_ambient(const BlockStructure& s, const Matrix& ambient) {
  if (ambient.rows() != s.total_dim() || ambient.cols() != s.total_dim()) {
    throw ShapeError("ambient matrix has the wrong size");
  }
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const int o = s.ambient_offset(k);
    const int d = s.block_dim(k);
    blocks.push_back(ambient.block(o, o, d, d));
  }
  return Element(std::move(blocks));
}

bool Element::conforms(const BlockStructure& s) const {
  if (blocks_.size() != s.num_blocks()) return false;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].rows() != s.block_dim(k)) return false;
  }
  return true;
}

CVector Element::vec() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks_) n += b.size();
  CVector v(n);
  Eigen::Index off = 0;
  for (const auto& b : blocks_) {
    std::copy(b.data(), b.data() + b.size(), v.data() + off);
    off += b.size();
  }
  return v;
}

Matrix Element::to_ambient() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks_) n += b.rows();
  Matrix m = Matrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks_) {
    m.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return m;
}

Element Element::adjoint() const {
  std::vector<Matrix> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) blocks.push_back(b.adjoint());
  return Element(std::move(blocks));
}

Complex Element::trace() const {
  Complex t = 0.0;
  for (const auto& b : blocks_) t += b.trace();
  return t;
}

double Element::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& b : blocks_) acc += b.squaredNorm();
  return std::sqrt(acc);
}

double Element::op_norm() const {
  double best = 0.0;
  for (const auto& b : blocks_) {
    if (b.size() == 1) {
      best = std::max(best, std::abs(b(0, 0)));
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(b);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

bool Element::is_hermitian(double tol) const {
  for (const auto& b : blocks_) {
    if ((b - b.adjoint()).norm() > tol * std::max(1.0, b.norm())) return false;
  }
  return true;
}

void Element::require_same_shape(const Element& o) const {
  if (blocks_.size() != o.blocks_.size()) {
    throw ShapeError("elements have different block counts");
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (blocks_[k].rows() != o.blocks_[k].rows()) {
      throw ShapeError("elements have different block sizes");
    }
  }
}

Element& Element::operator+=(const Element& o) {
  require_same_shape(o);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    kernels::axpy_real(blocks_[k].size(), 1.0, o.blocks_[k].data(),
                       blocks_[k].data());
  }
  return *this;
}

Element& Element::operator-=(const Element& o) {
  require_same_shape(o);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    kernels::axpy_real(blocks_[k].size(), -1.0, o.blocks_[k].data(),
                       blocks_[k].data());
  }
  return *this;
}

Element& Element::operator*=(Complex c) {
  for (auto& b : blocks_) b *= c;
  return *this;
}

Element operator*(const Element& a, const Element& b) {
  a.require_same_shape(b);
  std::vector<Matrix> blocks;
  blocks.reserve(a.blocks_.size());
  for (std::size_t k = 0; k < a.blocks_.size(); ++k) {
    blocks.push_back(a.blocks_[k] * b.blocks_[k]);
  }
  return Element(std::move(blocks));
}

double max_abs_diff(const Element& a, const Element& b) {
  if (a.num_blocks() != b.num_blocks()) throw ShapeError("block count mismatch");
  double best = 0.0;
  for (std::size_t k = 0; k < a.num_blocks(); ++k) {
    if (a.block(k).size() != b.block(k).size()) {
      throw ShapeError("block size mismatch");
    }
    best = std::max(best, kernels::max_abs_diff(a.block(k).size(),
                                                a.block(k).data(),
                                                b.block(k).data()));
  }
  return best;
}

double frobenius_distance(const Element& a, const Element& b) {
  if (a.num_blocks() != b.num_blocks()) throw ShapeError("block count mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.num_blocks(); ++k) {
    if (a.block(k).size() != b.block(k).size()) {
      throw ShapeError("block size mismatch");
    }
    acc += kernels::sum_sq_diff(a.block(k).size(), a.block(k).data(),
                                b.block(k).data());
  }
  return std::sqrt(acc);
}

double op_distance(const Element& a, const Element& b) {
  return (a - b).op_norm();
}

// ---------------------------------------------------------------------------
// NcSpace

NcSpace::NcSpace(BlockStructure structure, Element rho)
    : structure_(std::move(structure)), rho_(std::move(rho)) {
  if (!rho_.conforms(structure_)) {
    throw ShapeError("density matrix does not conform to the block structure");
  }
  if (!rho_.is_hermitian(tol::kDensity)) {
    throw FixtureError("density matrix is not Hermitian");
  }
  const Complex tr = rho_.trace();
  if (std::abs(tr - 1.0) > tol::kDensity * structure_.total_dim()) {
    throw FixtureError("density matrix does not have unit trace");
  }
  for (std::size_t k = 0; k < structure_.num_blocks(); ++k) {
    const Matrix h = 0.5 * (rho_.block(k) + rho_.block(k).adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) {
      throw FixtureError("eigendecomposition of the density matrix failed");
    }
    if (es.eigenvalues().minCoeff() <= tol::kFaithful) {
      throw FixtureError("state is not faithful: minimum eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()));
    }
    evals_.push_back(es.eigenvalues());
    evecs_.push_back(es.eigenvectors());
  }

  const Eigen::Index n = structure_.vec_dim();
  pairing_ = Matrix::Zero(n, n);
  functional_ = Eigen::RowVectorXcd::Zero(n);
  modular_generator_ = Matrix::Zero(n, n);
  const Element log_r = log_rho();
  for (std::size_t k = 0; k < structure_.num_blocks(); ++k) {
    const int d = structure_.block_dim(k);
    const Eigen::Index off = structure_.vec_offset(k);
    const Matrix& r = rho_.block(k);
    // phi(y a) = sum_{i,j,l} rho_ij y_jl a_li
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        functional_(off + j + i * d) = r(i, j);
        for (int l = 0; l < d; ++l) {
          pairing_(off + j + l * d, off + l + i * d) += r(i, j);
        }
      }
    }
    const Matrix& lg = log_r.block(k);
    const Matrix id = Matrix::Identity(d, d);
    modular_generator_.block(off, off, d * d, d * d) =
        kron(id, lg) - kron(lg.transpose(), id);
  }
}

SpacePtr NcSpace::tracial(const BlockStructure& s) {
  const double w = 1.0 / s.total_dim();
  std::vector<Matrix> blocks;
  for (int d : s.dims()) blocks.push_back(Matrix::Identity(d, d) * w);
  return std::make_shared<const NcSpace>(s, Element(std::move(blocks)));
}

SpacePtr NcSpace::diagonal(const BlockStructure& s,
                           const std::vector<RVector>& spectra) {
  if (spectra.size() != s.num_blocks()) {
    throw ShapeError("one spectrum per block is required");
  }
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    if (spectra[k].size() != s.block_dim(k)) {
      throw ShapeError("spectrum length does not match block size");
    }
    blocks.push_back(spectra[k].cast<Complex>().asDiagonal());
  }
  return std::make_shared<const NcSpace>(s, Element(std::move(blocks)));
}

Element NcSpace::spectral_function(const std::vector<CVector>& values) const {
  std::vector<Matrix> blocks;
  blocks.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Matrix& v = evecs_[k];
    blocks.push_back(v * values[k].asDiagonal() * v.adjoint());
  }
  return Element(std::move(blocks));
}

Element NcSpace::rho_power(double s) const {
  std::vector<CVector> vals;
  for (const auto& ev : evals_) {
    vals.push_back(ev.array().pow(s).cast<Complex>().matrix());
  }
  return spectral_function(vals);
}

Element NcSpace::rho_power_imag(double t) const {
  std::vector<CVector> vals;
  for (const auto& ev : evals_) {
    CVector v(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      v(i) = std::polar(1.0, t * std::log(ev(i)));
    }
    vals.push_back(v);
  }
  return spectral_function(vals);
}

Element NcSpace::log_rho() const {
  std::vector<CVector> vals;
  for (const auto& ev : evals_) {
    vals.push_back(ev.array().log().cast<Complex>().matrix());
  }
  return spectral_function(vals);
}

double NcSpace::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ev : evals_) m = std::min(m, ev.minCoeff());
  return m;
}

bool NcSpace::is_tracial(double tol) const {
  const double w = 1.0 / structure_.total_dim();
  for (const auto& ev : evals_) {
    if ((ev.array() - w).abs().maxCoeff() > tol) return false;
  }
  return true;
}

Matrix NcSpace::imaginary_modular_matrix(double s) const {
  const Eigen::Index n = structure_.vec_dim();
  Matrix m = Matrix::Zero(n, n);
  const Element left = rho_power(-s);
  const Element right = rho_power(s);
  for (std::size_t k = 0; k < structure_.num_blocks(); ++k) {
    const int d = structure_.block_dim(k);
    const Eigen::Index off = structure_.vec_offset(k);
    // vec(L x R) = (R^T kron L) vec(x)
    m.block(off, off, d * d, d * d) =
        kron(right.block(k).transpose(), left.block(k));
  }
  return m;
}

// ---------------------------------------------------------------------------
// LpIndex and the free functions

LpIndex::LpIndex(double p) : value_(p), infinite_(std::isinf(p)) {
  if (std::isnan(p) || p < 1.0) {
    throw InvalidArgument("L^p index must satisfy p >= 1");
  }
}

LpIndex LpIndex::infinity() { return LpIndex(); }

Complex state_eval(const NcSpace& space, const Element& x) {
  if (!x.conforms(space.structure())) {
    throw ShapeError("element does not conform to the space");
  }
  Complex acc = 0.0;
  for (std::size_t k = 0; k < x.num_blocks(); ++k) {
    acc += (space.rho().block(k) * x.block(k)).trace();
  }
  return acc;
}

Complex gns_inner(const NcSpace& space, const Element& a, const Element& b) {
  if (!a.conforms(space.structure()) || !b.conforms(space.structure())) {
    throw ShapeError("element does not conform to the space");
  }
  Complex acc = 0.0;
  for (std::size_t k = 0; k < a.num_blocks(); ++k) {
    acc += (space.rho().block(k) * b.block(k).adjoint() * a.block(k)).trace();
  }
  return acc;
}

Element modular_action(const NcSpace& space, double t, const Element& x) {
  if (!x.conforms(space.structure())) {
    throw ShapeError("element does not conform to the space");
  }
  return space.rho_power_imag(t) * x * space.rho_power_imag(-t);
}

Element modular_action_imaginary(const NcSpace& space, double s,
                                 const Element& x) {
  if (!x.conforms(space.structure())) {
    throw ShapeError("element does not conform to the space");
  }
  return space.rho_power(-s) * x * space.rho_power(s);
}

double lp_norm(const NcSpace& space, LpIndex p, const Element& x) {
  if (!x.conforms(space.structure())) {
    throw ShapeError("element does not conform to the space");
  }
  if (p.is_infinite()) return x.op_norm();
  const double pv = p.value();
  const Element w = space.rho_power(1.0 / (2.0 * pv));
  const Element y = w * x * w;
  double acc = 0.0;
  for (const auto& b : y.blocks()) {
    if (b.size() == 1) {
      acc += std::pow(std::abs(b(0, 0)), pv);
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(b);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      acc += std::pow(svd.singularValues()(i), pv);
    }
  }
  return std::pow(acc, 1.0 / pv);
}

double whitening_condition(const NcSpace& space) {
  return std::max(1.0, std::sqrt(space.rho().op_norm() / space.min_eigenvalue()));
}

}  // namespace ncergo
