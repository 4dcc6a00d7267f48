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

// Finite noncommutative probability spaces: a finite direct sum of matrix
// blocks A = M_{d_1} (+) ... (+) M_{d_m} together with a faithful state
// phi(x) = trace(rho x), rho a block-diagonal density matrix.
//
// Vectorization convention, used by every map matrix in the library: blocks
// are concatenated in order, each block column-stacked.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

namespace ncergo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
/// Minimum eigenvalue a density matrix must exceed to be faithful.
inline constexpr double kFaithful = 1e-12;
/// Hermiticity / trace tolerance when validating a density matrix.
inline constexpr double kDensity = 1e-12;
/// Relative Frobenius tolerance for algebraic identity suites.
inline constexpr double kIdentity = 1e-10;
/// Relative Frobenius tolerance for dilation suites.
inline constexpr double kDilation = 1e-9;
/// Choi positivity threshold.
inline constexpr double kChoi = 1e-10;
/// Residual below which a vector is considered inside a span.
inline constexpr double kSpan = 1e-10;
}  // namespace tol

class BlockStructure {
 public:
  explicit BlockStructure(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t num_blocks() const { return dims_.size(); }
  int block_dim(std::size_t k) const { return dims_[k]; }
  /// Sum of block sizes (size of the ambient block-diagonal matrix).
  int total_dim() const { return total_dim_; }
  /// Sum of squared block sizes (length of a vectorized element).
  Eigen::Index vec_dim() const { return vec_dim_; }
  Eigen::Index vec_offset(std::size_t k) const { return vec_offsets_[k]; }
  /// Row/column offset of block k inside the ambient matrix.
  int ambient_offset(std::size_t k) const { return ambient_offsets_[k]; }
  bool is_commutative() const;

  bool operator==(const BlockStructure& other) const {
    return dims_ == other.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<Eigen::Index> vec_offsets_;
  std::vector<int> ambient_offsets_;
  int total_dim_ = 0;
  Eigen::Index vec_dim_ = 0;
};

/// A block-diagonal complex matrix.
class Element {
 public:
  Element() = default;
  explicit Element(std::vector<Matrix> blocks);

  static Element identity(const BlockStructure& s);
  static Element zero(const BlockStructure& s);
  static Element from_vec(const BlockStructure& s, const CVector& v);
  /// The matrix unit whose vectorization is the standard basis vector `index`.
  static Element matrix_unit(const BlockStructure& s, Eigen::Index index);
  /// Block-diagonal element built from the diagonal blocks of `ambient`.
  static Element from_ambient(const BlockStructure& s, const Matrix& ambient);

  std::size_t num_blocks() const { return blocks_.size(); }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }
  Matrix& block(std::size_t k) { return blocks_[k]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  bool conforms(const BlockStructure& s) const;
  CVector vec() const;
  Matrix to_ambient() const;

  Element adjoint() const;
  Complex trace() const;
  double frobenius_norm() const;
  /// Largest singular value over all blocks.
  double op_norm() const;
  bool is_hermitian(double tol) const;

  Element& operator+=(const Element& o);
  Element& operator-=(const Element& o);
  Element& operator*=(Complex c);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Complex c, Element a) { return a *= c; }
  friend Element operator*(Element a, Complex c) { return a *= c; }
  /// Blockwise matrix product.
  friend Element operator*(const Element& a, const Element& b);

 private:
  void require_same_shape(const Element& o) const;
  std::vector<Matrix> blocks_;
};

/// max_k |a - b| entrywise, through the dispatched kernels.
double max_abs_diff(const Element& a, const Element& b);
/// ||a - b||_F through the dispatched kernels.
double frobenius_distance(const Element& a, const Element& b);
/// ||a - b||_op.
double op_distance(const Element& a, const Element& b);

/// A faithful state on a block algebra, stored as its density matrix with
/// one cached Hermitian eigendecomposition per block. Immutable.
class NcSpace {
 public:
  /// Throws FixtureError if rho is not Hermitian, not of unit trace, or has
  /// an eigenvalue <= tol::kFaithful.
  NcSpace(BlockStructure structure, Element rho);

  /// The normalized trace: rho = 1 / total_dim on every block.
  static std::shared_ptr<const NcSpace> tracial(const BlockStructure& s);
  /// Diagonal density with the given per-block spectra in the standard basis.
  static std::shared_ptr<const NcSpace> diagonal(
      const BlockStructure& s, const std::vector<RVector>& spectra);

  const BlockStructure& structure() const { return structure_; }
  const Element& rho() const { return rho_; }
  Eigen::Index vec_dim() const { return structure_.vec_dim(); }

  /// rho^s for real s.
  Element rho_power(double s) const;
  /// rho^{it}.
  Element rho_power_imag(double t) const;
  Element log_rho() const;

  const RVector& eigenvalues(std::size_t k) const { return evals_[k]; }
  const Matrix& eigenvectors(std::size_t k) const { return evecs_[k]; }
  double min_eigenvalue() const;
  /// True when rho is a multiple of the identity on every block with the
  /// same multiple, i.e. phi is the normalized trace.
  bool is_tracial(double tol = 1e-12) const;

  /// Matrix G with phi(y a) = vec(y)^T G vec(a) (bilinear, not sesquilinear).
  const Matrix& pairing_matrix() const { return pairing_; }
  /// Row vector f with phi(x) = f vec(x).
  const Eigen::RowVectorXcd& state_functional() const { return functional_; }
  /// Matrix of x -> [log rho, x] on vectorized elements.
  const Matrix& modular_generator() const { return modular_generator_; }
  /// Matrix of x -> rho^{-s} x rho^{s} (= sigma_{is}) on vectorized elements.
  Matrix imaginary_modular_matrix(double s) const;

 private:
  Element spectral_function(const std::vector<CVector>& values) const;

  BlockStructure structure_;
  Element rho_;
  std::vector<RVector> evals_;
  std::vector<Matrix> evecs_;
  Matrix pairing_;
  Eigen::RowVectorXcd functional_;
  Matrix modular_generator_;
};

using SpacePtr = std::shared_ptr<const NcSpace>;

/// An exponent p in [1, infinity].
class LpIndex {
 public:
  /// Throws InvalidArgument unless p >= 1 (use infinity() for p = inf).
  explicit LpIndex(double p);
  static LpIndex infinity();

  bool is_infinite() const { return infinite_; }
  double value() const { return value_; }

 private:
  LpIndex() = default;
  double value_ = std::numeric_limits<double>::infinity();
  bool infinite_ = true;
};

/// phi(x) = trace(rho x).
Complex state_eval(const NcSpace& space, const Element& x);

/// <a, b> = phi(b* a).
Complex gns_inner(const NcSpace& space, const Element& a, const Element& b);

/// sigma_t(x) = rho^{it} x rho^{-it}.
Element modular_action(const NcSpace& space, double t, const Element& x);

/// sigma_{is}(x) = rho^{-s} x rho^{s}. Not norm preserving in general.
Element modular_action_imaginary(const NcSpace& space, double s,
                                 const Element& x);

/// ||rho^{1/2p} x rho^{1/2p}||_{S_p}; the operator norm of x for p = inf.
double lp_norm(const NcSpace& space, LpIndex p, const Element& x);

/// max(1, sqrt(lambda_max / lambda_min)) of the density: the condition
/// number of GNS whitening, used to scale numerical gates.
double whitening_condition(const NcSpace& space);

}  // namespace ncergo
