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

// Linear maps between finite noncommutative probability spaces, stored as
// dense matrices acting on vectorized elements, with the checks and
// adjoints needed for Markov operators: Choi positivity, stationarity
// (state preservation plus modular commutation), the state adjoint, the
// KMS adjoint and the L^p contraction check.

#include <span>
#include <vector>

#include "ncergo/nc_space.hpp"

namespace ncergo {

enum class Verified { kUnchecked, kTrue, kFalse };

struct MapFlags {
  Verified unital = Verified::kUnchecked;
  Verified completely_positive = Verified::kUnchecked;
  Verified preserves_state = Verified::kUnchecked;
  Verified commutes_with_modular = Verified::kUnchecked;
};

class CpMap {
 public:
  /// `matrix` maps vec(x), x in source, to vec(Q(x)), Q(x) in target.
  CpMap(SpacePtr source, SpacePtr target, Matrix matrix);

  static CpMap identity(SpacePtr space);
  /// x -> u x u* on one space; u block-diagonal.
  static CpMap conjugation(SpacePtr space, const Element& u);
  /// x -> pinch(sum_k K_k x K_k*), K_k acting on the ambient matrices
  /// (target.total_dim x source.total_dim); pinch keeps the diagonal blocks.
  static CpMap kraus(SpacePtr source, SpacePtr target,
                     std::span<const Matrix> ops);
  /// Block permutation (Q x)_k = x_{perm[k]}; blocks k and perm[k] must
  /// have the same size.
  static CpMap block_permutation(SpacePtr space, std::vector<int> perm);
  /// sum_k weights[k] maps[k]; all maps share source and target.
  static CpMap combination(std::span<const CpMap> maps,
                           std::span<const double> weights);

  const SpacePtr& source() const { return source_; }
  const SpacePtr& target() const { return target_; }
  const Matrix& matrix() const { return matrix_; }
  const MapFlags& flags() const { return flags_; }

  /// A copy with every flag evaluated.
  CpMap verified() const;

  Element apply(const Element& x) const;
  /// (*this) o inner.
  CpMap compose(const CpMap& inner) const;
  /// Inverse of an invertible map (automorphisms). Throws
  /// PreconditionError when the matrix is singular.
  CpMap inverse() const;

 private:
  SpacePtr source_;
  SpacePtr target_;
  Matrix matrix_;
  MapFlags flags_;
};

struct CpWitness {
  bool completely_positive = false;
  /// Minimum eigenvalue over the normalized Choi blocks (1/d_k scaling).
  double min_choi_eigenvalue = 0.0;
};

/// Choi test: for every source block k and target block l the matrix
/// (1/d_k) sum_{ab} E_ab (x) Q(E_ab)_l must be positive semidefinite.
CpWitness is_completely_positive(const CpMap& q);

/// Residual of Q(1) = 1 in max-entry norm.
double unital_residual(const CpMap& q);

struct StationarityReport {
  bool preserves_state = false;
  double state_residual = 0.0;
  bool commutes_with_modular = false;
  double modular_residual = 0.0;

  bool stationary() const { return preserves_state && commutes_with_modular; }
};

/// psi o Q = phi on the matrix-unit basis, and the infinitesimal modular
/// condition Q([log rho_src, x]) = [log rho_tgt, Q(x)], each to
/// tol::kIdentity.
StationarityReport check_stationary(const CpMap& q);

/// The map R with phi(R(b) a) = psi(b Q(a)). Throws PreconditionError
/// unless q is stationary.
CpMap adjoint_wrt_states(const CpMap& q);

/// The map R with phi(R(b) sigma_{-i/2}(a)) = psi(sigma_{i/2}(b) Q(a)).
/// Requires only psi o Q = phi (PreconditionError otherwise).
CpMap kms_adjoint(const CpMap& q);

struct ContractionReport {
  double max_ratio = 0.0;
  std::vector<double> ratios;
  bool pass = false;
};

/// Ratios ||Q(a)||_{p,psi} / ||a||_{p,phi} over `samples` (zero samples are
/// skipped). Throws PreconditionError unless Q is completely positive,
/// Q(1) <= 1 and psi o Q <= phi.
ContractionReport lp_extension_norm_check(const CpMap& q, LpIndex p,
                                          std::span<const Element> samples);

}  // namespace ncergo
