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

// Unital *-subalgebras of a finite noncommutative probability space, kept as
// a GNS-orthonormal basis, together with the constructions that produce
// them (span, generation, joint fixed points) and the state-preserving
// conditional expectation onto them.

#include <span>
#include <vector>

#include "ncergo/cp_map.hpp"

namespace ncergo {

class Subalgebra {
 public:
  /// `whitened_basis` holds orthonormal columns w = vec(x rho^{1/2}); the
  /// Euclidean inner product of whitened vectors is the GNS inner product.
  Subalgebra(SpacePtr ambient, Matrix whitened_basis);

  const SpacePtr& ambient() const { return ambient_; }
  Eigen::Index dim() const { return whitened_.cols(); }
  const Matrix& whitened_basis() const { return whitened_; }

  Element basis(Eigen::Index i) const;
  std::vector<Element> basis() const;

  /// GNS-orthogonal projection onto the span.
  Element project(const Element& x) const;
  /// ||x - project(x)||_GNS / max(1, ||x||_GNS).
  double span_residual(const Element& x) const;
  /// Dense matrix of `project` on vectorized elements.
  Matrix projection_matrix() const;

 private:
  SpacePtr ambient_;
  Matrix whitened_;
};

/// x -> vec(x rho^{1/2}) and its inverse.
CVector whiten(const NcSpace& space, const Element& x);
Element unwhiten(const NcSpace& space, const CVector& w);

struct ClosureReport {
  double identity_residual = 0.0;
  double adjoint_residual = 0.0;
  double product_residual = 0.0;

  bool closed(double tol) const {
    return identity_residual <= tol && adjoint_residual <= tol &&
           product_residual <= tol;
  }
};

/// Unit, adjoint and pairwise-product residuals of the basis against the
/// span. Uses every pair when dim <= max_pairs_dim, otherwise the first
/// max_pairs_dim basis elements.
ClosureReport check_closure(const Subalgebra& sub,
                            Eigen::Index max_pairs_dim = 64);

/// Max over basis elements of the relative span residual of
/// [log rho, basis]; zero iff the span is invariant under sigma_t.
double modular_invariance_residual(const Subalgebra& sub);

/// Orthonormalizes `spanning` (plus the identity) and verifies that the
/// span is a unital *-subalgebra; VerificationError otherwise.
Subalgebra span_subalgebra(SpacePtr space, std::span<const Element> spanning);

/// Largest ambient dimension for which dense subalgebra work is attempted.
inline constexpr Eigen::Index kDenseDimCap = 4096;

/// The unital *-algebra generated by `generators`: the span is closed under
/// left multiplication by generators and their adjoints until it
/// stabilizes. ResourceCapError if the dimension would exceed `cap`
/// (0 means the ambient dimension) or the ambient dimension exceeds
/// kDenseDimCap.
Subalgebra generate_subalgebra(SpacePtr space,
                               std::span<const Element> generators,
                               Eigen::Index cap = 0);

/// {x : m(x) = x for every m}, computed as the null space of the stacked
/// (M_m - I). Maps must be stationary endomorphisms of `space`
/// (PreconditionError). VerificationError if the fixed space is not closed
/// under products, which signals a non-automorphism input.
Subalgebra fixed_point_algebra(SpacePtr space, std::span<const CpMap> maps);

/// The phi-preserving conditional expectation onto `sub` (the
/// GNS-orthogonal projection). Requires sub to be invariant under the
/// modular group (PreconditionError otherwise). The result is verified
/// idempotent, unital, state preserving, completely positive and
/// sub-bimodular before it is returned (VerificationError otherwise).
CpMap conditional_expectation(SpacePtr space, const Subalgebra& sub);

}  // namespace ncergo
