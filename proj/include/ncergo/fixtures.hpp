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

// Seeded generators for test and experiment fixtures: states, random
// elements, stationary automorphisms and Markov maps, free actions.
//
// Every generator draws from a caller-owned FixtureRng in a fixed,
// documented order, so one seed reproduces one fixture bit for bit.

#include <cstdint>
#include <random>
#include <vector>

#include "ncergo/free_averaging.hpp"

namespace ncergo {

class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  /// Real and imaginary parts drawn as two normals, real first.
  Complex complex_normal();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

enum class StateKind {
  /// Normalized trace. No draws.
  kTracial,
  /// Per block: a Ginibre matrix G (row-major complex normals), rho_k = G G*
  /// + 0.05; then normalized over all blocks.
  kRandom,
  /// As kRandom, then the smallest eigenvalue is pinned to 1e-6.
  kNearDegenerate,
  /// Per block: eigenvalues in pairs (one uniform draw in [1, 2] per pair)
  /// in a Haar-like basis from the QR of a Ginibre matrix.
  kClustered,
};

/// Builds the state of kind `kind` on `s`.
SpacePtr make_space(const BlockStructure& s, StateKind kind, FixtureRng& rng);

/// Blockwise complex Ginibre entries, blocks in order, row-major.
Element random_element(const BlockStructure& s, FixtureRng& rng);

/// (G + G*) / 2 for G = random_element.
Element random_hermitian(const BlockStructure& s, FixtureRng& rng);

/// exp(iH) with H Hermitian commuting with rho, built on each cluster of
/// numerically equal eigenvalues of rho (relative gap 1e-9): per block, per
/// cluster, one random_hermitian draw of the cluster size.
Element commuting_unitary(const NcSpace& space, FixtureRng& rng);

/// Conjugation by commuting_unitary: a stationary automorphism.
CpMap stationary_automorphism(SpacePtr space, FixtureRng& rng);

/// A convex mixture of `terms` stationary automorphisms with weights from
/// `terms` uniform draws (normalized), drawn after the automorphisms. With
/// `pinch`, composed with the pinching onto the eigenbasis of rho, which
/// keeps the map stationary but makes it non-invertible.
CpMap stationary_map(SpacePtr space, FixtureRng& rng, int terms = 3,
                     bool pinch = false);

/// x -> sum_k P_k x P_k over the rank-one eigenprojections of rho.
CpMap eigenbasis_pinching(SpacePtr space);

/// d independent stationary automorphisms, generator 1 first.
FreeAction random_free_action(SpacePtr space, int d, FixtureRng& rng);

/// Block permutation generators on a space whose blocks are permuted by
/// each perms[i]; the state must be invariant (PreconditionError
/// otherwise). No draws.
FreeAction permutation_action(SpacePtr space,
                              const std::vector<std::vector<int>>& perms);

}  // namespace ncergo
