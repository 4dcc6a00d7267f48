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

#include "ncergo/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncergo/errors.hpp"

namespace ncergo {
namespace {

Matrix ginibre(int d, FixtureRng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  }
  return g;
}

Matrix hermitian_from(const Matrix& g) { return 0.5 * (g + g.adjoint()); }

}  // namespace

double FixtureRng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double FixtureRng::normal() {
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

Complex FixtureRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

SpacePtr make_space(const BlockStructure& s, StateKind kind, FixtureRng& rng) {
  if (kind == StateKind::kTracial) return NcSpace::tracial(s);
  std::vector<Matrix> blocks;
  double total = 0.0;
  for (int d : s.dims()) {
    Matrix b;
    if (kind == StateKind::kClustered) {
      RVector spec(d);
      for (int i = 0; i < d; i += 2) {
        const double v = rng.uniform(1.0, 2.0);
        spec(i) = v;
        if (i + 1 < d) spec(i + 1) = v;
      }
      Eigen::HouseholderQR<Matrix> qr(ginibre(d, rng));
      const Matrix u = qr.householderQ() * Matrix::Identity(d, d);
      b = u * spec.cast<Complex>().asDiagonal() * u.adjoint();
    } else {
      const Matrix g = ginibre(d, rng);
      b = g * g.adjoint() + 0.05 * Matrix::Identity(d, d);
    }
    b = hermitian_from(b);
    total += b.trace().real();
    blocks.push_back(std::move(b));
  }
  for (auto& b : blocks) b /= total;
  if (kind == StateKind::kNearDegenerate) {
    // Pin the global minimum eigenvalue to 1e-6, keeping unit trace.
    std::size_t kmin = 0;
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(blocks[k]);
      if (es.eigenvalues()(0) < vmin) {
        vmin = es.eigenvalues()(0);
        kmin = k;
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(blocks[kmin]);
    RVector ev = es.eigenvalues();
    const double lifted = 1e-6;
    const double scale = (1.0 - lifted) / (1.0 - ev(0));
    for (auto& b : blocks) b *= scale;
    ev *= scale;
    ev(0) = lifted;
    blocks[kmin] = es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
                   es.eigenvectors().adjoint();
    blocks[kmin] = hermitian_from(blocks[kmin]);
  }
  return std::make_shared<const NcSpace>(s, Element(std::move(blocks)));
}

Element random_element(const BlockStructure& s, FixtureRng& rng) {
  std::vector<Matrix> blocks;
  for (int d : s.dims()) blocks.push_back(ginibre(d, rng));
  return Element(std::move(blocks));
}

Element random_hermitian(const BlockStructure& s, FixtureRng& rng) {
  Element g = random_element(s, rng);
  return (g + g.adjoint()) * Complex(0.5);
}

Element commuting_unitary(const NcSpace& space, FixtureRng& rng) {
  const auto& s = space.structure();
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const int d = s.block_dim(k);
    const RVector& ev = space.eigenvalues(k);
    const Matrix& v = space.eigenvectors(k);
    Matrix inner = Matrix::Zero(d, d);
    int start = 0;
    while (start < d) {
      int end = start + 1;
      while (end < d && ev(end) - ev(start) <= 1e-9 * ev(end)) ++end;
      const int m = end - start;
      const Matrix h = hermitian_from(ginibre(m, rng));
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      const CVector phases =
          (Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>()).array().exp();
      inner.block(start, start, m, m) =
          es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
      start = end;
    }
    blocks.push_back(v * inner * v.adjoint());
  }
  return Element(std::move(blocks));
}

CpMap stationary_automorphism(SpacePtr space, FixtureRng& rng) {
  const Element u = commuting_unitary(*space, rng);
  return CpMap::conjugation(std::move(space), u);
}

CpMap eigenbasis_pinching(SpacePtr space) {
  const auto& s = space->structure();
  std::vector<Matrix> ops;
  for (std::size_t k = 0; k < s.num_blocks(); ++k) {
    const int d = s.block_dim(k);
    const int off = s.ambient_offset(k);
    for (int i = 0; i < d; ++i) {
      Matrix p = Matrix::Zero(s.total_dim(), s.total_dim());
      const CVector v = space->eigenvectors(k).col(i);
      p.block(off, off, d, d) = v * v.adjoint();
      ops.push_back(std::move(p));
    }
  }
  return CpMap::kraus(space, space, ops);
}

CpMap stationary_map(SpacePtr space, FixtureRng& rng, int terms, bool pinch) {
  if (terms < 1) throw InvalidArgument("stationary_map needs terms >= 1");
  std::vector<CpMap> autos;
  for (int i = 0; i < terms; ++i) autos.push_back(stationary_automorphism(space, rng));
  std::vector<double> w;
  for (int i = 0; i < terms; ++i) w.push_back(rng.uniform(0.1, 1.0));
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  CpMap mix = CpMap::combination(autos, w);
  if (pinch) mix = mix.compose(eigenbasis_pinching(space));
  return mix;
}

FreeAction random_free_action(SpacePtr space, int d, FixtureRng& rng) {
  std::vector<CpMap> gens;
  for (int i = 0; i < d; ++i) gens.push_back(stationary_automorphism(space, rng));
  return FreeAction(std::move(space), std::move(gens));
}

FreeAction permutation_action(SpacePtr space,
                              const std::vector<std::vector<int>>& perms) {
  std::vector<CpMap> gens;
  for (const auto& p : perms) gens.push_back(CpMap::block_permutation(space, p));
  return FreeAction(std::move(space), std::move(gens));
}

}  // namespace ncergo
