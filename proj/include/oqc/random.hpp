// Copyright 2026 The oqc Authors
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

#include "oqc/core.hpp"

#include <cstdint>
#include <random>

namespace oqc {

/// splitmix64 finalizer; derives independent per-worker / per-start seeds from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline CMatrix random_ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

/// Thin Q factor with the phases of diag(R) absorbed, so the result is a deterministic function of `m`.
inline CMatrix orthonormalize(const CMatrix& m) {
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
  const CMatrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  for (Index j = 0; j < m.cols(); ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Haar-distributed unitary.
inline CMatrix random_unitary(Index n, Rng& rng) { return orthonormalize(random_ginibre(n, n, rng)); }

/// Full-rank random state rho = G G^dagger / Tr(G G^dagger).
inline DensityMatrix random_density(Index n, Rng& rng) {
  const CMatrix g = random_ginibre(n, n, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitian_part(rho));
}

inline Observable random_observable(Index n, Rng& rng) { return Observable(hermitian_part(random_ginibre(n, n, rng))); }

/// Random Kraus set with `count` operators built by orthonormalizing a stacked Gaussian matrix.
inline KrausSet random_kraus(Index n, Index count, Rng& rng) {
  const CMatrix s = orthonormalize(random_ginibre(n * count, n, rng));
  std::vector<CMatrix> ops;
  ops.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) ops.emplace_back(s.middleRows(k * n, n));
  return KrausSet(std::move(ops));
}

}  // namespace oqc
