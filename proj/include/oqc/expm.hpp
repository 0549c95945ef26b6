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

#include <unsupported/Eigen/MatrixFunctions>

#include <utility>

namespace oqc {

/// Dense matrix exponential (scaling and squaring with a Pade approximant whose order is
/// picked from the 1-norm).
template <typename Derived>
auto expm(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  Plain out = a.derived().exp();
  return out;
}

/// Returns {exp(X), L(X, E)} where L is the Frechet derivative of the exponential at X in
/// direction E, read off the upper-right block of exp([[X, E], [0, X]]).
template <typename Matrix>
std::pair<Matrix, Matrix> expm_frechet(const Matrix& x, const Matrix& e) {
  const Index n = x.rows();
  Matrix big = Matrix::Zero(2 * n, 2 * n);
  big.topLeftCorner(n, n) = x;
  big.topRightCorner(n, n) = e;
  big.bottomRightCorner(n, n) = x;
  const Matrix eb = expm(big);
  return {eb.topLeftCorner(n, n), eb.topRightCorner(n, n)};
}

}  // namespace oqc
