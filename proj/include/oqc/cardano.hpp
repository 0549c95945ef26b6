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

#include <array>
#include <numbers>

namespace oqc {

namespace detail {

inline double real_cbrt(double x) { return std::cbrt(x); }

// Newton step on lambda^3 + c2 lambda^2 + c1 lambda + c0.
inline cplx polish_cubic_root(cplx x, double c2, double c1, double c0) {
  for (int it = 0; it < 3; ++it) {
    const cplx f = ((x + c2) * x + c1) * x + c0;
    const cplx df = (3.0 * x + 2.0 * c2) * x + c1;
    if (std::abs(df) < 1e-300) break;
    const cplx step = f / df;
    const cplx next = x - step;
    const cplx fn = ((next + c2) * next + c1) * next + c0;
    if (!(std::abs(fn) < std::abs(f))) break;
    x = next;
  }
  return x;
}

}  // namespace detail

/// Eigenvalues of a real 3x3 matrix as the roots of its characteristic polynomial, solved in
/// closed form. Three real roots use the trigonometric form; one real root plus a conjugate
/// pair uses real cube roots. The matrix is scaled to unit max-norm before solving and every
/// root gets a Newton polish on the scaled polynomial.
inline std::array<cplx, 3> cardano_eigenvalues(const Eigen::Matrix3d& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return {cplx(0.0), cplx(0.0), cplx(0.0)};
  const Eigen::Matrix3d a = m / scale;

  // det(lambda I - A) = lambda^3 + c2 lambda^2 + c1 lambda + c0
  const double c2 = -a.trace();
  const double c1 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
                    a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  const double c0 = -a.determinant();

  // lambda = t - c2/3 gives t^3 + p t + q = 0
  const double shift = -c2 / 3.0;
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const double disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
  constexpr double kThreshold = 1e-12;

  std::array<cplx, 3> roots;
  if (disc > kThreshold) {
    const double sq = std::sqrt(disc);
    // pick the cube root without cancellation
    const double big = -(q >= 0.0 ? 1.0 : -1.0) * detail::real_cbrt(std::abs(q) / 2.0 + sq);
    const double small = big != 0.0 ? -p / (3.0 * big) : 0.0;
    const double re = -(big + small) / 2.0 + shift;
    const double im = std::sqrt(3.0) / 2.0 * (big - small);
    roots = {cplx(big + small + shift, 0.0), cplx(re, im), cplx(re, -im)};
  } else if (disc < -kThreshold) {
    // casus irreducibilis: p < 0 here
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots[static_cast<std::size_t>(k)] = cplx(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + shift, 0.0);
  } else if (std::abs(p) <= kThreshold) {
    const double t = detail::real_cbrt(-q);
    roots = {cplx(t + shift), cplx(t + shift), cplx(t + shift)};
  } else {
    // double root
    roots = {cplx(3.0 * q / p + shift), cplx(-1.5 * q / p + shift), cplx(-1.5 * q / p + shift)};
  }

  for (auto& r : roots) {
    if (r.imag() == 0.0) {
      r = cplx(detail::polish_cubic_root(r, c2, c1, c0).real(), 0.0);
    }
  }
  if (roots[1].imag() != 0.0) {
    roots[1] = detail::polish_cubic_root(roots[1], c2, c1, c0);
    roots[2] = std::conj(roots[1]);
  }
  for (auto& r : roots) r *= scale;
  return roots;
}

/// |det(M - lambda I)|.
inline double characteristic_residual(const Eigen::Matrix3d& m, cplx lambda) {
  const Eigen::Matrix3cd shifted = m.cast<cplx>() - lambda * Eigen::Matrix3cd::Identity();
  return std::abs(shifted.determinant());
}

}  // namespace oqc
