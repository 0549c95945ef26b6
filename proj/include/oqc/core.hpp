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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace oqc {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Default tolerance for structural checks (Hermiticity, trace, positivity, CPTP).
inline constexpr double kStructuralTol = 1e-9;
/// Default tolerance for numerical identities.
inline constexpr double kIdentityTol = 1e-12;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input violates a structural constraint (not a state, not CPTP, not tangent, ...).
class ConstraintError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation failed numerically (blow-up, rank deficiency, degenerate null space).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return m;
}

inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// sigma^+ = |0><1| and sigma^- = |1><0|, matching the qubit dissipator convention.
inline CMatrix sigma_plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

inline CMatrix sigma_minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double hermiticity_error(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline RVector hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
inline CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

inline CMatrix unvec(const CVector& v, Index dim) {
  if (v.size() != dim * dim) throw DimensionError("unvec: vector length is not dim^2");
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

// ---------------------------------------------------------------------------
// Density matrices

struct DensityVerdict {
  bool valid = false;
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  /// Name of the worst violated invariant ("hermiticity", "trace", "positivity"), empty if valid.
  std::string worst;
  double worst_violation = 0.0;
};

/// Checks Hermiticity, unit trace and positivity of `rho` within `tol`.
/// Positivity is tested on the Hermitian part so the two failure modes are reported separately.
inline DensityVerdict validate_density(const CMatrix& rho, double tol = kStructuralTol) {
  if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
  if (rho.rows() < 2) throw DimensionError("density matrix dimension must be at least 2");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  DensityVerdict v;
  v.hermiticity_error = hermiticity_error(rho);
  v.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
  v.min_eigenvalue = hermitian_eigenvalues(rho).minCoeff();
  const double violations[3] = {v.hermiticity_error, v.trace_error, -v.min_eigenvalue};
  const char* names[3] = {"hermiticity", "trace", "positivity"};
  for (int k = 0; k < 3; ++k) {
    if (violations[k] > tol && violations[k] > v.worst_violation) {
      v.worst_violation = violations[k];
      v.worst = names[k];
    }
  }
  v.valid = v.worst.empty();
  return v;
}

/// Overload for ingested data that carries a declared dimension.
inline DensityVerdict validate_density(Index declared_dim, const CMatrix& rho, double tol = kStructuralTol) {
  if (rho.rows() != declared_dim || rho.cols() != declared_dim)
    throw DimensionError("declared dimension " + std::to_string(declared_dim) + " does not match entries (" +
                         std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) + ")");
  return validate_density(rho, tol);
}

/// N x N Hermitian, unit-trace, positive-semidefinite state. Validated at construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m, double tol = kStructuralTol) : m_(std::move(m)) {
    const auto v = validate_density(m_, tol);
    if (!v.valid)
      throw ConstraintError("not a density matrix: " + v.worst + " violation " + std::to_string(v.worst_violation));
  }

  /// Wraps a matrix without validation; callers validate separately.
  static DensityMatrix unchecked(CMatrix m) { return DensityMatrix(std::move(m), Unchecked{}); }

  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  static DensityMatrix basis_state(Index dim, Index k) {
    CMatrix m = CMatrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return DensityMatrix(std::move(m));
  }

  const CMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  struct Unchecked {};
  DensityMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Hermitian observable.
class Observable {
 public:
  explicit Observable(CMatrix m, double tol = kStructuralTol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionError("observable must be square");
    if (hermiticity_error(m_) > tol) throw ConstraintError("observable is not Hermitian");
  }
  const CMatrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  RVector eigenvalues() const { return hermitian_eigenvalues(m_); }

 private:
  CMatrix m_;
};

/// Tr(rho O).
inline double expectation(const DensityMatrix& rho, const Observable& o) {
  if (rho.dim() != o.dim()) throw DimensionError("expectation: dimension mismatch");
  return (rho.matrix() * o.matrix()).trace().real();
}

// ---------------------------------------------------------------------------
// Kraus sets

/// Ordered list of square Kraus operators of a common dimension.
/// The completeness relation is not enforced here; see kraus_constraint_residual.
class KrausSet {
 public:
  KrausSet() = default;
  explicit KrausSet(std::vector<CMatrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw DimensionError("Kraus set must contain at least one operator");
    const Index n = ops_.front().rows();
    for (const auto& k : ops_)
      if (k.rows() != n || k.cols() != n) throw DimensionError("Kraus operators must be square and of equal dimension");
  }
  const std::vector<CMatrix>& operators() const { return ops_; }
  Index dim() const { return ops_.empty() ? 0 : ops_.front().rows(); }
  std::size_t size() const { return ops_.size(); }

 private:
  std::vector<CMatrix> ops_;
};

/// Frobenius norm of sum_i K_i^dagger K_i - I.
inline double kraus_constraint_residual(const KrausSet& phi) {
  const Index n = phi.dim();
  if (n == 0) throw DimensionError("empty Kraus set");
  CMatrix acc = -CMatrix::Identity(n, n);
  for (const auto& k : phi.operators()) acc += k.adjoint() * k;
  return acc.norm();
}

inline DensityMatrix apply_kraus(const KrausSet& phi, const DensityMatrix& rho, double tol = kStructuralTol) {
  if (phi.dim() != rho.dim()) throw DimensionError("apply_kraus: dimension mismatch");
  const double res = kraus_constraint_residual(phi);
  if (res > tol) throw ConstraintError("apply_kraus: Kraus completeness residual " + std::to_string(res));
  CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : phi.operators()) out += k * rho.matrix() * k.adjoint();
  return DensityMatrix::unchecked(std::move(out));
}

// ---------------------------------------------------------------------------
// Bloch ball

struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;
  Eigen::Vector3d vector() const { return {x, y, z}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  static BlochVector from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

/// r_a = Tr(rho sigma_a); accepts any 2x2 matrix (used for derivatives as well as states).
inline Eigen::Vector3d bloch_components(const CMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) throw DimensionError("Bloch representation requires N = 2");
  return {(m * pauli_x()).trace().real(), (m * pauli_y()).trace().real(), (m * pauli_z()).trace().real()};
}

inline BlochVector bloch_from_density(const DensityMatrix& rho) { return BlochVector::from(bloch_components(rho.matrix())); }

inline DensityMatrix density_from_bloch(const BlochVector& r, double tol = kStructuralTol) {
  if (r.norm() > 1.0 + tol) throw ConstraintError("Bloch vector outside the unit ball");
  CMatrix m = (CMatrix::Identity(2, 2) + r.x * pauli_x() + r.y * pauli_y() + r.z * pauli_z()) / 2.0;
  return DensityMatrix::unchecked(std::move(m));
}

}  // namespace oqc
