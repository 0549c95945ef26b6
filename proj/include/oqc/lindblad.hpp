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
#include "oqc/expm.hpp"

#include <string>
#include <vector>

namespace oqc {

/// H(u) = diag(energies) + u * dipole, hbar = 1.
struct SystemModel {
  RVector energies;
  CMatrix dipole;

  Index dim() const { return energies.size(); }
  CMatrix free_hamiltonian() const { return energies.cast<cplx>().asDiagonal(); }
  CMatrix hamiltonian(double u) const { return free_hamiltonian() + u * dipole; }
  /// omega_ij = E_j - E_i.
  double transition_frequency(Index i, Index j) const { return energies(j) - energies(i); }

  void validate() const {
    if (dim() < 2) throw DimensionError("system needs at least two levels");
    if (dipole.rows() != dim() || dipole.cols() != dim()) throw DimensionError("dipole operator has wrong dimension");
    if (!energies.allFinite()) throw std::invalid_argument("energies must be finite");
    if (hermiticity_error(dipole) > kStructuralTol) throw ConstraintError("dipole operator is not Hermitian");
  }

  /// H0 = omega |1><1|, V = mu sigma_x.
  static SystemModel qubit(double omega, double mu) {
    SystemModel m;
    m.energies = RVector(2);
    m.energies << 0.0, omega;
    m.dipole = mu * pauli_x();
    return m;
  }
};

/// Per-transition rates gamma_ij(n) = A_ij (n + kappa_ij), kappa_ij = 1 iff i > j, with overall
/// strength epsilon. Levels are indexed so that i > j is an emission i -> j.
struct DecoherenceModel {
  RMatrix couplings;  // A_ij >= 0, symmetric, zero diagonal
  double epsilon = 1.0;

  Index dim() const { return couplings.rows(); }
  static int kappa(Index i, Index j) { return i > j ? 1 : 0; }

  void validate() const {
    if (couplings.rows() != couplings.cols()) throw DimensionError("couplings must be square");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
    for (Index i = 0; i < dim(); ++i)
      for (Index j = 0; j < dim(); ++j) {
        if (!(couplings(i, j) >= 0.0)) throw std::invalid_argument("couplings must be nonnegative");
        if (std::abs(couplings(i, j) - couplings(j, i)) > 1e-12 * (1.0 + std::abs(couplings(i, j))))
          throw std::invalid_argument("couplings must be symmetric");
      }
  }

  static DecoherenceModel qubit(double gamma) {
    DecoherenceModel d;
    d.couplings = RMatrix::Zero(2, 2);
    d.couplings(0, 1) = d.couplings(1, 0) = gamma;
    d.epsilon = 1.0;
    return d;
  }
};

/// Symmetric N x N matrix of incoherent occupations n_ij = n_ji >= 0 (diagonal unused).
using Occupations = RMatrix;

inline Occupations uniform_occupations(Index dim, double n) {
  Occupations occ = Occupations::Constant(dim, dim, n);
  occ.diagonal().setZero();
  return occ;
}

inline void validate_occupations(const Occupations& n, Index dim) {
  if (n.rows() != dim || n.cols() != dim) throw DimensionError("occupation matrix has wrong dimension");
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      if (i != j && !(n(i, j) >= 0.0)) throw std::invalid_argument("occupations must be nonnegative");
}

inline double decoherence_rate(const DecoherenceModel& model, Index i, Index j, double n) {
  if (i == j) throw std::invalid_argument("decoherence_rate: i == j");
  if (!(n >= 0.0)) throw std::invalid_argument("decoherence_rate: negative occupation");
  return model.couplings(i, j) * (n + DecoherenceModel::kappa(i, j));
}

/// Jump operator for the transition i -> j: C = |j><i|.
inline CMatrix jump_operator(Index dim, Index i, Index j) {
  CMatrix c = CMatrix::Zero(dim, dim);
  c(j, i) = 1.0;
  return c;
}

/// Generator of d vec(rho)/dt = L vec(rho) for column-stacked rho.
struct Liouvillian {
  Index dim = 0;
  CMatrix generator;

  CMatrix apply(const CMatrix& rho) const { return unvec(generator * vec(rho), dim); }
};

/// -i (I x H - H^T x I).
inline CMatrix hamiltonian_superoperator(const CMatrix& h) {
  const Index n = h.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  return cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
}

/// conj(C) x C - 1/2 I x C^dagger C - 1/2 (C^dagger C)^T x I.
inline CMatrix dissipator_superoperator(const CMatrix& c) {
  const Index n = c.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix cdc = c.adjoint() * c;
  return kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
}

/// The generator is affine in the controls: L(u, n) = drift + u * coherent + sum_ij n_ij * incoherent_ij.
/// `incoherent_uniform` is the sum over transitions (response to a common occupation n).
struct AffineLiouvillian {
  Index dim = 0;
  CMatrix drift;
  CMatrix coherent;
  CMatrix incoherent_uniform;

  CMatrix at(double u, double n) const { return drift + u * coherent + n * incoherent_uniform; }
};

inline AffineLiouvillian build_affine_liouvillian(const SystemModel& sys, const DecoherenceModel& dec) {
  sys.validate();
  dec.validate();
  const Index n = sys.dim();
  if (dec.dim() != n) throw DimensionError("system and decoherence models differ in dimension");
  AffineLiouvillian out;
  out.dim = n;
  out.drift = hamiltonian_superoperator(sys.free_hamiltonian());
  out.coherent = hamiltonian_superoperator(sys.dipole);
  out.incoherent_uniform = CMatrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j || dec.couplings(i, j) == 0.0) continue;
      const CMatrix d = dec.epsilon * dec.couplings(i, j) * dissipator_superoperator(jump_operator(n, i, j));
      if (DecoherenceModel::kappa(i, j)) out.drift += d;
      out.incoherent_uniform += d;
    }
  return out;
}

inline Liouvillian build_liouvillian(const SystemModel& sys, const DecoherenceModel& dec, double u,
                                     const Occupations& occ) {
  sys.validate();
  dec.validate();
  const Index n = sys.dim();
  if (dec.dim() != n) throw DimensionError("system and decoherence models differ in dimension");
  validate_occupations(occ, n);
  Liouvillian l;
  l.dim = n;
  l.generator = hamiltonian_superoperator(sys.hamiltonian(u));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double nij = occ(std::min(i, j), std::max(i, j));
      const double rate = decoherence_rate(dec, i, j, nij);
      if (rate == 0.0) continue;
      l.generator += dec.epsilon * rate * dissipator_superoperator(jump_operator(n, i, j));
    }
  return l;
}

inline DensityMatrix propagate_segment(const Liouvillian& l, const DensityMatrix& rho, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("propagate_segment: negative duration");
  if (rho.dim() != l.dim) throw DimensionError("propagate_segment: dimension mismatch");
  if (dt == 0.0) return rho;
  const CMatrix prop = expm(l.generator * dt);
  return DensityMatrix::unchecked(unvec(prop * vec(rho.matrix()), l.dim));
}

struct Segment {
  double dt = 0.0;
  double u = 0.0;
  Occupations n;
};

/// Piecewise-constant controls starting at t0; boundaries t_k = t0 + sum of durations.
struct ControlSchedule {
  double t0 = 0.0;
  std::vector<Segment> segments;

  std::vector<double> boundaries() const {
    std::vector<double> t{t0};
    for (const auto& s : segments) t.push_back(t.back() + s.dt);
    return t;
  }

  void validate(Index dim) const {
    for (const auto& s : segments) {
      if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw std::invalid_argument("segment durations must be positive");
      if (!std::isfinite(s.u)) throw std::invalid_argument("coherent control must be finite");
      validate_occupations(s.n, dim);
    }
  }
};

/// States at every segment boundary, starting with rho0. Each state is validated; a failure means
/// the integration blew up.
inline std::vector<DensityMatrix> propagate_schedule(const SystemModel& sys, const DecoherenceModel& dec,
                                                     const ControlSchedule& sched, const DensityMatrix& rho0,
                                                     double tol = kStructuralTol) {
  sched.validate(sys.dim());
  std::vector<DensityMatrix> traj{rho0};
  traj.reserve(sched.segments.size() + 1);
  for (std::size_t m = 0; m < sched.segments.size(); ++m) {
    const auto& seg = sched.segments[m];
    DensityMatrix next = propagate_segment(build_liouvillian(sys, dec, seg.u, seg.n), traj.back(), seg.dt);
    const auto verdict = validate_density(next.matrix(), tol);
    if (!verdict.valid)
      throw NumericalError("propagated state invalid after segment " + std::to_string(m) + ": " + verdict.worst);
    traj.push_back(std::move(next));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Qubit in the Bloch picture

/// dr/dt = A r + b.
struct BlochGenerator {
  Eigen::Matrix3d a;
  Eigen::Vector3d b;

  /// 4x4 generator acting on (r, 1).
  Eigen::Matrix4d augmented() const {
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g.topLeftCorner<3, 3>() = a;
    g.topRightCorner<3, 1>() = b;
    return g;
  }
};

namespace detail {

inline BlochGenerator bloch_generator_unchecked(const SystemModel& sys, double gamma, double u, double n) {
  const Eigen::Vector3d h = bloch_components(sys.hamiltonian(u));
  BlochGenerator g;
  g.a << 0.0, -h.z(), h.y(),
         h.z(), 0.0, -h.x(),
        -h.y(), h.x(), 0.0;
  const double transverse = gamma * (2.0 * n + 1.0) / 2.0;
  g.a(0, 0) -= transverse;
  g.a(1, 1) -= transverse;
  g.a(2, 2) -= 2.0 * transverse;
  g.b = Eigen::Vector3d(0.0, 0.0, gamma);
  return g;
}

}  // namespace detail

/// Bloch form of d rho/dt = -i[H0 + u V, rho] + gamma L_n(rho) with
/// L_n = (n + 1) D[sigma^+] + n D[sigma^-].
///
/// Writing H = c I + h.sigma/2 gives the coherent part h x r. The dissipator damps x, y at
/// gamma (2n+1)/2, damps z at gamma (2n+1), and pumps z towards the ground state at rate gamma.
inline BlochGenerator qubit_bloch_generator(const SystemModel& sys, double gamma, double u, double n) {
  sys.validate();
  if (sys.dim() != 2) throw DimensionError("qubit_bloch_generator requires N = 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(n >= 0.0)) throw std::invalid_argument("occupation must be nonnegative");
  return detail::bloch_generator_unchecked(sys, gamma, u, n);
}

/// Propagates a Bloch vector under a constant generator for time dt (exact affine exponential).
inline Eigen::Vector3d propagate_bloch(const BlochGenerator& g, const Eigen::Vector3d& r, double dt) {
  if (dt == 0.0) return r;
  const Eigen::Matrix4d e = expm((g.augmented() * dt).eval());
  return e.topLeftCorner<3, 3>() * r + e.topRightCorner<3, 1>();
}

/// Unique stationary state of the generator, from the null vector of L.
inline DensityMatrix stationary_state(const SystemModel& sys, const DecoherenceModel& dec, double u,
                                      const Occupations& occ) {
  const Liouvillian l = build_liouvillian(sys, dec, u, occ);
  const Index n = l.dim;
  Eigen::JacobiSVD<CMatrix> svd(l.generator, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const Index last = sv.size() - 1;
  const double scale = std::max(1.0, sv(0));
  if (sv(last - 1) <= 1e-10 * scale)
    throw NumericalError("stationary_state: null space is degenerate (dimension > 1)");
  CMatrix rho = unvec(svd.matrixV().col(last), n);
  rho /= rho.trace();
  rho = hermitian_part(rho);
  DensityMatrix out = DensityMatrix::unchecked(rho);
  const auto verdict = validate_density(rho);
  if (!verdict.valid) throw NumericalError("stationary_state: null vector is not a state (" + verdict.worst + ")");
  return out;
}

}  // namespace oqc
