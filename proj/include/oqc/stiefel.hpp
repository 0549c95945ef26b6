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
#include "oqc/random.hpp"

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace oqc {

/// Point of the complex Stiefel manifold V_N(C^{N^3}): the N^2 Kraus operators of a channel
/// stacked into an N^3 x N matrix S with S^dagger S = I_N.
class StiefelPoint {
 public:
  StiefelPoint(Index dim, CMatrix s, double tol = 1e-10) : dim_(dim), s_(std::move(s)) {
    if (dim_ < 1 || s_.rows() != dim_ * dim_ * dim_ || s_.cols() != dim_)
      throw DimensionError("Stiefel point must be N^3 x N");
    const double res = constraint_residual();
    if (res > tol) throw ConstraintError("S^dagger S != I (residual " + std::to_string(res) + ")");
  }

  Index dim() const { return dim_; }
  const CMatrix& matrix() const { return s_; }
  double constraint_residual() const { return (s_.adjoint() * s_ - CMatrix::Identity(dim_, dim_)).norm(); }

  KrausSet kraus() const {
    std::vector<CMatrix> ops;
    for (Index k = 0; k < dim_ * dim_; ++k) ops.emplace_back(s_.middleRows(k * dim_, dim_));
    return KrausSet(std::move(ops));
  }

 private:
  Index dim_;
  CMatrix s_;
};

/// Ambient N^3 x N matrix satisfying S^dagger d + d^dagger S = 0 at its base point.
struct TangentVector {
  CMatrix delta;
};

enum class Retraction { qr, polar };

/// Real Frobenius inner product Re Tr(X^dagger Y), the metric used throughout.
inline double inner(const CMatrix& x, const CMatrix& y) { return (x.adjoint() * y).trace().real(); }

inline double tangency_residual(const StiefelPoint& s, const CMatrix& d) {
  const CMatrix x = s.matrix().adjoint() * d;
  return (x + x.adjoint()).norm();
}

/// Stacks a Kraus set, zero-padding to N^2 operators.
inline StiefelPoint stiefel_from_kraus(const KrausSet& phi, double tol = kStructuralTol) {
  const Index n = phi.dim();
  if (static_cast<Index>(phi.size()) > n * n) throw DimensionError("more than N^2 Kraus operators");
  const double res = kraus_constraint_residual(phi);
  if (res > tol) throw ConstraintError("Kraus completeness residual " + std::to_string(res));
  CMatrix s = CMatrix::Zero(n * n * n, n);
  for (std::size_t k = 0; k < phi.size(); ++k) s.middleRows(static_cast<Index>(k) * n, n) = phi.operators()[k];
  return StiefelPoint(n, std::move(s), std::max(tol, 1e-10));
}

inline KrausSet kraus_from_stiefel(const StiefelPoint& s) { return s.kraus(); }

inline StiefelPoint random_stiefel_point(Index n, Rng& rng) {
  return StiefelPoint(n, orthonormalize(random_ginibre(n * n * n, n, rng)));
}

namespace detail {

inline void check_dims(const StiefelPoint& s, const DensityMatrix& rho, const Observable& o) {
  if (rho.dim() != s.dim() || o.dim() != s.dim()) throw DimensionError("Stiefel objective: dimension mismatch");
}

// (I_{N^2} kron O) X, applied block by block.
inline CMatrix lift(const CMatrix& o, const CMatrix& x) {
  const Index n = o.rows();
  CMatrix out(x.rows(), x.cols());
  for (Index k = 0; k < x.rows() / n; ++k) out.middleRows(k * n, n) = o * x.middleRows(k * n, n);
  return out;
}

inline CMatrix herm(const CMatrix& x) { return (x + x.adjoint()) / 2.0; }

}  // namespace detail

/// J = Tr[S rho S^dagger (I kron O)].
inline double objective_J(const StiefelPoint& s, const DensityMatrix& rho, const Observable& o) {
  detail::check_dims(s, rho, o);
  const CMatrix& sm = s.matrix();
  return (sm.adjoint() * detail::lift(o.matrix(), sm) * rho.matrix()).trace().real();
}

/// (2I - S S^dagger)(I kron O) S rho - S rho S^dagger (I kron O) S, evaluated without forming
/// N^3 x N^3 products. It is already tangent at S.
inline CMatrix gradient_J(const StiefelPoint& s, const DensityMatrix& rho, const Observable& o) {
  detail::check_dims(s, rho, o);
  const CMatrix& sm = s.matrix();
  const CMatrix& r = rho.matrix();
  const CMatrix os = detail::lift(o.matrix(), sm);
  const CMatrix sos = sm.adjoint() * os;  // S^dagger (I kron O) S
  return 2.0 * os * r - sm * (sos * r) - sm * (r * sos);
}

inline TangentVector project_tangent(const StiefelPoint& s, const CMatrix& z) {
  if (z.rows() != s.matrix().rows() || z.cols() != s.matrix().cols()) throw DimensionError("project_tangent: shape");
  return {z - s.matrix() * detail::herm(s.matrix().adjoint() * z)};
}

/// Riemannian Hessian for the embedded metric:
/// Proj_S( 2 (I kron O) d rho - d sym(S^dagger G) ), G = 2 (I kron O) S rho.
inline CMatrix hessian_apply(const StiefelPoint& s, const TangentVector& d, const DensityMatrix& rho,
                             const Observable& o, double tol = 1e-8) {
  detail::check_dims(s, rho, o);
  const CMatrix& dm = d.delta;
  if (dm.rows() != s.matrix().rows() || dm.cols() != s.dim()) throw DimensionError("hessian_apply: shape");
  if (tangency_residual(s, dm) > tol * (1.0 + dm.norm())) throw ConstraintError("hessian_apply: direction not tangent");
  const CMatrix& sm = s.matrix();
  const CMatrix& r = rho.matrix();
  const CMatrix g = 2.0 * detail::lift(o.matrix(), sm) * r;
  const CMatrix ambient = 2.0 * detail::lift(o.matrix(), dm) * r - dm * detail::herm(sm.adjoint() * g);
  return project_tangent(s, ambient).delta;
}

/// The seven-term Hessian expression in its published form. It coincides with hessian_apply at
/// critical points of J only.
inline CMatrix hessian_apply_printed(const StiefelPoint& s, const TangentVector& d, const DensityMatrix& rho,
                                     const Observable& o) {
  detail::check_dims(s, rho, o);
  const CMatrix& sm = s.matrix();
  const CMatrix& dm = d.delta;
  const CMatrix& r = rho.matrix();
  const CMatrix& om = o.matrix();
  const CMatrix os = detail::lift(om, sm);
  const CMatrix od = detail::lift(om, dm);
  const CMatrix sos = sm.adjoint() * os;
  return 2.0 * od * r - dm * (sos * r) - dm * (r * sos) - sm * (sm.adjoint() * od * r) +
         sm * (sm.adjoint() * dm) * (sos * r) - sm * (r * (dm.adjoint() * os)) + os * (r * (dm.adjoint() * sm));
}

inline StiefelPoint retract(const StiefelPoint& s, const CMatrix& step, Retraction kind = Retraction::qr) {
  if (step.rows() != s.matrix().rows() || step.cols() != s.dim()) throw DimensionError("retract: shape");
  const CMatrix x = s.matrix() + step;
  if (kind == Retraction::qr) {
    Eigen::HouseholderQR<CMatrix> qr(x);
    const CMatrix rr = qr.matrixQR().topRows(s.dim()).triangularView<Eigen::Upper>();
    const double floor = 1e-12 * std::max(1.0, x.norm());
    for (Index j = 0; j < s.dim(); ++j)
      if (std::abs(rr(j, j)) <= floor) throw NumericalError("retract: S + dS is rank deficient");
    return StiefelPoint(s.dim(), orthonormalize(x));
  }
  Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() <= 1e-12 * std::max(1.0, x.norm()))
    throw NumericalError("retract: S + dS is rank deficient");
  return StiefelPoint(s.dim(), svd.matrixU() * svd.matrixV().adjoint());
}

// ---------------------------------------------------------------------------
// Gradient ascent

struct MaximizeConfig {
  int max_iter = 5000;
  double grad_tol = 1e-9;
  std::uint64_t seed = 1;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  double min_step = 1e-14;
  std::optional<CMatrix> start;  // N^3 x N; random if absent
};

enum class MaximizeStatus { converged, max_iter, line_search_failure };

inline const char* to_string(MaximizeStatus s) {
  switch (s) {
    case MaximizeStatus::converged: return "converged";
    case MaximizeStatus::max_iter: return "max_iter";
    case MaximizeStatus::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

struct OptimizationReport {
  int iterations = 0;
  double final_objective = 0.0;
  std::vector<double> objective_history;
  std::vector<double> grad_norm_history;
  std::vector<double> step_history;  // accepted step length per iteration; 0 for the initial entry
  bool converged = false;
  MaximizeStatus status = MaximizeStatus::max_iter;
  std::string diagnostics;
  StiefelPoint point;
  double max_constraint_residual = 0.0;
  double wall_time_seconds = 0.0;
};

/// Projected gradient ascent with Armijo backtracking and QR retraction.
inline OptimizationReport maximize(const DensityMatrix& rho, const Observable& o, const MaximizeConfig& cfg) {
  if (rho.dim() != o.dim()) throw DimensionError("maximize: dimension mismatch");
  const auto t_start = std::chrono::steady_clock::now();
  const Index n = rho.dim();
  Rng rng(cfg.seed);
  StiefelPoint s = cfg.start ? StiefelPoint(n, *cfg.start) : random_stiefel_point(n, rng);

  OptimizationReport rep{0, 0.0, {}, {}, {}, false, MaximizeStatus::max_iter, {}, s, 0.0, 0.0};
  double j = objective_J(s, rho, o);
  CMatrix g = gradient_J(s, rho, o);
  double gn = g.norm();
  rep.objective_history.push_back(j);
  rep.grad_norm_history.push_back(gn);
  rep.step_history.push_back(0.0);
  rep.max_constraint_residual = s.constraint_residual();

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    if (gn < cfg.grad_tol) {
      rep.status = MaximizeStatus::converged;
      break;
    }
    double t = cfg.initial_step;
    bool accepted = false;
    std::optional<StiefelPoint> trial;
    double j_trial = 0.0;
    // below this the Armijo increase is invisible in J; fall back to a decrease in |grad|
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(j));
    std::optional<CMatrix> g_trial;
    while (t >= cfg.min_step) {
      trial.emplace(retract(s, t * g));
      j_trial = objective_J(*trial, rho, o);
      if (j_trial >= j + cfg.armijo_c * t * gn * gn) {
        accepted = true;
        break;
      }
      if (cfg.armijo_c * t * gn * gn <= noise && j_trial >= j - noise) {
        g_trial = gradient_J(*trial, rho, o);
        if (g_trial->norm() < gn) {
          accepted = true;
          break;
        }
        g_trial.reset();
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      rep.status = MaximizeStatus::line_search_failure;
      rep.diagnostics = "step underflow at iteration " + std::to_string(it) + ": J=" + std::to_string(j) +
                        " |grad|=" + std::to_string(gn);
      break;
    }
    s = std::move(*trial);
    j = j_trial;
    g = g_trial ? std::move(*g_trial) : gradient_J(s, rho, o);
    gn = g.norm();
    rep.objective_history.push_back(j);
    rep.grad_norm_history.push_back(gn);
    rep.step_history.push_back(t);
    rep.max_constraint_residual = std::max(rep.max_constraint_residual, s.constraint_residual());
  }
  if (rep.status != MaximizeStatus::line_search_failure && gn < cfg.grad_tol) rep.status = MaximizeStatus::converged;
  rep.iterations = it;
  rep.converged = rep.status == MaximizeStatus::converged;
  rep.final_objective = j;
  rep.point = s;
  rep.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Critical points

enum class CriticalKind { maximum, minimum, saddle, indefinite_tolerance };

inline const char* to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::maximum: return "maximum";
    case CriticalKind::minimum: return "minimum";
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::indefinite_tolerance: return "indefinite-tolerance";
  }
  return "unknown";
}

namespace detail {

inline RVector flatten_real(const CMatrix& x) {
  RVector v(2 * x.size());
  for (Index k = 0; k < x.size(); ++k) {
    v(2 * k) = x.data()[k].real();
    v(2 * k + 1) = x.data()[k].imag();
  }
  return v;
}

inline CMatrix unflatten_real(const RVector& v, Index rows, Index cols) {
  CMatrix x(rows, cols);
  for (Index k = 0; k < x.size(); ++k) x.data()[k] = cplx(v(2 * k), v(2 * k + 1));
  return x;
}

}  // namespace detail

/// Samples random tangent directions d_k, then takes Rayleigh quotients <d, Hess d>/<d, d> over the
/// span of {d_k, Hess d_k} (Rayleigh-Ritz), so small positive or negative curvature is not missed.
inline CriticalKind classify_critical_point(const StiefelPoint& s, const DensityMatrix& rho, const Observable& o,
                                            int samples, std::uint64_t seed = 7, double tol = 1e-9) {
  if (samples < 1) throw std::invalid_argument("classify_critical_point: samples must be positive");
  const double gn = project_tangent(s, gradient_J(s, rho, o)).delta.norm();
  if (gn >= 1e-6) throw ConstraintError("classify_critical_point: not a critical point (|grad| = " + std::to_string(gn) + ")");
  const Index rows = s.matrix().rows(), cols = s.dim();
  Rng rng(seed);
  RMatrix span(2 * rows * cols, 2 * samples);
  for (int k = 0; k < samples; ++k) {
    TangentVector d = project_tangent(s, random_ginibre(rows, cols, rng));
    d.delta /= d.delta.norm();
    span.col(2 * k) = detail::flatten_real(d.delta);
    span.col(2 * k + 1) = detail::flatten_real(hessian_apply(s, d, rho, o));
  }
  Eigen::ColPivHouseholderQR<RMatrix> qr(span);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  const RMatrix q = RMatrix(qr.householderQ()).leftCols(rank);
  RMatrix hq(q.rows(), rank);
  for (Index k = 0; k < rank; ++k) {
    // re-project: the basis is tangent only up to rounding
    const TangentVector d = project_tangent(s, detail::unflatten_real(q.col(k), rows, cols));
    hq.col(k) = detail::flatten_real(hessian_apply(s, d, rho, o));
  }
  const RMatrix t = q.transpose() * hq;
  const RVector ritz = Eigen::SelfAdjointEigenSolver<RMatrix>((t + t.transpose()) / 2.0, Eigen::EigenvaluesOnly).eigenvalues();
  const double scale = tol * (1.0 + o.matrix().norm());
  const bool any_pos = ritz.maxCoeff() > scale, any_neg = ritz.minCoeff() < -scale;
  if (any_pos && any_neg) return CriticalKind::saddle;
  if (any_neg) return CriticalKind::maximum;
  if (any_pos) return CriticalKind::minimum;
  return CriticalKind::indefinite_tolerance;
}

/// Replace channel rho -> |v><v| written as the Stiefel point K_i = |v><i|.
inline StiefelPoint replace_channel_point(const CVector& v) {
  const Index n = v.size();
  CMatrix s = CMatrix::Zero(n * n * n, n);
  const CVector unit = v / v.norm();
  for (Index i = 0; i < n; ++i) s.block(i * n, i, n, 1) = unit;
  return StiefelPoint(n, std::move(s));
}

}  // namespace oqc
