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
#include "oqc/lindblad.hpp"
#include "oqc/parallel.hpp"
#include "oqc/random.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace oqc {

struct ControlBounds {
  double u_min = -1.0;
  double u_max = 1.0;
  double n_max = 1.0;

  void validate() const {
    if (!std::isfinite(u_min) || !std::isfinite(u_max) || !std::isfinite(n_max) || u_min > u_max || n_max < 0.0)
      throw std::invalid_argument("invalid control bounds");
  }
};

/// Piecewise-constant controls on a uniform grid: coherent u_m and a common incoherent
/// occupation n_m applied to every transition during segment m.
struct ControlVector {
  std::vector<double> u;
  std::vector<double> n;
  double dt = 0.0;

  std::size_t segments() const { return u.size(); }
  double horizon() const { return dt * static_cast<double>(u.size()); }

  /// (u_1..u_M, n_1..n_M)
  std::vector<double> flat() const {
    std::vector<double> x(u);
    x.insert(x.end(), n.begin(), n.end());
    return x;
  }

  static ControlVector from_flat(const std::vector<double>& x, double dt) {
    const std::size_t m = x.size() / 2;
    return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m)),
            std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(m), x.end()), dt};
  }

  static ControlVector zeros(std::size_t m, double dt) { return {std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), dt}; }

  void validate() const {
    if (u.size() != n.size()) throw DimensionError("control vector: u and n lengths differ");
    if (!(dt >= 0.0)) throw std::invalid_argument("control vector: negative dt");
    for (double v : u)
      if (!std::isfinite(v)) throw std::invalid_argument("control vector: non-finite u");
    for (double v : n)
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("control vector: n must be nonnegative");
  }
};

inline ControlSchedule to_schedule(const ControlVector& c, Index dim) {
  c.validate();
  ControlSchedule s;
  if (c.dt == 0.0) return s;
  for (std::size_t m = 0; m < c.segments(); ++m) s.segments.push_back({c.dt, c.u[m], uniform_occupations(dim, c.n[m])});
  return s;
}

struct ControlGrid {
  std::size_t segments = 10;
  double dt = 0.1;
  ControlBounds bounds;
};

/// Maximize Tr[rho(T) O].
struct StateProblem {
  SystemModel sys;
  DecoherenceModel dec;
  ControlGrid grid;
  DensityMatrix rho0 = DensityMatrix::maximally_mixed(2);
  Observable observable = Observable(CMatrix::Identity(2, 2));
};

/// Minimize 1 - F_pro(Phi_c, U).
struct GateProblem {
  CMatrix target;
  SystemModel sys;
  DecoherenceModel dec;
  ControlGrid grid;

  void validate() const {
    if (target.rows() != sys.dim() || target.cols() != sys.dim()) throw DimensionError("gate target has wrong dimension");
    if (max_abs_diff(target.adjoint() * target, CMatrix::Identity(sys.dim(), sys.dim())) > kIdentityTol)
      throw ConstraintError("gate target is not unitary");
  }
};

using PulseProblem = std::variant<StateProblem, GateProblem>;

// ---------------------------------------------------------------------------
// Channels and fidelities

/// N^2 x N^2 superoperator of the schedule: P_M ... P_1.
inline CMatrix channel_superoperator(const SystemModel& sys, const DecoherenceModel& dec, const ControlVector& c) {
  c.validate();
  const AffineLiouvillian gen = build_affine_liouvillian(sys, dec);
  const Index d2 = sys.dim() * sys.dim();
  CMatrix total = CMatrix::Identity(d2, d2);
  if (c.dt == 0.0) return total;
  for (std::size_t m = 0; m < c.segments(); ++m) total = expm((gen.at(c.u[m], c.n[m]) * c.dt).eval()) * total;
  return total;
}

/// Choi matrix sum_ij |i><j| kron Phi(|i><j|), trace N for trace-preserving Phi.
inline CMatrix choi_matrix(const CMatrix& superop, Index dim) {
  if (superop.rows() != dim * dim || superop.cols() != dim * dim) throw DimensionError("choi_matrix: shape");
  CMatrix choi = CMatrix::Zero(dim * dim, dim * dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      choi.block(i * dim, j * dim, dim, dim) = unvec(superop.col(i + j * dim), dim);
  return choi;
}

/// Superoperator of rho -> U rho U^dagger: conj(U) kron U.
inline CMatrix unitary_superoperator(const CMatrix& u) { return kron(u.conjugate(), u); }

/// Tr[Choi(Phi) Choi(U)] / N^2.
inline double process_fidelity(const CMatrix& superop, const CMatrix& target) {
  const Index n = target.rows();
  const CMatrix a = choi_matrix(superop, n);
  const CMatrix b = choi_matrix(unitary_superoperator(target), n);
  return (a * b).trace().real() / static_cast<double>(n * n);
}

inline double state_objective(const ControlVector& c, const StateProblem& p) {
  const CMatrix total = channel_superoperator(p.sys, p.dec, c);
  const DensityMatrix rho = DensityMatrix::unchecked(unvec(total * vec(p.rho0.matrix()), p.sys.dim()));
  return expectation(rho, p.observable);
}

inline double gate_infidelity(const ControlVector& c, const GateProblem& g) {
  g.validate();
  const double f = process_fidelity(channel_superoperator(g.sys, g.dec, c), g.target);
  return std::clamp(1.0 - f, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Gradient

struct CostGradient {
  double cost = 0.0;
  std::vector<double> gradient;  // d cost / d (u_1..u_M, n_1..n_M)
};

namespace detail {

// Both objectives have the form f = Re Tr(A P_M ... P_1); cost = offset + sign * f.
struct LinearFunctional {
  CMatrix a;
  double sign;
  double offset;
};

inline LinearFunctional functional_of(const StateProblem& p) {
  const CVector x0 = vec(p.rho0.matrix());
  const CVector c = vec(p.observable.matrix().transpose());
  return {x0 * c.transpose(), -1.0, 0.0};
}

inline LinearFunctional functional_of(const GateProblem& g) {
  g.validate();
  const double n2 = static_cast<double>(g.sys.dim() * g.sys.dim());
  // Tr[Choi(Phi) Choi(U)] = Tr[S_U^dagger S_Phi]
  return {unitary_superoperator(g.target).adjoint() / n2, -1.0, 1.0};
}

inline const SystemModel& system_of(const PulseProblem& p) {
  return std::visit([](const auto& q) -> const SystemModel& { return q.sys; }, p);
}
inline const DecoherenceModel& decoherence_of(const PulseProblem& p) {
  return std::visit([](const auto& q) -> const DecoherenceModel& { return q.dec; }, p);
}

}  // namespace detail

inline const ControlGrid& grid_of(const PulseProblem& p) {
  return std::visit([](const auto& q) -> const ControlGrid& { return q.grid; }, p);
}

/// Cost (negated expectation for state transfer, infidelity for gates) and its exact gradient by
/// forward/adjoint sweeps: d/dtheta_m Tr(A P_M..P_1) = Tr(P_{m-1}..P_1 A P_M..P_{m+1} dP_m),
/// with dP_m the Frechet derivative of exp at L_m dt along dt dL/dtheta.
inline CostGradient cost_and_gradient(const PulseProblem& problem, const ControlVector& c) {
  c.validate();
  const auto fn = std::visit([](const auto& q) { return detail::functional_of(q); }, problem);
  const AffineLiouvillian gen = build_affine_liouvillian(detail::system_of(problem), detail::decoherence_of(problem));
  const std::size_t m = c.segments();
  const Index d2 = gen.dim * gen.dim;
  CostGradient out;
  out.gradient.assign(2 * m, 0.0);

  std::vector<CMatrix> props(m), du(m), dn(m);
  for (std::size_t k = 0; k < m; ++k) {
    const CMatrix x = gen.at(c.u[k], c.n[k]) * c.dt;
    auto [p, lu] = expm_frechet(x, (gen.coherent * c.dt).eval());
    props[k] = std::move(p);
    du[k] = std::move(lu);
    dn[k] = expm_frechet(x, (gen.incoherent_uniform * c.dt).eval()).second;
  }
  // fwd[k] = P_k ... P_1 (fwd[0] = I); bwd[k] = P_M ... P_{k+1}
  std::vector<CMatrix> fwd(m + 1), bwd(m + 1);
  fwd[0] = CMatrix::Identity(d2, d2);
  for (std::size_t k = 0; k < m; ++k) fwd[k + 1] = props[k] * fwd[k];
  bwd[m] = CMatrix::Identity(d2, d2);
  for (std::size_t k = m; k-- > 0;) bwd[k] = bwd[k + 1] * props[k];

  const double f = (fn.a * fwd[m]).trace().real();
  out.cost = fn.offset + fn.sign * f;
  for (std::size_t k = 0; k < m; ++k) {
    const CMatrix w = fwd[k] * fn.a * bwd[k + 1];  // Tr(w dP_k)
    out.gradient[k] = fn.sign * (w.cwiseProduct(du[k].transpose())).sum().real();
    out.gradient[m + k] = fn.sign * (w.cwiseProduct(dn[k].transpose())).sum().real();
  }
  return out;
}

inline double cost_of(const PulseProblem& problem, const ControlVector& c) {
  return std::visit(
      [&](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, StateProblem>)
          return -state_objective(c, q);
        else
          return 1.0 - process_fidelity(channel_superoperator(q.sys, q.dec, c), q.target);
      },
      problem);
}

/// Gradient of the natural objective: expectation (state) or infidelity (gate).
inline std::vector<double> grape_gradient(const PulseProblem& problem, const ControlVector& c) {
  auto cg = cost_and_gradient(problem, c);
  if (std::holds_alternative<StateProblem>(problem))
    for (double& g : cg.gradient) g = -g;
  return cg.gradient;
}

/// Natural objective from a cost value.
inline double objective_from_cost(const PulseProblem& problem, double cost) {
  return std::holds_alternative<StateProblem>(problem) ? -cost : std::clamp(cost, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Optimization

struct PulseConfig {
  int starts = 20;
  int max_iter = 2000;
  double grad_tol = 1e-8;
  std::uint64_t seed = 1;
  double armijo_c = 1e-4;
  double gap_tol = 1e-4;
  std::size_t workers = 1;
  bool keep_history = false;
  std::optional<ControlVector> initial;  // used for every start when set
};

struct PulseRun {
  ControlVector initial;
  ControlVector final;
  double final_objective = 0.0;
  double final_cost = 0.0;
  double projected_grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;
};

struct Cluster {
  double center = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// 1-D single linkage: sorted values split wherever the adjacent gap exceeds gap_tol.
inline std::vector<Cluster> cluster_report(std::vector<double> values, double gap_tol) {
  if (values.empty()) throw std::invalid_argument("cluster_report: no values");
  std::sort(values.begin(), values.end());
  std::vector<Cluster> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values[i] - values[i - 1] > gap_tol) {
      Cluster c;
      c.count = i - begin;
      c.min = values[begin];
      c.max = values[i - 1];
      double sum = 0.0;
      for (std::size_t k = begin; k < i; ++k) sum += values[k];
      c.center = sum / static_cast<double>(c.count);
      out.push_back(c);
      begin = i;
    }
  }
  return out;
}

struct LandscapeScan {
  std::vector<PulseRun> runs;
  std::vector<Cluster> clusters;
  double gap_tol = 0.0;

  const PulseRun& best() const {
    return *std::min_element(runs.begin(), runs.end(),
                             [](const PulseRun& a, const PulseRun& b) { return a.final_cost < b.final_cost; });
  }
};

namespace detail {

inline void clip(std::vector<double>& x, const ControlBounds& b, std::size_t m) {
  for (std::size_t k = 0; k < m; ++k) x[k] = std::clamp(x[k], b.u_min, b.u_max);
  for (std::size_t k = m; k < 2 * m; ++k) x[k] = std::clamp(x[k], 0.0, b.n_max);
}

// Gradient with components pointing out of the box at active bounds removed.
inline std::vector<double> projected(const std::vector<double>& x, const std::vector<double>& g,
                                     const ControlBounds& b, std::size_t m) {
  std::vector<double> p(g);
  for (std::size_t k = 0; k < 2 * m; ++k) {
    const double lo = k < m ? b.u_min : 0.0;
    const double hi = k < m ? b.u_max : b.n_max;
    if ((x[k] <= lo && g[k] > 0.0) || (x[k] >= hi && g[k] < 0.0)) p[k] = 0.0;
  }
  return p;
}

inline double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

/// Projected gradient descent on the cost from one start. Trial steps use the Barzilai-Borwein
/// length; Armijo backtracking along the projection arc keeps the cost monotone.
inline PulseRun optimize_single(const PulseProblem& problem, const ControlVector& start, const PulseConfig& cfg) {
  const ControlBounds& b = grid_of(problem).bounds;
  const std::size_t m = start.segments();
  const double dt = start.dt;
  PulseRun run;
  run.initial = start;

  std::vector<double> x = start.flat();
  detail::clip(x, b, m);
  CostGradient cg = cost_and_gradient(problem, ControlVector::from_flat(x, dt));
  std::vector<double> pg = detail::projected(x, cg.gradient, b, m);
  if (cfg.keep_history) run.cost_history.push_back(cg.cost);
  double step = 1.0;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    if (detail::norm(pg) < cfg.grad_tol) {
      run.converged = true;
      break;
    }
    double t = step;
    bool accepted = false;
    std::vector<double> xt(x.size());
    CostGradient trial;
    while (t > 1e-14) {
      for (std::size_t k = 0; k < x.size(); ++k) xt[k] = x[k] - t * cg.gradient[k];
      detail::clip(xt, b, m);
      double decrease = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) decrease += cg.gradient[k] * (x[k] - xt[k]);
      trial = cost_and_gradient(problem, ControlVector::from_flat(xt, dt));
      if (trial.cost <= cg.cost - cfg.armijo_c * decrease && decrease > 0.0) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    // Barzilai-Borwein length for the next trial
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double s = xt[k] - x[k];
      const double y = trial.gradient[k] - cg.gradient[k];
      ss += s * s;
      sy += s * y;
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-8, 1e4) : std::min(2.0 * t, 1e4);
    x = std::move(xt);
    cg = std::move(trial);
    pg = detail::projected(x, cg.gradient, b, m);
    if (cfg.keep_history) run.cost_history.push_back(cg.cost);
  }
  run.iterations = it;
  run.projected_grad_norm = detail::norm(pg);
  run.converged = run.converged || run.projected_grad_norm < cfg.grad_tol;
  run.final = ControlVector::from_flat(x, dt);
  run.final_cost = cg.cost;
  run.final_objective = objective_from_cost(problem, cg.cost);
  return run;
}

inline ControlVector random_controls(const ControlGrid& grid, Rng& rng) {
  std::uniform_real_distribution<double> uu(grid.bounds.u_min, grid.bounds.u_max);
  std::uniform_real_distribution<double> nn(0.0, grid.bounds.n_max);
  ControlVector c = ControlVector::zeros(grid.segments, grid.dt);
  for (auto& v : c.u) v = uu(rng);
  for (auto& v : c.n) v = nn(rng);
  return c;
}

/// Multistart scan; start k is seeded with derive_seed(cfg.seed, k).
inline LandscapeScan optimize_pulse(const PulseProblem& problem, const PulseConfig& cfg) {
  if (cfg.starts < 1) throw std::invalid_argument("optimize_pulse: starts must be >= 1");
  const ControlGrid& grid = grid_of(problem);
  grid.bounds.validate();
  if (std::holds_alternative<GateProblem>(problem)) std::get<GateProblem>(problem).validate();
  LandscapeScan scan;
  scan.gap_tol = cfg.gap_tol;
  scan.runs.resize(static_cast<std::size_t>(cfg.starts));
  parallel_for(scan.runs.size(), cfg.workers, [&](std::size_t k) {
    ControlVector start;
    if (cfg.initial) {
      start = *cfg.initial;
    } else {
      Rng rng(derive_seed(cfg.seed, k));
      start = random_controls(grid, rng);
    }
    scan.runs[k] = optimize_single(problem, start, cfg);
  });
  std::vector<double> finals;
  for (const auto& r : scan.runs) finals.push_back(r.final_objective);
  scan.clusters = cluster_report(finals, cfg.gap_tol);
  return scan;
}

/// Standard single- and two-qubit gates by name (I, X, Y, Z, H, S, T, CNOT, CZ).
inline CMatrix named_gate(const std::string& name) {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix g;
  if (name == "I") {
    g = CMatrix::Identity(2, 2);
  } else if (name == "X") {
    g = pauli_x();
  } else if (name == "Y") {
    g = pauli_y();
  } else if (name == "Z") {
    g = pauli_z();
  } else if (name == "H") {
    g.resize(2, 2);
    g << r, r, r, -r;
  } else if (name == "S") {
    g = CMatrix::Identity(2, 2);
    g(1, 1) = cplx(0.0, 1.0);
  } else if (name == "T") {
    g = CMatrix::Identity(2, 2);
    g(1, 1) = std::polar(1.0, std::numbers::pi / 4.0);
  } else if (name == "CNOT") {
    g = CMatrix::Zero(4, 4);
    g(0, 0) = g(1, 1) = g(2, 3) = g(3, 2) = 1.0;
  } else if (name == "CZ") {
    g = CMatrix::Identity(4, 4);
    g(3, 3) = -1.0;
  } else {
    throw std::invalid_argument("unknown gate '" + name + "'");
  }
  return g;
}

}  // namespace oqc
