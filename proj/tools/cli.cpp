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

#include "cli.hpp"

#include "oqc/core.hpp"
#include "oqc/ingrape.hpp"
#include "oqc/io.hpp"
#include "oqc/kraus_search.hpp"
#include "oqc/lindblad.hpp"
#include "oqc/reachable.hpp"
#include "oqc/stiefel.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace oqc::cli {
namespace {

namespace fs = std::filesystem;
using io::ConfigError;
using io::json;

struct Options {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool verbose = false;
};

struct RunResult {
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

std::uint64_t seed_of(const json& cfg, const Options& opt) {
  if (opt.seed) return *opt.seed;
  return static_cast<std::uint64_t>(io::integer_or(cfg, "seed", 1, ""));
}

std::size_t workers_of(const json& cfg, const Options& opt) {
  if (opt.workers) return std::max<std::size_t>(1, *opt.workers);
  return static_cast<std::size_t>(std::max(1L, io::integer_or(cfg, "workers", 1, "")));
}

// ---------------------------------------------------------------------------
// Shared parsing

struct Model {
  SystemModel sys;
  DecoherenceModel dec;
};

Model parse_model(const json& v, const std::string& path) {
  Model m;
  if (v.contains("qubit")) {
    const std::string p = io::join(path, "qubit");
    const json& q = v["qubit"];
    const double omega = io::as_number(io::require(q, "omega", p), io::join(p, "omega"));
    const double mu = io::number_or(q, "mu", 1.0, p);
    const double gamma = io::as_number(io::require(q, "gamma", p), io::join(p, "gamma"));
    if (!(gamma >= 0.0)) throw ConfigError(io::join(p, "gamma"), "must be nonnegative");
    m.sys = SystemModel::qubit(omega, mu);
    m.dec = DecoherenceModel::qubit(gamma);
    return m;
  }
  m.sys.energies = io::parse_vector(io::require(v, "energies", path), io::join(path, "energies"));
  m.sys.dipole = io::parse_matrix(io::require(v, "dipole", path), io::join(path, "dipole"));
  m.dec.couplings = io::parse_real_matrix(io::require(v, "couplings", path), io::join(path, "couplings"));
  m.dec.epsilon = io::number_or(v, "epsilon", 1.0, path);
  if (m.sys.dipole.rows() != m.sys.dim()) throw ConfigError(io::join(path, "dipole"), "dimension does not match energies");
  if (m.dec.couplings.rows() != m.sys.dim()) throw ConfigError(io::join(path, "couplings"), "dimension does not match energies");
  try {
    m.sys.validate();
    m.dec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return m;
}

DensityMatrix parse_state(const json& cfg, const std::string& key, Index dim, const std::string& path) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return DensityMatrix::basis_state(dim, 0);
  const std::string p = io::join(path, key);
  const CMatrix m = io::parse_matrix(*it, p);
  if (m.rows() != dim) throw ConfigError(p, "state dimension does not match model");
  const auto verdict = validate_density(m);
  if (!verdict.valid) throw ConfigError(p, "not a density matrix (" + verdict.worst + ")");
  return DensityMatrix(m);
}

Observable parse_observable(const json& v, Index dim, const std::string& path) {
  const CMatrix m = io::parse_matrix(v, path);
  if (m.rows() != dim) throw ConfigError(path, "observable dimension mismatch");
  if (hermiticity_error(m) > kStructuralTol) throw ConfigError(path, "observable is not Hermitian");
  return Observable(m);
}

Occupations parse_occupations(const json& v, Index dim, const std::string& path) {
  if (v.is_number()) {
    if (!(v.get<double>() >= 0.0)) throw ConfigError(path, "occupation must be nonnegative");
    return uniform_occupations(dim, v.get<double>());
  }
  Occupations n = io::parse_real_matrix(v, path);
  if (n.rows() != dim) throw ConfigError(path, "occupation matrix dimension mismatch");
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      if (i != j && !(n(i, j) >= 0.0)) throw ConfigError(path, "occupations must be nonnegative");
  return (n + n.transpose()) / 2.0;
}

std::vector<std::string> state_columns(Index dim) {
  std::vector<std::string> cols;
  if (dim == 2) cols.insert(cols.end(), {"x", "y", "z"});
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) {
      cols.push_back("re_" + std::to_string(i) + std::to_string(j));
      cols.push_back("im_" + std::to_string(i) + std::to_string(j));
    }
  return cols;
}

std::vector<double> state_row(double t, const DensityMatrix& rho) {
  std::vector<double> row{t};
  if (rho.dim() == 2) {
    const auto r = bloch_from_density(rho);
    row.insert(row.end(), {r.x, r.y, r.z});
  }
  for (Index i = 0; i < rho.dim(); ++i)
    for (Index j = 0; j < rho.dim(); ++j) {
      row.push_back(rho.matrix()(i, j).real());
      row.push_back(rho.matrix()(i, j).imag());
    }
  return row;
}

// ---------------------------------------------------------------------------
// simulate

RunResult simulate(const json& cfg, const Options& opt) {
  RunResult out;
  out.seed = seed_of(cfg, opt);
  const Model model = parse_model(io::require(cfg, "model", ""), "model");
  const Index n = model.sys.dim();
  const DensityMatrix rho0 = parse_state(cfg, "initial_state", n, "");
  const json& segs = io::require(cfg, "segments", "");
  if (!segs.is_array()) throw ConfigError("segments", "expected a list");
  ControlSchedule sched;
  sched.t0 = io::number_or(cfg, "t0", 0.0, "");
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const std::string p = "segments[" + std::to_string(k) + "]";
    const json& s = segs[k];
    Segment seg;
    seg.dt = io::as_number(io::require(s, "dt", p), p + ".dt");
    if (!(seg.dt > 0.0)) throw ConfigError(p + ".dt", "must be positive");
    seg.u = io::number_or(s, "u", 0.0, p);
    seg.n = s.contains("n") ? parse_occupations(s["n"], n, p + ".n") : uniform_occupations(n, 0.0);
    const long repeat = io::integer_or(s, "repeat", 1, p);
    if (repeat < 1) throw ConfigError(p + ".repeat", "must be >= 1");
    for (long r = 0; r < repeat; ++r) sched.segments.push_back(seg);
  }
  const auto traj = propagate_schedule(model.sys, model.dec, sched, rho0);
  const auto times = sched.boundaries();

  std::vector<std::string> header{"t"};
  for (auto& c : state_columns(n)) header.push_back(c);
  io::Csv csv(header), final_csv(header);
  json records = json::array();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    csv.row(state_row(times[k], traj[k]));
    json rec{{"t", times[k]}, {"rho", io::matrix_to_json(traj[k].matrix())}};
    if (n == 2) {
      const auto r = bloch_from_density(traj[k]);
      rec["bloch"] = {r.x, r.y, r.z};
    }
    records.push_back(rec);
  }
  final_csv.row(state_row(times.back(), traj.back()));
  out.files.emplace_back("trajectory.csv", csv.str());
  out.files.emplace_back("final_state.csv", final_csv.str());
  out.files.emplace_back("trajectory.json", json{{"dim", n}, {"states", records}}.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------
// stiefel-max

RunResult stiefel_max(const json& cfg, const Options& opt) {
  RunResult out;
  out.seed = seed_of(cfg, opt);
  out.workers = workers_of(cfg, opt);
  const CMatrix rho_m = io::parse_matrix(io::require(cfg, "rho", ""), "rho");
  const auto verdict = validate_density(rho_m);
  if (!verdict.valid) throw ConfigError("rho", "not a density matrix (" + verdict.worst + ")");
  const DensityMatrix rho(rho_m);
  const Observable o = parse_observable(io::require(cfg, "observable", ""), rho.dim(), "observable");
  MaximizeConfig mc;
  mc.max_iter = static_cast<int>(io::integer_or(cfg, "max_iter", mc.max_iter, ""));
  mc.grad_tol = io::number_or(cfg, "grad_tol", mc.grad_tol, "");
  const long starts = io::integer_or(cfg, "starts", 1, "");
  const long classify = io::integer_or(cfg, "classify_samples", 0, "");
  if (starts < 1) throw ConfigError("starts", "must be >= 1");
  if (mc.max_iter < 0) throw ConfigError("max_iter", "must be >= 0");

  std::vector<std::optional<OptimizationReport>> reports(static_cast<std::size_t>(starts));
  parallel_for(reports.size(), out.workers, [&](std::size_t k) {
    MaximizeConfig local = mc;
    local.seed = derive_seed(out.seed, k);
    reports[k] = maximize(rho, o, local);
  });

  const RVector ev = o.eigenvalues();
  io::Csv log({"start", "iter", "J", "grad_norm", "step"});
  json runs = json::array();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = *reports[k];
    for (std::size_t i = 0; i < r.objective_history.size(); ++i)
      log.row({double(k), double(i), r.objective_history[i], r.grad_norm_history[i], r.step_history[i]});
    json kraus = json::array();
    const KrausSet phi = r.point.kraus();
    for (const auto& op : phi.operators()) kraus.push_back(io::matrix_to_json(op));
    json run{{"start", k},
             {"iterations", r.iterations},
             {"final_objective", r.final_objective},
             {"final_grad_norm", r.grad_norm_history.back()},
             {"converged", r.converged},
             {"status", to_string(r.status)},
             {"diagnostics", r.diagnostics},
             {"max_constraint_residual", r.max_constraint_residual},
             {"kraus", kraus}};
    if (classify > 0 && r.grad_norm_history.back() < 1e-6)
      run["critical_point"] = to_string(classify_critical_point(r.point, rho, o, static_cast<int>(classify), out.seed));
    runs.push_back(run);
  }
  json report{{"lambda_min", ev.minCoeff()}, {"lambda_max", ev.maxCoeff()}, {"runs", runs}};
  out.files.emplace_back("report.json", report.dump(2) + "\n");
  out.files.emplace_back("iterations.csv", log.str());
  return out;
}

// ---------------------------------------------------------------------------
// ingrape

RunResult ingrape(const json& cfg, const Options& opt) {
  RunResult out;
  out.seed = seed_of(cfg, opt);
  out.workers = workers_of(cfg, opt);
  const Model model = parse_model(io::require(cfg, "model", ""), "model");
  const Index n = model.sys.dim();

  ControlGrid grid;
  const json& g = io::require(cfg, "grid", "");
  const long segments = io::integer_or(g, "segments", -1, "grid");
  if (segments < 1) throw ConfigError("grid.segments", "required positive integer");
  grid.segments = static_cast<std::size_t>(segments);
  grid.dt = io::as_number(io::require(g, "dt", "grid"), "grid.dt");
  if (!(grid.dt > 0.0)) throw ConfigError("grid.dt", "must be positive");
  const json& b = io::require(cfg, "bounds", "");
  grid.bounds.u_min = io::as_number(io::require(b, "u_min", "bounds"), "bounds.u_min");
  grid.bounds.u_max = io::as_number(io::require(b, "u_max", "bounds"), "bounds.u_max");
  grid.bounds.n_max = io::number_or(b, "n_max", 0.0, "bounds");
  try {
    grid.bounds.validate();
  } catch (const std::exception& e) {
    throw ConfigError("bounds", e.what());
  }

  const std::string kind = io::string_or(cfg, "problem", "", "");
  PulseProblem problem;
  if (kind == "gate") {
    const json& t = io::require(cfg, "target", "");
    GateProblem gp;
    if (t.contains("gate")) {
      try {
        gp.target = named_gate(t["gate"].get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError("target.gate", e.what());
      }
    } else {
      gp.target = io::parse_matrix(io::require(t, "unitary", "target"), "target.unitary");
    }
    gp.sys = model.sys;
    gp.dec = model.dec;
    gp.grid = grid;
    try {
      gp.validate();
    } catch (const std::exception& e) {
      throw ConfigError("target", e.what());
    }
    problem = gp;
  } else if (kind == "state") {
    StateProblem sp;
    sp.sys = model.sys;
    sp.dec = model.dec;
    sp.grid = grid;
    sp.rho0 = parse_state(cfg, "initial_state", n, "");
    sp.observable = parse_observable(io::require(cfg, "observable", ""), n, "observable");
    problem = sp;
  } else {
    throw ConfigError("problem", "must be \"state\" or \"gate\"");
  }

  PulseConfig pc;
  pc.starts = static_cast<int>(io::integer_or(cfg, "starts", pc.starts, ""));
  pc.max_iter = static_cast<int>(io::integer_or(cfg, "max_iter", pc.max_iter, ""));
  pc.grad_tol = io::number_or(cfg, "grad_tol", pc.grad_tol, "");
  pc.gap_tol = io::number_or(cfg, "gap_tol", pc.gap_tol, "");
  pc.seed = out.seed;
  pc.workers = out.workers;
  if (pc.starts < 1) throw ConfigError("starts", "must be >= 1");
  const long bins = io::integer_or(cfg, "histogram_bins", 0, "");

  const LandscapeScan scan = optimize_pulse(problem, pc);

  std::vector<std::string> header{"run", "final_objective", "iterations", "converged", "projected_grad_norm"};
  for (std::size_t k = 0; k < grid.segments; ++k) header.push_back("u_" + std::to_string(k + 1));
  for (std::size_t k = 0; k < grid.segments; ++k) header.push_back("n_" + std::to_string(k + 1));
  io::Csv runs(header);
  for (std::size_t k = 0; k < scan.runs.size(); ++k) {
    const auto& r = scan.runs[k];
    std::vector<double> row{double(k), r.final_objective, double(r.iterations), r.converged ? 1.0 : 0.0,
                            r.projected_grad_norm};
    row.insert(row.end(), r.final.u.begin(), r.final.u.end());
    row.insert(row.end(), r.final.n.begin(), r.final.n.end());
    runs.row(row);
  }
  json clusters = json::array();
  for (const auto& c : scan.clusters)
    clusters.push_back({{"center", c.center}, {"min", c.min}, {"max", c.max}, {"count", c.count}});
  std::size_t converged = 0;
  for (const auto& r : scan.runs) converged += r.converged;
  const auto& best = scan.best();
  json summary{{"problem", kind},
               {"objective", kind == "gate" ? "infidelity" : "expectation"},
               {"starts", pc.starts},
               {"converged_runs", converged},
               {"best_objective", best.final_objective},
               {"best_controls", {{"u", best.final.u}, {"n", best.final.n}, {"dt", best.final.dt}}},
               {"gap_tol", scan.gap_tol},
               {"clusters", clusters},
               {"grid", {{"segments", grid.segments}, {"dt", grid.dt}, {"horizon", grid.dt * double(grid.segments)}}},
               {"bounds", {{"u_min", grid.bounds.u_min}, {"u_max", grid.bounds.u_max}, {"n_max", grid.bounds.n_max}}}};
  out.files.emplace_back("runs.csv", runs.str());
  out.files.emplace_back("scan.json", summary.dump(2) + "\n");
  if (bins > 0) {
    double lo = scan.runs.front().final_objective, hi = lo;
    for (const auto& r : scan.runs) {
      lo = std::min(lo, r.final_objective);
      hi = std::max(hi, r.final_objective);
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const double width = hi > lo ? (hi - lo) / double(bins) : 1.0;
    for (const auto& r : scan.runs) {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(bins) - 1,
                                             static_cast<std::size_t>((r.final_objective - lo) / width));
      ++counts[idx];
    }
    io::Csv hist({"value", "count"});
    for (std::size_t k = 0; k < counts.size(); ++k) hist.row({lo + (double(k) + 0.5) * width, double(counts[k])});
    out.files.emplace_back("histogram.csv", hist.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// kraus-search

RunResult kraus_search(const json& cfg, const Options& opt) {
  RunResult out;
  out.seed = seed_of(cfg, opt);
  const int root = static_cast<int>(io::integer_or(cfg, "sqrt", 0, ""));
  if (root != 0 && root < 2) throw ConfigError("sqrt", "declared root must be >= 2");
  const json& alpha = io::require(cfg, "alphabet", "");
  if (!alpha.is_array() || alpha.empty()) throw ConfigError("alphabet", "expected a nonempty list of channels");
  std::vector<ExactChannel> channels;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const std::string p = "alphabet[" + std::to_string(k) + "]";
    ExactChannel c;
    c.name = io::string_or(alpha[k], "name", "phi" + std::to_string(k + 1), p);
    const json& ops = io::require(alpha[k], "kraus", p);
    if (!ops.is_array() || ops.empty()) throw ConfigError(p + ".kraus", "expected a nonempty list of matrices");
    for (std::size_t j = 0; j < ops.size(); ++j)
      c.kraus.push_back(io::parse_exact_matrix(ops[j], root, p + ".kraus[" + std::to_string(j) + "]"));
    channels.push_back(std::move(c));
  }
  ChannelAlphabet alphabet;
  try {
    alphabet = ChannelAlphabet(std::move(channels));
  } catch (const std::exception& e) {
    throw ConfigError("alphabet", e.what());
  }
  const exact::Matrix rho_i = io::parse_exact_matrix(io::require(cfg, "initial", ""), root, "initial");
  const exact::Matrix rho_f = io::parse_exact_matrix(io::require(cfg, "target", ""), root, "target");
  if (rho_i.rows() != alphabet.dim()) throw ConfigError("initial", "dimension does not match alphabet");
  if (rho_f.rows() != alphabet.dim()) throw ConfigError("target", "dimension does not match alphabet");
  SearchLimits limits;
  limits.max_depth = static_cast<int>(io::integer_or(cfg, "max_depth", limits.max_depth, ""));
  limits.max_states = static_cast<std::size_t>(io::integer_or(cfg, "max_states", static_cast<long>(limits.max_states), ""));
  if (limits.max_depth < 0) throw ConfigError("max_depth", "must be >= 0");
  const std::string mode = io::string_or(cfg, "mode", "exact", "");
  const double tol = io::number_or(cfg, "tol", 1e-9, "");

  SearchOutcome res;
  if (mode == "exact") {
    res = bounded_reachability(alphabet, rho_i, rho_f, limits);
  } else if (mode == "float") {
    if (!(tol > 0.0)) throw ConfigError("tol", "must be positive");
    res = bounded_reachability(alphabet, rho_i.to_double(), rho_f.to_double(), limits, tol);
  } else {
    throw ConfigError("mode", "must be \"exact\" or \"float\"");
  }
  json names = json::array();
  for (auto k : res.sequence) names.push_back(alphabet.channels()[k].name);
  json doc{{"outcome", res.found ? "Found" : "NotFoundUpToDepth"},
           {"mode", mode},
           {"sequence", res.sequence},
           {"sequence_names", names},
           {"length", res.sequence.size()},
           {"max_depth", res.max_depth},
           {"states_explored", res.states_explored},
           {"peak_frontier", res.peak_frontier},
           {"replay_verified", res.found ? json(res.replay_verified) : json(nullptr)},
           {"note", res.found ? "sequence indices are applied left to right (first index acts first)"
                              : "no sequence up to max_depth; this is not a proof of unreachability"}};
  if (mode == "float") doc["tol"] = tol;
  out.files.emplace_back("outcome.json", doc.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------
// reachable

RunResult reachable(const json& cfg, const Options& opt) {
  RunResult out;
  out.seed = seed_of(cfg, opt);
  out.workers = workers_of(cfg, opt);
  SamplerConfig sc;
  sc.omega = io::as_number(io::require(cfg, "omega", ""), "omega");
  sc.mu = io::number_or(cfg, "mu", sc.mu, "");
  sc.gamma = io::as_number(io::require(cfg, "gamma", ""), "gamma");
  sc.u_max = io::number_or(cfg, "u_max", sc.u_max, "");
  sc.n_max = io::number_or(cfg, "n_max", sc.n_max, "");
  if (cfg.contains("segments")) {
    const json& s = cfg["segments"];
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
      throw ConfigError("segments", "expected [min, max] integers");
    sc.min_segments = s[0].get<int>();
    sc.max_segments = s[1].get<int>();
  }
  if (cfg.contains("durations")) {
    const RVector d = io::parse_vector(cfg["durations"], "durations");
    if (d.size() != 2) throw ConfigError("durations", "expected [min, max]");
    sc.min_duration = d(0);
    sc.max_duration = d(1);
  }
  sc.samples = static_cast<std::size_t>(io::integer_or(cfg, "samples", static_cast<long>(sc.samples), ""));
  sc.resolution = static_cast<int>(io::integer_or(cfg, "resolution", sc.resolution, ""));
  sc.polar_bins = static_cast<int>(io::integer_or(cfg, "polar_bins", sc.polar_bins, ""));
  sc.azimuth_bins = static_cast<int>(io::integer_or(cfg, "azimuth_bins", sc.azimuth_bins, ""));
  sc.record_prefixes = io::bool_or(cfg, "record_prefixes", sc.record_prefixes, "");
  sc.seed = out.seed;
  sc.workers = out.workers;
  try {
    sc.validate();
  } catch (const std::exception& e) {
    throw ConfigError("reachable", e.what());
  }
  if (sc.resolution < 2) throw ConfigError("resolution", "must be >= 2");
  UnreachableOptions uo;
  uo.slack = io::number_or(cfg, "slack", uo.slack, "");
  uo.quantile = io::number_or(cfg, "quantile", uo.quantile, "");
  const DensityMatrix rho0 = parse_state(cfg, "initial_state", 2, "");

  const auto points = sample_reachable(sc, rho0);
  const CoverageGrid grid = coverage_map(points, sc.resolution, sc.polar_bins, sc.azimuth_bins);
  io::Csv cloud({"x", "y", "z"});
  for (const auto& p : points) cloud.row({p.x, p.y, p.z});
  json grid_doc{{"resolution", grid.resolution},
                {"total_in_ball", grid.total_in_ball},
                {"occupied", grid.occupied},
                {"occupied_first_half", grid.occupied_first_half},
                {"occupancy_fraction", grid.occupancy_fraction()},
                {"points", grid.points},
                {"counts", grid.counts},
                {"polar_bins", grid.polar_bins},
                {"azimuth_bins", grid.azimuth_bins},
                {"envelope", grid.envelope}};
  out.files.emplace_back("points.csv", cloud.str());
  out.files.emplace_back("grid.json", grid_doc.dump() + "\n");

  const UnreachableReport r = unreachable_report(grid, sc.gamma, sc.omega, uo);
  json report{{"pass", r.pass},
              {"gamma", r.gamma},
              {"omega", r.omega},
              {"delta", r.delta},
              {"bound", r.bound},
              {"slack", r.slack},
              {"quantile", r.quantile},
              {"linear_size", r.linear_size},
              {"mean_depth", r.mean_depth},
              {"empty_bins", r.empty_bins},
              {"occupancy_fraction", r.occupancy_fraction},
              {"unreachable_volume_fraction", r.unreachable_volume_fraction},
              {"volume_size_proxy", r.volume_size_proxy},
              {"converged", r.converged},
              {"sampler",
               {{"mu", sc.mu},
                {"u_max", sc.u_max},
                {"n_max", sc.n_max},
                {"segments", {sc.min_segments, sc.max_segments}},
                {"durations", {sc.min_duration, sc.max_duration}},
                {"samples", sc.samples},
                {"record_prefixes", sc.record_prefixes},
                {"resolution", sc.resolution}}}};
  out.files.emplace_back("report.json", report.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------

void write_file(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << contents;
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

int run(const std::vector<std::string>& argv) {
  CLI::App app{"Open quantum system control toolkit"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "propagate a master equation under piecewise-constant controls"},
      {"stiefel-max", "maximize an observable over CPTP maps on the Stiefel manifold"},
      {"ingrape", "multistart incoherent GRAPE pulse optimization"},
      {"kraus-search", "bounded search for a channel sequence between two states"},
      {"reachable", "Monte-Carlo reachable set of the driven open qubit"}};
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opt.config_path, "JSON config document")->required();
    sub->add_option("-o,--out", opt.out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--workers", workers, "cap on concurrent workers");
    sub->add_flag("-v,--verbose", opt.verbose, "print progress to stderr");
  }
  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }
  for (auto* sub : app.get_subcommands()) {
    opt.subcommand = sub->get_name();
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--workers")) opt.workers = workers;
  }

  const fs::path out_dir(opt.out_dir);
  auto fail = [&](int code, const std::string& message) {
    std::cerr << "oqc " << opt.subcommand << ": " << message << "\n";
    try {
      fs::create_directories(out_dir);
      fs::remove(out_dir / "manifest.json");
      std::ofstream(out_dir / "FAILED") << "exit " << code << "\n" << message << "\n";
    } catch (...) {
    }
    return code;
  };

  std::string text;
  {
    std::ifstream f(opt.config_path, std::ios::binary);
    if (!f) return fail(kValidationError, "cannot read config " + opt.config_path);
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    return fail(kValidationError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) return fail(kValidationError, "config must be a JSON object");

  RunResult result;
  try {
    if (opt.subcommand == "simulate")
      result = simulate(cfg, opt);
    else if (opt.subcommand == "stiefel-max")
      result = stiefel_max(cfg, opt);
    else if (opt.subcommand == "ingrape")
      result = ingrape(cfg, opt);
    else if (opt.subcommand == "kraus-search")
      result = kraus_search(cfg, opt);
    else
      result = reachable(cfg, opt);
  } catch (const ConfigError& e) {
    return fail(kValidationError, std::string("config error at ") + e.what());
  } catch (const DimensionError& e) {
    return fail(kValidationError, e.what());
  } catch (const ConstraintError& e) {
    return fail(kValidationError, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kValidationError, e.what());
  } catch (const std::exception& e) {
    return fail(kRuntimeFailure, e.what());
  }

  try {
    fs::create_directories(out_dir);
    fs::remove(out_dir / "FAILED");
    json outputs = json::array();
    for (const auto& [name, contents] : result.files) {
      write_file(out_dir / name, contents);
      outputs.push_back({{"file", name}, {"fnv1a64", io::fnv1a_hex(contents)}});
    }
    json manifest{{"tool", "oqc"},
                  {"version", kVersion},
                  {"subcommand", opt.subcommand},
                  {"config", opt.config_path},
                  {"config_fnv1a64", io::fnv1a_hex(text)},
                  {"seed", result.seed},
                  {"workers", result.workers},
                  {"libraries", {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION)}}},
                  {"outputs", outputs}};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    return fail(kRuntimeFailure, std::string("writing outputs failed: ") + e.what());
  }
  if (opt.verbose) std::cerr << "oqc " << opt.subcommand << ": wrote " << result.files.size() << " files to " << opt.out_dir << "\n";
  return kOk;
}

}  // namespace oqc::cli
