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

// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include "cli.hpp"
#include "kraus_fixtures.hpp"
#include "oqc/cardano.hpp"
#include "oqc/io.hpp"
#include "oqc/kraus_search.hpp"
#include "oqc/lindblad.hpp"
#include "oqc/random.hpp"
#include "oqc/stiefel.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace oqc {
namespace {

namespace fs = std::filesystem;
using io::json;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "oqc_acceptance" / name;
  fs::remove_all(p);
  return p;
}

fs::path config(const std::string& name) { return fs::path(OQC_CONFIG_DIR) / name; }

int run_cli(const std::string& sub, const fs::path& cfg, const fs::path& out, const std::string& workers = "1") {
  return cli::run({"oqc", sub, "-c", cfg.string(), "-o", out.string(), "--workers", workers});
}

struct Model {
  SystemModel sys;
  DecoherenceModel dec;
};

Model random_model(Index n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Model m;
  m.sys.energies = RVector(n);
  double e = 0.0;
  for (Index i = 0; i < n; ++i) m.sys.energies(i) = (e += 0.5 + unit(rng));
  m.sys.dipole = hermitian_part(random_ginibre(n, n, rng));
  m.dec.couplings = RMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) m.dec.couplings(i, j) = m.dec.couplings(j, i) = 0.2 * unit(rng);
  m.dec.epsilon = 0.5 + unit(rng);
  return m;
}

Verdict physicality() {
  Rng rng(101);
  std::uniform_real_distribution<double> dur(0.01, 5.0), ctrl(-3.0, 3.0), occ(0.0, 3.0);
  double worst_trace = 0.0, worst_eig = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index n = 2 + t % 3;
    const Model m = random_model(n, rng);
    ControlSchedule s;
    for (int k = 0; k < 4; ++k) {
      Occupations o = Occupations::Zero(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < i; ++j) o(i, j) = o(j, i) = occ(rng);
      s.segments.push_back({dur(rng), ctrl(rng), o});
    }
    for (const auto& rho : propagate_schedule(m.sys, m.dec, s, random_density(n, rng))) {
      worst_trace = std::max(worst_trace, std::abs(rho.matrix().trace() - 1.0));
      worst_eig = std::min(worst_eig, hermitian_eigenvalues(rho.matrix()).minCoeff());
    }
  }
  return {worst_trace < 1e-10 && worst_eig > -1e-9,
          "1000 schedules, N = 2..4: max |tr - 1| = " + num(worst_trace) + ", min eigenvalue = " + num(worst_eig)};
}

Verdict detailed_balance() {
  double worst = 0.0;
  for (double n : {0.0, 1.0, 10.0}) {
    ControlSchedule s;
    s.segments.push_back({2000.0, 0.0, uniform_occupations(2, n)});
    const auto rho = propagate_schedule(SystemModel::qubit(1.0, 1.0), DecoherenceModel::qubit(0.1), s,
                                        DensityMatrix::basis_state(2, 1)).back();
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(0, 0) = (n + 1.0) / (2.0 * n + 1.0);
    expected(1, 1) = n / (2.0 * n + 1.0);
    worst = std::max(worst, max_abs_diff(rho.matrix(), expected));
    const auto ss = stationary_state(SystemModel::qubit(1.0, 1.0), DecoherenceModel::qubit(0.1), 0.0, uniform_occupations(2, n));
    worst = std::max(worst, max_abs_diff(ss.matrix(), expected));
  }
  return {worst < 1e-6, "n = 0, 1, 10: max deviation from thermal populations = " + num(worst)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += std::log(x[k]), my += std::log(y[k]);
  mx /= double(x.size());
  my /= double(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
    sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
  }
  return sxy / sxx;
}

Verdict stiefel_derivatives() {
  Rng rng(202);
  double worst_grad = 0.0, worst_slope = 0.0;
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + t % 2;
    const StiefelPoint s = random_stiefel_point(n, rng);
    const DensityMatrix rho = random_density(n, rng);
    const Observable o = random_observable(n, rng);
    const CMatrix g = gradient_J(s, rho, o);
    std::vector<CMatrix> dirs;
    for (int q = 0; q < 3; ++q) {
      CMatrix d = project_tangent(s, random_ginibre(s.matrix().rows(), n, rng)).delta;
      dirs.push_back(d / d.norm());
    }
    const double fd = (objective_J(retract(s, h * dirs[0], Retraction::polar), rho, o) -
                       objective_J(retract(s, -h * dirs[0], Retraction::polar), rho, o)) /
                      (2 * h);
    worst_grad = std::max(worst_grad, std::abs(fd - inner(g, dirs[0])));
    const double j0 = objective_J(s, rho, o);
    std::vector<double> ts, errs;
    for (int e = 0; e <= 8; ++e) {
      const double step = std::pow(10.0, -4.0 + 0.25 * e);
      double err = 0.0;
      for (const auto& d : dirs) {
        const double hq = inner(d, hessian_apply(s, {d}, rho, o));
        err += std::abs(objective_J(retract(s, step * d, Retraction::polar), rho, o) - j0 - step * inner(g, d) -
                        0.5 * step * step * hq);
      }
      ts.push_back(step);
      errs.push_back(err);
    }
    worst_slope = std::max(worst_slope, std::abs(loglog_slope(ts, errs) - 3.0));
  }
  return {worst_grad < 1e-6 && worst_slope <= 0.2,
          "100 instances: max gradient FD error = " + num(worst_grad) + ", max |slope - 3| = " + num(worst_slope)};
}

Verdict stiefel_multistart() {
  Rng rng(303);
  const DensityMatrix rho = random_density(3, rng);
  const Observable o = random_observable(3, rng);
  const double lmax = o.eigenvalues().maxCoeff();
  double worst = 0.0;
  int converged = 0;
  for (int k = 0; k < 20; ++k) {
    MaximizeConfig cfg;
    cfg.seed = derive_seed(7, static_cast<std::uint64_t>(k));
    const auto r = maximize(rho, o, cfg);
    worst = std::max(worst, std::abs(r.final_objective - lmax));
    converged += r.converged;
  }
  return {worst < 1e-5, "20 starts, N = 3: max |J - lambda_max| = " + num(worst) + ", converged " + std::to_string(converged) + "/20"};
}

double multiset_distance(std::array<cplx, 3> a, std::array<cplx, 3> b) {
  std::array<int, 3> p{0, 1, 2};
  double best = std::numeric_limits<double>::infinity();
  do {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(a[k] - b[static_cast<std::size_t>(p[k])]));
    best = std::min(best, d);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

Verdict cardano() {
  Rng rng(404);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0, worst_res = 0.0;
  for (int t = 0; t < 10000; ++t) {
    Eigen::Matrix3d m;
    for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = u(rng);
    Eigen::EigenSolver<Eigen::Matrix3d> es(m, false);
    const auto r = cardano_eigenvalues(m);
    worst = std::max(worst, multiset_distance(r, {es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)}));
    const double scale = 1.0 + std::pow(m.norm(), 3);
    for (const auto& x : r) worst_res = std::max(worst_res, characteristic_residual(m, x) / scale);
  }
  return {worst < 1e-10 && worst_res < 1e-8,
          "10000 matrices: max eigenvalue deviation = " + num(worst) + ", max scaled residual = " + num(worst_res)};
}

Verdict hadamard() {
  const fs::path out = scratch("hadamard");
  if (run_cli("ingrape", config("ingrape_hadamard.json"), out) != 0) return {false, "ingrape run failed"};
  const json scan = json::parse(slurp(out / "scan.json"));
  const double best = scan["best_objective"].get<double>();
  const std::size_t clusters = scan["clusters"].size();
  return {scan["starts"] == 20 && best < 1e-3 && clusters == 1,
          std::to_string(scan["starts"].get<int>()) + " starts: best infidelity = " + num(best) + ", clusters = " +
              std::to_string(clusters)};
}

Verdict tgate_traps() {
  const fs::path out = scratch("tgate");
  if (run_cli("ingrape", config("ingrape_tgate.json"), out) != 0) return {false, "ingrape run failed"};
  const json scan = json::parse(slurp(out / "scan.json"));
  std::string centers;
  for (const auto& c : scan["clusters"])
    centers += (centers.empty() ? "" : ", ") + num(c["center"].get<double>()) + " x" + std::to_string(c["count"].get<int>());
  const json& g = scan["grid"];
  const json& b = scan["bounds"];
  return {scan["starts"] == 100 && scan["clusters"].size() >= 2,
          "100 starts, M = " + std::to_string(g["segments"].get<int>()) + ", dt = " + num(g["dt"].get<double>()) +
              ", u in [" + num(b["u_min"].get<double>()) + ", " + num(b["u_max"].get<double>()) + "], clusters: " + centers};
}

Verdict kraus_search() {
  using namespace fixtures;
  Rng rng(505);
  std::uniform_int_distribution<int> k_dist(1, 3), len(0, 5), coin(0, 1);
  int agree = 0, found = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<ExactChannel> chans;
    const int k = k_dist(rng);
    for (int i = 0; i < k; ++i) chans.push_back(random_channel(rng));
    const ChannelAlphabet alphabet(chans);
    const exact::Matrix rho_i = random_rational_state(rng);
    exact::Matrix rho_f = random_rational_state(rng);
    if (coin(rng)) {
      std::vector<std::size_t> seq(static_cast<std::size_t>(len(rng)));
      for (auto& s : seq) s = static_cast<std::size_t>(std::uniform_int_distribution<int>(0, k - 1)(rng));
      rho_f = apply_sequence(alphabet, seq, rho_i);
    }
    const auto res = bounded_reachability(alphabet, rho_i, rho_f, {5});
    const auto oracle = brute_force(alphabet, rho_i, rho_f, 5);
    const bool same = res.found == oracle.has_value() && (!res.found || (res.sequence == *oracle && res.replay_verified));
    agree += same;
    found += res.found;
  }
  const auto orbit = bounded_reachability(ChannelAlphabet({hadamard_channel()}), m2(re(1), re(0), re(0), re(0)),
                                          m2(re(0), re(0), re(0), re(1)), {6});
  const bool orbit_ok = !orbit.found && orbit.max_depth == 6 && orbit.states_explored == 2;
  return {agree == 50 && orbit_ok,
          "random alphabets agreeing with brute force: " + std::to_string(agree) + "/50 (" + std::to_string(found) +
              " found); Hadamard orbit: " + (orbit.found ? "Found" : "NotFoundUpToDepth(" + std::to_string(orbit.max_depth) + ")") +
              " after " + std::to_string(orbit.states_explored) + " states"};
}

Verdict unreachable_scaling() {
  double size[2] = {0, 0};
  bool pass[2] = {false, false};
  const char* names[2] = {"reachable_gamma_0.1.json", "reachable_gamma_0.01.json"};
  for (int k = 0; k < 2; ++k) {
    const fs::path out = scratch(std::string("reachable_") + std::to_string(k));
    if (run_cli("reachable", config(names[k]), out) != 0) return {false, std::string("reachable run failed for ") + names[k]};
    const json r = json::parse(slurp(out / "report.json"));
    size[k] = r["linear_size"].get<double>();
    pass[k] = r["pass"].get<bool>() && r["sampler"]["samples"] == 100000;
  }
  const double ratio = size[0] / size[1];
  return {pass[0] && pass[1] && ratio >= 10.0 / 3.0 && ratio <= 30.0,
          "linear size " + num(size[0]) + " at gamma/omega = 0.1, " + num(size[1]) + " at 0.01, ratio " + num(ratio)};
}

Verdict reproducibility() {
  const std::vector<std::pair<std::string, std::string>> runs{{"simulate", "simulate_qutrit.json"},
                                                              {"stiefel-max", "stiefel_qutrit.json"},
                                                              {"ingrape", "ingrape_state.json"},
                                                              {"kraus-search", "kraus_damping.json"},
                                                              {"reachable", "reachable_gamma_0.1.json"}};
  std::size_t files = 0;
  std::string mismatch;
  for (const auto& [sub, cfg] : runs) {
    const fs::path a = scratch(sub + "_a"), b = scratch(sub + "_b");
    if (run_cli(sub, config(cfg), a, "1") != 0 || run_cli(sub, config(cfg), b, "1") != 0) return {false, sub + " run failed"};
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      if (slurp(e.path()) != slurp(b / e.path().filename())) mismatch += " " + sub + "/" + e.path().filename().string();
    }
  }
  return {mismatch.empty() && files > runs.size(),
          std::to_string(files) + " files compared across " + std::to_string(runs.size()) + " subcommands" +
              (mismatch.empty() ? ", all identical" : ", differing:" + mismatch)};
}

}  // namespace
}  // namespace oqc

int main() {
  using namespace oqc;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"trace and positivity preservation", physicality},
      {"detailed balance", detailed_balance},
      {"Stiefel gradient and Hessian", stiefel_derivatives},
      {"Stiefel multistart reaches lambda_max", stiefel_multistart},
      {"Cardano eigenvalues", cardano},
      {"Hadamard synthesis", hadamard},
      {"T gate landscape traps", tgate_traps},
      {"exact Kraus search", kraus_search},
      {"unreachable region scaling", unreachable_scaling},
      {"byte-identical reruns", reproducibility}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first << "): " << v.detail
              << std::endl;
  }
  return failures;
}
