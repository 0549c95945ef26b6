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
#include "oqc/lindblad.hpp"
#include "oqc/parallel.hpp"
#include "oqc/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oqc {

struct SamplerConfig {
  double omega = 1.0;
  double mu = 1.0;
  double gamma = 0.01;
  double u_max = 10.0;
  double n_max = 1.0;
  int min_segments = 1;
  int max_segments = 20;
  // per-segment durations are log-uniform over [min_duration, max_duration] / omega
  double min_duration = 0.01;
  double max_duration = 10.0;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int resolution = 8;
  int polar_bins = 8;
  int azimuth_bins = 16;
  std::size_t workers = 1;
  // also emit the state at every intermediate segment boundary (each prefix is itself an
  // admissible schedule)
  bool record_prefixes = true;

  void validate() const {
    if (!(omega > 0.0) || !(mu > 0.0) || !(gamma >= 0.0)) throw std::invalid_argument("sampler: omega, mu must be positive, gamma nonnegative");
    if (!(u_max >= 0.0) || !(n_max >= 0.0)) throw std::invalid_argument("sampler: control bounds must be nonnegative");
    if (min_segments < 1 || max_segments < min_segments) throw std::invalid_argument("sampler: bad segment range");
    if (!(min_duration >= 0.0) || max_duration < min_duration) throw std::invalid_argument("sampler: bad duration range");
    if (max_duration > 0.0 && !(min_duration > 0.0)) throw std::invalid_argument("sampler: log-uniform durations need min_duration > 0");
    if (samples < 1) throw std::invalid_argument("sampler: samples must be >= 1");
    if (polar_bins < 1 || azimuth_bins < 1) throw std::invalid_argument("sampler: angular bins must be >= 1");
  }
};

/// Bloch vectors reached by `cfg.samples` random admissible schedules started from rho0: the final
/// state of each schedule, preceded by its intermediate boundary states when record_prefixes is set.
/// Sample k draws its schedule from derive_seed(cfg.seed, k), so the cloud is independent of `workers`.
inline std::vector<BlochVector> sample_reachable(const SamplerConfig& cfg, const DensityMatrix& rho0) {
  cfg.validate();
  if (rho0.dim() != 2) throw DimensionError("sample_reachable requires a qubit state");
  const Eigen::Vector3d r0 = bloch_components(rho0.matrix());
  const SystemModel sys = SystemModel::qubit(cfg.omega, cfg.mu);
  std::vector<std::vector<BlochVector>> per_sample(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t k) {
    Rng rng(derive_seed(cfg.seed, k));
    std::uniform_int_distribution<int> segs(cfg.min_segments, cfg.max_segments);
    std::uniform_real_distribution<double> uu(-cfg.u_max, cfg.u_max);
    std::uniform_real_distribution<double> nn(0.0, cfg.n_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::Vector3d r = r0;
    const int count = segs(rng);
    for (int m = 0; m < count; ++m) {
      const double u = uu(rng);
      const double n = nn(rng);
      const double w = unit(rng);
      if (cfg.max_duration == 0.0) continue;
      const double dt =
          cfg.min_duration * std::pow(cfg.max_duration / cfg.min_duration, w) / cfg.omega;
      r = propagate_bloch(detail::bloch_generator_unchecked(sys, cfg.gamma, u, n), r, dt);
      if (cfg.record_prefixes && m + 1 < count) per_sample[k].push_back(BlochVector::from(r));
    }
    per_sample[k].push_back(BlochVector::from(r));
  });
  std::vector<BlochVector> points;
  for (auto& v : per_sample) points.insert(points.end(), v.begin(), v.end());
  return points;
}

/// Voxel occupancy of [-1,1]^3 restricted to cells whose center lies in the unit ball, plus a
/// radial envelope: the largest |r| seen in each equal-area angular bin (uniform in cos(theta)
/// and in azimuth).
struct CoverageGrid {
  int resolution = 0;
  std::vector<std::uint64_t> counts;  // resolution^3, x-major
  std::size_t total_in_ball = 0;
  std::size_t occupied = 0;
  std::size_t occupied_first_half = 0;  // occupancy built from the first half of the points
  int polar_bins = 0;
  int azimuth_bins = 0;
  std::vector<double> envelope;  // max radius per angular bin, -1 when empty
  std::size_t points = 0;

  double occupancy_fraction() const { return total_in_ball ? double(occupied) / double(total_in_ball) : 0.0; }
  double half_occupancy_fraction() const {
    return total_in_ball ? double(occupied_first_half) / double(total_in_ball) : 0.0;
  }
  /// Relative occupancy change from half to all points.
  double occupancy_change() const {
    return occupied ? double(occupied - occupied_first_half) / double(occupied) : 1.0;
  }
  bool converged(double threshold = 0.005) const { return occupancy_change() < threshold; }
};

namespace detail {

inline double cell_center(int i, int res) { return -1.0 + (2.0 * i + 1.0) / res; }

inline int cell_index(double x, int res) { return std::clamp(static_cast<int>(std::floor((x + 1.0) / 2.0 * res)), 0, res - 1); }

inline int angular_bin(const Eigen::Vector3d& r, int polar, int azimuth) {
  const double norm = r.norm();
  if (norm == 0.0) return 0;
  const double c = std::clamp(r.z() / norm, -1.0, 1.0);
  const int pb = std::clamp(static_cast<int>(std::floor((c + 1.0) / 2.0 * polar)), 0, polar - 1);
  double phi = std::atan2(r.y(), r.x());
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  const int ab = std::clamp(static_cast<int>(std::floor(phi / (2.0 * std::numbers::pi) * azimuth)), 0, azimuth - 1);
  return pb * azimuth + ab;
}

}  // namespace detail

inline CoverageGrid coverage_map(const std::vector<BlochVector>& points, int resolution, int polar_bins = 8,
                                 int azimuth_bins = 16) {
  if (points.empty()) throw std::invalid_argument("coverage_map: no points");
  if (resolution < 2) throw std::invalid_argument("coverage_map: resolution must be >= 2");
  CoverageGrid g;
  g.resolution = resolution;
  g.points = points.size();
  const std::size_t res = static_cast<std::size_t>(resolution);
  g.counts.assign(res * res * res, 0);
  std::vector<char> in_ball(g.counts.size(), 0);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < resolution; ++k) {
        const double x = detail::cell_center(i, resolution), y = detail::cell_center(j, resolution),
                     z = detail::cell_center(k, resolution);
        if (x * x + y * y + z * z <= 1.0) {
          in_ball[(static_cast<std::size_t>(i) * res + static_cast<std::size_t>(j)) * res + static_cast<std::size_t>(k)] = 1;
          ++g.total_in_ball;
        }
      }
  g.polar_bins = polar_bins;
  g.azimuth_bins = azimuth_bins;
  g.envelope.assign(static_cast<std::size_t>(polar_bins * azimuth_bins), -1.0);
  const std::size_t half = points.size() / 2;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& pt = points[p];
    const std::size_t idx = (static_cast<std::size_t>(detail::cell_index(pt.x, resolution)) * res +
                             static_cast<std::size_t>(detail::cell_index(pt.y, resolution))) * res +
                            static_cast<std::size_t>(detail::cell_index(pt.z, resolution));
    if (g.counts[idx]++ == 0 && in_ball[idx]) {
      ++g.occupied;
      if (p < half) ++g.occupied_first_half;
    }
    auto& env = g.envelope[static_cast<std::size_t>(detail::angular_bin(pt.vector(), polar_bins, azimuth_bins))];
    env = std::max(env, pt.norm());
  }
  return g;
}

struct UnreachableReport {
  double gamma = 0.0;
  double omega = 0.0;
  double bound = 0.0;  // delta * gamma / omega with delta = 1
  double delta = 1.0;
  double slack = 3.0;
  double quantile = 0.9;
  double occupancy_fraction = 0.0;
  double unreachable_volume_fraction = 0.0;
  double volume_size_proxy = 0.0;  // cube root of the unreachable volume fraction
  double linear_size = 0.0;        // quantile of the shell depth 1 - max|r| over angular bins
  double mean_depth = 0.0;
  std::size_t empty_bins = 0;
  bool converged = false;
  bool pass = false;
};

struct UnreachableOptions {
  double slack = 3.0;
  double quantile = 0.9;
  double convergence_threshold = 0.005;
  double numerical_floor = 1e-9;
};

/// Compares the empirical unreachable region against delta * gamma / omega (delta = 1).
/// The gap is a thin shell under the sphere, so its linear size is measured as the depth of the
/// shell (1 - envelope radius); the cube root of the voxel volume fraction is reported too.
inline UnreachableReport unreachable_report(const CoverageGrid& grid, double gamma, double omega,
                                            const UnreachableOptions& opt = {}) {
  if (!(omega > 0.0) || !(gamma >= 0.0)) throw std::invalid_argument("unreachable_report: bad gamma/omega");
  if (!grid.converged(opt.convergence_threshold))
    throw NumericalError("unreachable_report: coverage not converged (occupancy change " +
                         std::to_string(grid.occupancy_change()) + ")");
  UnreachableReport r;
  r.gamma = gamma;
  r.omega = omega;
  r.bound = r.delta * gamma / omega;
  r.slack = opt.slack;
  r.quantile = opt.quantile;
  r.occupancy_fraction = grid.occupancy_fraction();
  r.unreachable_volume_fraction = 1.0 - r.occupancy_fraction;
  r.volume_size_proxy = std::cbrt(r.unreachable_volume_fraction);
  std::vector<double> depth;
  for (double e : grid.envelope) {
    if (e < 0.0) {
      ++r.empty_bins;
      depth.push_back(1.0);
    } else {
      depth.push_back(std::max(0.0, 1.0 - e));
    }
  }
  double sum = 0.0;
  for (double d : depth) sum += d;
  r.mean_depth = sum / static_cast<double>(depth.size());
  std::sort(depth.begin(), depth.end());
  const std::size_t qi = std::min(depth.size() - 1, static_cast<std::size_t>(std::floor(opt.quantile * (depth.size() - 1))));
  r.linear_size = depth[qi];
  r.converged = true;
  r.pass = r.linear_size <= opt.slack * r.bound + opt.numerical_floor;
  return r;
}

}  // namespace oqc
