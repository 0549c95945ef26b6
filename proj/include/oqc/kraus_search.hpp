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

// Bounded search for a channel sequence steering one state to another.
//
// Whether *some* finite sequence from a finite alphabet of Kraus maps takes rho_i to rho_f is
// undecidable in general (no Turing machine answers it for every instance, even for purely
// unitary alphabets). This module therefore only offers a semi-decision: a breadth-first search
// up to a depth limit that either returns a certificate or reports that nothing was found up to
// that depth. It never claims a target is unreachable.

#include "oqc/core.hpp"
#include "oqc/exact.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace oqc {

struct ExactChannel {
  std::string name;
  std::vector<exact::Matrix> kraus;

  Index dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
  bool is_unitary() const { return kraus.size() == 1; }

  bool is_trace_preserving() const {
    const Index n = dim();
    exact::Matrix acc(n, n);
    for (const auto& k : kraus) acc = acc + k.adjoint() * k;
    return acc == exact::Matrix::identity(n);
  }

  KrausSet to_float() const {
    std::vector<CMatrix> ops;
    for (const auto& k : kraus) ops.push_back(k.to_double());
    return KrausSet(std::move(ops));
  }
};

/// Finite family of channels over a common dimension, each exactly trace preserving.
class ChannelAlphabet {
 public:
  ChannelAlphabet() = default;
  explicit ChannelAlphabet(std::vector<ExactChannel> channels) : channels_(std::move(channels)) {
    if (channels_.empty()) throw std::invalid_argument("channel alphabet must be nonempty");
    const Index n = channels_.front().dim();
    for (const auto& c : channels_) {
      if (c.kraus.empty()) throw std::invalid_argument("channel '" + c.name + "' has no Kraus operators");
      for (const auto& k : c.kraus)
        if (k.rows() != n || k.cols() != n) throw DimensionError("channel '" + c.name + "' has wrong dimension");
      if (!c.is_trace_preserving())
        throw ConstraintError("channel '" + c.name + "' is not exactly trace preserving");
    }
  }

  const std::vector<ExactChannel>& channels() const { return channels_; }
  std::size_t size() const { return channels_.size(); }
  Index dim() const { return channels_.front().dim(); }

 private:
  std::vector<ExactChannel> channels_;
};

/// Exact sum_i K_i rho K_i^dagger.
inline exact::Matrix apply_channel_exact(const ExactChannel& phi, const exact::Matrix& rho) {
  if (phi.dim() != rho.rows() || rho.rows() != rho.cols()) throw DimensionError("apply_channel_exact: dimension mismatch");
  if (!phi.is_trace_preserving()) throw ConstraintError("apply_channel_exact: channel is not exactly trace preserving");
  exact::Matrix out(rho.rows(), rho.cols());
  for (const auto& k : phi.kraus) out = out + k * rho * k.adjoint();
  return out;
}

enum class SearchMode { exact, floating };

/// Exact mode: the reduced entry tuple. Float mode: entries rounded to a grid of width tol/10;
/// distinct states may collide, which only prunes the search.
inline std::string canonical_state_key(const exact::Matrix& rho) { return rho.key(); }

inline std::string canonical_state_key(const CMatrix& rho, double tol) {
  const double cell = tol / 10.0;
  std::string k = std::to_string(rho.rows()) + ":";
  for (Index i = 0; i < rho.rows(); ++i)
    for (Index j = 0; j < rho.cols(); ++j) {
      k += std::to_string(std::llround(rho(i, j).real() / cell)) + "," +
           std::to_string(std::llround(rho(i, j).imag() / cell)) + ";";
    }
  return k;
}

struct SearchOutcome {
  bool found = false;
  std::vector<std::size_t> sequence;  // i_1 .. i_M, i_1 applied first
  int max_depth = 0;
  std::size_t states_explored = 0;   // distinct states visited, including rho_i
  std::size_t peak_frontier = 0;
  bool replay_verified = false;
};

class SearchBudgetExceeded : public std::runtime_error {
 public:
  SearchBudgetExceeded(int depth, std::size_t frontier, std::size_t visited)
      : std::runtime_error("kraus search exceeded its state budget at depth " + std::to_string(depth) +
                           " (frontier " + std::to_string(frontier) + ", visited " + std::to_string(visited) + ")"),
        depth(depth),
        frontier(frontier),
        visited(visited) {}
  int depth;
  std::size_t frontier;
  std::size_t visited;
};

struct SearchLimits {
  int max_depth = 6;
  std::size_t max_states = 1'000'000;
};

namespace detail {

struct ExactPolicy {
  const ChannelAlphabet& alphabet;
  const exact::Matrix& target;
  using State = exact::Matrix;
  State apply(std::size_t k, const State& s) const {
    exact::Matrix out(s.rows(), s.cols());
    for (const auto& op : alphabet.channels()[k].kraus) out = out + op * s * op.adjoint();
    return out;
  }
  std::string key(const State& s) const { return canonical_state_key(s); }
  bool matches(const State& s) const { return s == target; }
};

struct FloatPolicy {
  const std::vector<KrausSet>& channels;
  const CMatrix& target;
  double tol;
  using State = CMatrix;
  State apply(std::size_t k, const State& s) const {
    CMatrix out = CMatrix::Zero(s.rows(), s.cols());
    for (const auto& op : channels[k].operators()) out += op * s * op.adjoint();
    return out;
  }
  std::string key(const State& s) const { return canonical_state_key(s, tol); }
  bool matches(const State& s) const { return max_abs_diff(s, target) <= tol; }
};

// Level-by-level BFS. Parents are expanded in the order they were discovered and children by
// ascending alphabet index, so the first match is a shortest, lexicographically smallest sequence.
template <typename Policy>
SearchOutcome breadth_first(const Policy& policy, std::size_t alphabet_size, const typename Policy::State& start,
                            const SearchLimits& limits) {
  if (limits.max_depth < 0) throw std::invalid_argument("max_depth must be nonnegative");
  struct Node {
    typename Policy::State state;
    std::ptrdiff_t parent;
    std::size_t via;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::string, std::size_t> visited;
  SearchOutcome out;
  out.max_depth = limits.max_depth;

  auto certificate = [&](std::size_t idx) {
    std::vector<std::size_t> seq;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(idx); nodes[static_cast<std::size_t>(i)].parent >= 0;
         i = nodes[static_cast<std::size_t>(i)].parent)
      seq.push_back(nodes[static_cast<std::size_t>(i)].via);
    return std::vector<std::size_t>(seq.rbegin(), seq.rend());
  };
  auto replay = [&](const std::vector<std::size_t>& seq) {
    typename Policy::State s = start;
    for (std::size_t k : seq) s = policy.apply(k, s);
    return policy.matches(s);
  };

  nodes.push_back({start, -1, 0});
  visited.emplace(policy.key(start), 0);
  if (policy.matches(start)) {
    out.found = true;
    out.states_explored = 1;
    out.peak_frontier = 1;
    out.replay_verified = replay({});
    return out;
  }
  std::vector<std::size_t> frontier{0};
  out.peak_frontier = 1;
  for (int depth = 1; depth <= limits.max_depth && !frontier.empty(); ++depth) {
    std::vector<std::size_t> next;
    for (std::size_t parent : frontier) {
      for (std::size_t k = 0; k < alphabet_size; ++k) {
        auto child = policy.apply(k, nodes[parent].state);
        auto key = policy.key(child);
        if (visited.count(key)) continue;
        if (nodes.size() >= limits.max_states) throw SearchBudgetExceeded(depth, next.size(), nodes.size());
        const bool hit = policy.matches(child);
        nodes.push_back({std::move(child), static_cast<std::ptrdiff_t>(parent), k});
        visited.emplace(std::move(key), nodes.size() - 1);
        if (hit) {
          out.found = true;
          out.sequence = certificate(nodes.size() - 1);
          out.states_explored = nodes.size();
          out.replay_verified = replay(out.sequence);
          return out;
        }
        next.push_back(nodes.size() - 1);
      }
    }
    out.peak_frontier = std::max(out.peak_frontier, next.size());
    frontier = std::move(next);
  }
  out.states_explored = nodes.size();
  return out;
}

}  // namespace detail

/// Exact-arithmetic search. Found certificates are replayed before returning.
inline SearchOutcome bounded_reachability(const ChannelAlphabet& alphabet, const exact::Matrix& rho_i,
                                          const exact::Matrix& rho_f, const SearchLimits& limits) {
  if (rho_i.rows() != alphabet.dim() || rho_f.rows() != alphabet.dim()) throw DimensionError("state dimension mismatch");
  if (!(rho_i.trace() == exact::Complex{1, 0})) throw ConstraintError("initial state does not have unit trace");
  detail::ExactPolicy policy{alphabet, rho_f};
  return detail::breadth_first(policy, alphabet.size(), rho_i, limits);
}

/// Floating-point search: matches within tol (max-abs entry distance), visited states keyed on a tol/10 grid.
inline SearchOutcome bounded_reachability(const std::vector<KrausSet>& alphabet, const CMatrix& rho_i,
                                          const CMatrix& rho_f, const SearchLimits& limits, double tol) {
  if (alphabet.empty()) throw std::invalid_argument("channel alphabet must be nonempty");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  for (const auto& k : alphabet) {
    if (k.dim() != rho_i.rows() || rho_f.rows() != rho_i.rows()) throw DimensionError("state dimension mismatch");
    if (kraus_constraint_residual(k) > kStructuralTol) throw ConstraintError("alphabet channel is not trace preserving");
  }
  detail::FloatPolicy policy{alphabet, rho_f, tol};
  return detail::breadth_first(policy, alphabet.size(), rho_i, limits);
}

/// Float-mode search on an exact alphabet.
inline SearchOutcome bounded_reachability(const ChannelAlphabet& alphabet, const CMatrix& rho_i, const CMatrix& rho_f,
                                          const SearchLimits& limits, double tol) {
  std::vector<KrausSet> channels;
  for (const auto& c : alphabet.channels()) channels.push_back(c.to_float());
  return bounded_reachability(channels, rho_i, rho_f, limits, tol);
}

}  // namespace oqc
