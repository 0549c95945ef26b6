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

#include "kraus_fixtures.hpp"

#include <gtest/gtest.h>

namespace oqc {
namespace {

using namespace fixtures;

TEST(Rational, ParsingAndReduction) {
  EXPECT_EQ(exact::parse_rational("2/4"), Rational(1, 2));
  EXPECT_EQ(exact::parse_rational("-3"), Rational(-3));
  EXPECT_EQ(exact::to_string(exact::parse_rational("6/-4")), "-3/2");
  EXPECT_THROW(exact::parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(exact::parse_rational("0.5"), std::invalid_argument);
  EXPECT_THROW(exact::parse_rational(""), std::invalid_argument);
}

TEST(Rational, QuadraticArithmetic) {
  const exact::QuadraticNumber r2(0, 1, 2);
  EXPECT_EQ(r2 * r2, exact::QuadraticNumber(2));
  EXPECT_EQ((r2 * r2).root(), 0);
  EXPECT_THROW(r2 + exact::QuadraticNumber(0, 1, 3), std::invalid_argument);
  EXPECT_NEAR((r2 + exact::QuadraticNumber(Rational(1, 3))).to_double(), std::sqrt(2.0) + 1.0 / 3, 1e-15);
}

TEST(Rational, BigIntegersDoNotOverflow) {
  Rational x(3, 5);
  for (int k = 0; k < 200; ++k) x = x * Rational(3, 5);
  EXPECT_EQ(numerator(x), boost::multiprecision::pow(exact::Integer(3), 201));
  EXPECT_EQ(denominator(x), boost::multiprecision::pow(exact::Integer(5), 201));
}

TEST(ApplyChannelExact, Examples) {
  const Matrix ground = m2(re(1), re(0), re(0), re(0));
  const Matrix excited = m2(re(0), re(0), re(0), re(1));
  EXPECT_EQ(apply_channel_exact(pauli_x_channel(), ground), excited);
  const ExactChannel dephase{"D", {m2(re(1), re(0), re(0), re(0)), m2(re(0), re(0), re(0), re(1))}};
  const Rational h(1, 2);
  EXPECT_EQ(apply_channel_exact(dephase, m2(re(h), re(h), re(h), re(h))), m2(re(h), re(0), re(0), re(h)));
}

TEST(ApplyChannelExact, CompositionMatchesComposedChannel) {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const ExactChannel a = random_channel(rng), b = random_channel(rng);
    ExactChannel ba{"BA", {}};
    for (const auto& kb : b.kraus)
      for (const auto& ka : a.kraus) ba.kraus.push_back(kb * ka);
    for (int s = 0; s < 5; ++s) {
      const Matrix rho = random_rational_state(rng);
      const Matrix lhs = apply_channel_exact(b, apply_channel_exact(a, rho));
      EXPECT_EQ(lhs, apply_channel_exact(ba, rho));
      EXPECT_EQ(lhs.trace(), (Complex{1, 0}));
    }
  }
}

TEST(ApplyChannelExact, RejectsInexactChannels) {
  const ExactChannel bad{"bad", {m2(re(Rational(3, 5)), re(0), re(0), re(1))}};
  EXPECT_THROW(apply_channel_exact(bad, m2(re(1), re(0), re(0), re(0))), ConstraintError);
  EXPECT_THROW(ChannelAlphabet({pauli_x_channel(), bad}), ConstraintError);
  EXPECT_THROW(ChannelAlphabet(std::vector<ExactChannel>{}), std::invalid_argument);
}

TEST(CanonicalKey, Examples) {
  const Matrix a = m2(re(Rational(1, 2)), re(0), re(0), re(Rational(1, 2)));
  const Matrix b = m2(re(Rational(2, 4)), re(0), re(0), re(Rational(2, 4)));
  EXPECT_EQ(canonical_state_key(a), canonical_state_key(b));
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 0) = 0.3;
  x(1, 1) = 0.7;
  CMatrix y = x;
  y(0, 0) += 1e-15;
  y(1, 1) -= 1e-15;
  EXPECT_EQ(canonical_state_key(x, 1e-9), canonical_state_key(y, 1e-9));
  EXPECT_NE(canonical_state_key(m2(re(1), re(0), re(0), re(0))), canonical_state_key(m2(re(0), re(0), re(0), re(1))));
  EXPECT_NE(canonical_state_key(DensityMatrix::basis_state(2, 0).matrix(), 1e-9),
            canonical_state_key(DensityMatrix::basis_state(2, 1).matrix(), 1e-9));
}

TEST(BoundedReachability, Examples) {
  const ChannelAlphabet x({pauli_x_channel()});
  const Matrix ground = m2(re(1), re(0), re(0), re(0));
  const Matrix excited = m2(re(0), re(0), re(0), re(1));
  auto r = bounded_reachability(x, ground, excited, {});
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.sequence, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(r.replay_verified);
  r = bounded_reachability(x, ground, ground, {});
  EXPECT_TRUE(r.found);
  EXPECT_TRUE(r.sequence.empty());
}

TEST(BoundedReachability, HadamardOrbit) {
  const ChannelAlphabet h({hadamard_channel()});
  const Matrix ground = m2(re(1), re(0), re(0), re(0));
  const Matrix excited = m2(re(0), re(0), re(0), re(1));
  const auto r = bounded_reachability(h, ground, excited, {6});
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.max_depth, 6);
  EXPECT_EQ(r.states_explored, 2u);
  const Rational half(1, 2);
  const auto plus = bounded_reachability(h, ground, m2(re(half), re(half), re(half), re(half)), {6});
  ASSERT_TRUE(plus.found);
  EXPECT_EQ(plus.sequence.size(), 1u);
}

TEST(BoundedReachability, MatchesBruteForceOnRandomAlphabets) {
  Rng rng(42);
  std::uniform_int_distribution<int> k_dist(1, 3), len(0, 4), coin(0, 1);
  int found = 0;
  for (int t = 0; t < 30; ++t) {
    std::vector<ExactChannel> chans;
    const int k = k_dist(rng);
    for (int i = 0; i < k; ++i) chans.push_back(random_channel(rng));
    const ChannelAlphabet alphabet(chans);
    const Matrix rho_i = random_rational_state(rng);
    Matrix rho_f = random_rational_state(rng);
    if (coin(rng)) {
      std::vector<std::size_t> seq(static_cast<std::size_t>(len(rng)));
      for (auto& s : seq) s = static_cast<std::size_t>(std::uniform_int_distribution<int>(0, k - 1)(rng));
      rho_f = apply_sequence(alphabet, seq, rho_i);
    }
    const auto res = bounded_reachability(alphabet, rho_i, rho_f, {5});
    const auto oracle = brute_force(alphabet, rho_i, rho_f, 5);
    ASSERT_EQ(res.found, oracle.has_value());
    if (res.found) {
      ++found;
      EXPECT_EQ(res.sequence, *oracle);
      EXPECT_TRUE(res.replay_verified);
      EXPECT_EQ(apply_sequence(alphabet, res.sequence, rho_i), rho_f);
    }
  }
  EXPECT_GT(found, 5);
}

TEST(BoundedReachability, Monotonicity) {
  const ChannelAlphabet alphabet({damping_channel(Rational(3, 5), Rational(4, 5)), pauli_x_channel()});
  const Matrix rho_i = m2(re(0), re(0), re(0), re(1));
  const Matrix rho_f = m2(re(Rational(1, 3)), re(0), re(0), re(Rational(2, 3)));
  for (int depth = 6; depth >= 0; --depth) EXPECT_FALSE(bounded_reachability(alphabet, rho_i, rho_f, {depth}).found);
}

TEST(BoundedReachability, BudgetAndInputErrors) {
  const ChannelAlphabet alphabet({damping_channel(Rational(3, 5), Rational(4, 5)), rotation_channel(Rational(3, 5), Rational(4, 5))});
  const Matrix rho_i = m2(re(0), re(0), re(0), re(1));
  const Matrix rho_f = m2(re(Rational(1, 3)), re(0), re(0), re(Rational(2, 3)));
  try {
    bounded_reachability(alphabet, rho_i, rho_f, {10, 20});
    FAIL() << "budget not enforced";
  } catch (const SearchBudgetExceeded& e) {
    EXPECT_EQ(e.visited, 20u);
    EXPECT_GT(e.depth, 0);
  }
  EXPECT_THROW(bounded_reachability(alphabet, rho_i, rho_f, {-1}), std::invalid_argument);
  EXPECT_THROW(bounded_reachability(alphabet, m2(re(1), re(0), re(0), re(1)), rho_f, {}), ConstraintError);
  Matrix three(3, 3);
  EXPECT_THROW(bounded_reachability(alphabet, three, rho_f, {}), DimensionError);
}

TEST(BoundedReachability, FloatMode) {
  const ChannelAlphabet h({hadamard_channel()});
  const CMatrix ground = DensityMatrix::basis_state(2, 0).matrix();
  CMatrix plus = CMatrix::Constant(2, 2, 0.5);
  auto r = bounded_reachability(h, ground, plus, {6}, 1e-9);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.sequence.size(), 1u);
  EXPECT_TRUE(r.replay_verified);
  r = bounded_reachability(h, ground, DensityMatrix::basis_state(2, 1).matrix(), {6}, 1e-9);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.states_explored, 2u);
  EXPECT_THROW(bounded_reachability(h, ground, plus, {6}, 0.0), std::invalid_argument);
  EXPECT_THROW(bounded_reachability(std::vector<KrausSet>{KrausSet({1.1 * CMatrix::Identity(2, 2)})}, ground, plus, {}, 1e-9),
               ConstraintError);
}

TEST(BoundedReachability, FloatAgreesWithExact) {
  Rng rng(7);
  for (int t = 0; t < 15; ++t) {
    std::vector<ExactChannel> chans{random_channel(rng), random_channel(rng)};
    const ChannelAlphabet alphabet(chans);
    const Matrix rho_i = random_rational_state(rng);
    const Matrix rho_f = apply_sequence(alphabet, {1, 0, 1}, rho_i);
    const auto ex = bounded_reachability(alphabet, rho_i, rho_f, {4});
    const auto fl = bounded_reachability(alphabet, rho_i.to_double(), rho_f.to_double(), {4}, 1e-9);
    ASSERT_TRUE(ex.found);
    ASSERT_TRUE(fl.found);
    EXPECT_EQ(ex.sequence.size(), fl.sequence.size());
    EXPECT_TRUE(fl.replay_verified);
  }
}

}  // namespace
}  // namespace oqc
