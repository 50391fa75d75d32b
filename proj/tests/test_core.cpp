// Copyright 2026 optmct Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "optmct/event.hpp"
#include "optmct/test.hpp"

namespace {

using namespace optmct;
using OTest = optmct::Test;

// Independent product oracle: plain per-entry sum, no skipping or reordering.
RatMatrix naive_product(const RatMatrix &a, const RatMatrix &b) {
  RatMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Rat acc(0);
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a.at(i, k) * b.at(k, j);
      out.at(i, j) = acc;
    }
  return out;
}

// Independent Kronecker oracle via the index formula
// K[(i1,i2),(j1,j2)] = A[i1,j1] * B[i2,j2].
RatMatrix kron_oracle(const RatMatrix &a, const RatMatrix &b) {
  RatMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      out.at(r, c) = a.at(r / b.rows(), c / b.cols()) * b.at(r % b.rows(), c % b.cols());
  return out;
}

RatMatrix random_substochastic(std::mt19937_64 &rng, std::size_t rows, std::size_t cols) {
  RatMatrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    // Split a total below 1 across the column on a denominator-12 grid.
    std::vector<long> nums(rows);
    long total = 0;
    for (auto &n : nums) {
      n = static_cast<long>(rng() % 4);
      total += n;
    }
    long den = std::max<long>(12, total);
    for (std::size_t r = 0; r < rows; ++r) m.at(r, c) = make_rat(nums[r], den);
  }
  return m;
}

TEST(SystemTypeTest, MixedRadixBijection) {
  SystemType s({2, 3, 2});
  EXPECT_EQ(s.dim(), 12u);
  for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_EQ(s.index_of(s.digits_of(i)), i);
  // Leftmost factor most significant: digits (1,0,0) -> 6.
  EXPECT_EQ(s.index_of({1, 0, 0}), 6u);
  EXPECT_EQ(s.index_of({0, 2, 1}), 5u);
}

TEST(SystemTypeTest, TrivialSystem) {
  SystemType t = SystemType::trivial();
  EXPECT_EQ(t.dim(), 1u);
  EXPECT_TRUE(t.is_trivial());
  EXPECT_NE(SystemType({1}), t);  // one factor of dim 1 is a distinct type
  EXPECT_EQ(SystemType({2}).tensor(SystemType({3})), SystemType({2, 3}));
}

TEST(ComposeSeqTest, IdentityThenIdentity) {
  OTest id2 = identity_test(SystemType({2}));
  OTest c = compose_seq(id2, id2);
  ASSERT_EQ(c.outcome_count(), 1u);
  EXPECT_EQ(c.label(0), "*.*");
  EXPECT_EQ(c.event(0), RatMatrix::identity(2));
}

TEST(ComposeSeqTest, VertexDiscrimination) {
  SystemType d2({2});
  OTest prep = preparation_test(d2, {{"p", vertex_state(d2, 0)}});
  OTest obs = observation_test(d2, {{"y0", vertex_effect(d2, 0)}, {"y1", vertex_effect(d2, 1)}});
  OTest c = compose_seq(prep, obs);
  ASSERT_EQ(c.outcome_count(), 2u);
  EXPECT_EQ(c.label(0), "p.y0");
  EXPECT_EQ(c.event(0).at(0, 0), 1);
  EXPECT_EQ(c.event(1).at(0, 0), 0);
}

TEST(ComposeSeqTest, TypeMismatchNamesBothSystems) {
  OTest id2 = identity_test(SystemType({2}));
  OTest id3 = identity_test(SystemType({3}));
  try {
    compose_seq(id2, id3);
    FAIL() << "expected TypeError";
  } catch (const TypeError &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("[2]"), std::string::npos);
    EXPECT_NE(msg.find("[3]"), std::string::npos);
  }
}

TEST(ComposeSeqTest, MatchesNaiveProductOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t da = 2 + rng() % 3, db = 2 + rng() % 3, dc = 2 + rng() % 3;
    RatMatrix f = random_substochastic(rng, db, da);
    RatMatrix g = random_substochastic(rng, dc, db);
    EXPECT_EQ(g * f, naive_product(g, f));
  }
}

TEST(ComposeParTest, IdentityTimesIdentity) {
  OTest c = compose_par(identity_test(SystemType({2})), identity_test(SystemType({3})));
  EXPECT_EQ(c.in(), SystemType({2, 3}));
  EXPECT_EQ(c.event(0), RatMatrix::identity(6));
}

TEST(ComposeParTest, VertexIndexing) {
  SystemType d2({2});
  OTest p0 = preparation_test(d2, {{"a", vertex_state(d2, 0)}});
  OTest p1 = preparation_test(d2, {{"b", vertex_state(d2, 1)}});
  OTest c = compose_par(p0, p1);
  // |0> beside |1> is vertex (0,1) -> flat index 1 of the dim-4 composite.
  ASSERT_EQ(c.out(), SystemType({2, 2}));
  for (std::size_t r = 0; r < 4; ++r)
    EXPECT_EQ(c.event(0).at(r, 0), r == 1 ? 1 : 0);
}

TEST(ComposeParTest, MatchesKroneckerOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    RatMatrix a = random_substochastic(rng, 2 + rng() % 2, 2 + rng() % 2);
    RatMatrix b = random_substochastic(rng, 2 + rng() % 3, 2 + rng() % 2);
    EXPECT_EQ(a.kron(b), kron_oracle(a, b));
  }
}

TEST(ComposeParTest, TrivialIdentityIsStrictNoOp) {
  OTest id2 = identity_test(SystemType({2}));
  OTest trivial = identity_test(SystemType::trivial());
  EXPECT_EQ(compose_par(id2, trivial), id2);
  EXPECT_EQ(compose_par(trivial, id2), id2);
}

TEST(CoarseGrainTest, SingleBlockMergesToIdentity) {
  SystemType d2({2});
  OTest t(d2, d2,
         {{"x0", RatMatrix::identity(2).scaled(make_rat(3, 10))},
          {"x1", RatMatrix::identity(2).scaled(make_rat(7, 10))}});
  OTest merged = coarse_grain(t, {{"all", {"x0", "x1"}}});
  ASSERT_EQ(merged.outcome_count(), 1u);
  EXPECT_EQ(merged.event(0), RatMatrix::identity(2));
}

TEST(CoarseGrainTest, ObservationBlocks) {
  SystemType d3({3});
  OTest obs = observation_test(d3, {{"0", vertex_effect(d3, 0)},
                                   {"1", vertex_effect(d3, 1)},
                                   {"2", vertex_effect(d3, 2)}});
  OTest merged = coarse_grain(obs, {{"01", {"0", "1"}}, {"2", {"2"}}});
  EXPECT_EQ(merged.event(0).at(0, 0), 1);
  EXPECT_EQ(merged.event(0).at(0, 1), 1);
  EXPECT_EQ(merged.event(0).at(0, 2), 0);
  EXPECT_EQ(merged.event(1).at(0, 2), 1);
}

TEST(CoarseGrainTest, MatchesEntrywiseSummationOracle) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    SystemType d2({2});
    // Random 4-outcome test: split each column of a stochastic matrix.
    std::vector<RatMatrix> parts(4, RatMatrix(2, 2));
    for (std::size_t c = 0; c < 2; ++c) {
      long n0 = static_cast<long>(rng() % 5), n1 = static_cast<long>(rng() % 5),
           n2 = static_cast<long>(rng() % 5);
      long rest = 12 - (n0 % 12) - 0;
      (void)rest;
      std::vector<long> nums = {n0 % 4, n1 % 4, n2 % 4, 0};
      long sum = nums[0] + nums[1] + nums[2];
      nums[3] = 12 - sum;
      for (int k = 0; k < 4; ++k) parts[k].at(rng() % 2, c) = make_rat(nums[k], 12);
    }
    RatMatrix total(2, 2);
    for (const auto &p : parts) total = total + p;
    bool stochastic = true;
    for (std::size_t c = 0; c < 2; ++c)
      if (total.col_sum(c) != 1) stochastic = false;
    if (!stochastic) continue;
    OTest t(d2, d2, {{"a", parts[0]}, {"b", parts[1]}, {"c", parts[2]}, {"d", parts[3]}});
    OTest merged = coarse_grain(t, {{"ab", {"a", "b"}}, {"cd", {"c", "d"}}});
    // Oracle: accumulate entry by entry.
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) {
        EXPECT_EQ(merged.event(0).at(r, c), parts[0].at(r, c) + parts[1].at(r, c));
        EXPECT_EQ(merged.event(1).at(r, c), parts[2].at(r, c) + parts[3].at(r, c));
      }
  }
}

TEST(CoarseGrainTest, RejectsBadPartitions) {
  SystemType d2({2});
  OTest obs = observation_test(d2, {{"0", vertex_effect(d2, 0)}, {"1", vertex_effect(d2, 1)}});
  EXPECT_THROW(coarse_grain(obs, {{"a", {"0"}}}), std::invalid_argument);
  EXPECT_THROW(coarse_grain(obs, {{"a", {"0", "0"}}, {"b", {"1"}}}), std::invalid_argument);
  EXPECT_THROW(coarse_grain(obs, {{"a", {"0", "zzz"}}, {"b", {"1"}}}), std::invalid_argument);
}

TEST(ProbabilityTest, VertexAndUniform) {
  SystemType d2({2});
  OTest id2 = identity_test(d2);
  OTest obs = observation_test(d2, {{"0", vertex_effect(d2, 0)}, {"1", vertex_effect(d2, 1)}});
  auto p = probability(vertex_state(d2, 0), id2, obs);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].second, 1);
  EXPECT_EQ(p[1].second, 0);

  StateVector uniform(d2, {make_rat(1, 2), make_rat(1, 2)});
  auto q = probability(uniform, id2, obs);
  EXPECT_EQ(q[0].second, make_rat(1, 2));
  EXPECT_EQ(q[1].second, make_rat(1, 2));
}

TEST(ValidateTest, ObservationValidity) {
  SystemType d2({2});
  OTest good = observation_test(d2, {{"0", vertex_effect(d2, 0)}, {"1", vertex_effect(d2, 1)}});
  EXPECT_TRUE(validate(good).valid);

  OTest bad = OTest::make_unchecked(d2, SystemType::trivial(),
                                  {{"0", vertex_effect(d2, 0).as_row()}});
  auto report = validate(bad);
  EXPECT_FALSE(report.valid);
  ASSERT_FALSE(report.violations.empty());
}

TEST(ValidateTest, RangeViolationNamesLocation) {
  SystemType d2({2});
  RatMatrix row(1, 2);
  row.at(0, 0) = make_rat(3, 2);
  row.at(0, 1) = make_rat(-1, 2);
  OTest bad = OTest::make_unchecked(d2, SystemType::trivial(), {{"e", row}});
  auto report = validate(bad);
  EXPECT_FALSE(report.valid);
  bool found_range = false, found_negative = false;
  for (const auto &v : report.violations) {
    if (v.find("sums above 1") != std::string::npos) found_range = true;
    if (v.find("negative entry") != std::string::npos) found_negative = true;
  }
  EXPECT_TRUE(found_range);
  EXPECT_TRUE(found_negative);
}

TEST(EffectTest, DeterministicEffectAndVertices) {
  SystemType d3({3});
  EffectVector u = deterministic_effect(d3);
  for (const auto &x : u.v) EXPECT_EQ(x, 1);

  EffectVector u1 = deterministic_effect(SystemType::trivial());
  ASSERT_EQ(u1.v.size(), 1u);
  EXPECT_EQ(u1.v[0], 1);

  SystemType d4({4});
  std::vector<Rat> acc(4, Rat(0));
  for (std::size_t j = 0; j < 4; ++j) {
    auto e = vertex_effect(d4, j);
    for (std::size_t k = 0; k < 4; ++k) acc[k] += e.v[k];
  }
  EXPECT_EQ(acc, deterministic_effect(d4).v);

  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      RatMatrix p = vertex_effect(d3, i).as_row() * vertex_state(d3, j).as_column();
      EXPECT_EQ(p.at(0, 0), i == j ? 1 : 0);
    }
}

TEST(InvariantTest, CompositionAssociativityAndInterchange) {
  std::mt19937_64 rng(14);
  SystemType d2({2});
  auto random_two_outcome = [&](const SystemType &sys) {
    std::size_t d = sys.dim();
    RatMatrix a(d, d), b(d, d);
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<long> nums(2 * d);
      long sum = 0;
      for (auto &n : nums) {
        n = static_cast<long>(rng() % 5);
        sum += n;
      }
      if (sum == 0) {
        nums[0] = 1;
        sum = 1;
      }
      for (std::size_t r = 0; r < d; ++r) {
        a.at(r, c) = make_rat(nums[r], sum);
        b.at(r, c) = make_rat(nums[d + r], sum);
      }
    }
    return OTest(sys, sys, {{"x", a}, {"y", b}});
  };
  for (int trial = 0; trial < 20; ++trial) {
    OTest t1 = random_two_outcome(d2), t2 = random_two_outcome(d2), t3 = random_two_outcome(d2);
    // Associativity: labels re-associate but matrices match per flattened index.
    OTest left = compose_seq(compose_seq(t1, t2), t3);
    OTest right = compose_seq(t1, compose_seq(t2, t3));
    ASSERT_EQ(left.outcome_count(), right.outcome_count());
    // (x.y).z enumerates identically to x.(y.z) under the nested loops.
    for (std::size_t i = 0; i < left.outcome_count(); ++i)
      EXPECT_EQ(left.event(i), right.event(i));

    // Interchange law.
    OTest lhs = compose_seq(compose_par(t1, t2), compose_par(t3, t3));
    OTest rhs_inner1 = compose_seq(t1, t3);
    OTest rhs_inner2 = compose_seq(t2, t3);
    OTest rhs = compose_par(rhs_inner1, rhs_inner2);
    EXPECT_EQ(lhs.in(), rhs.in());
    auto lmap = lhs.event_map();
    // Interchange reorders labels: (x.y).(z.w) vs (x.z).(y.w); compare sums.
    EXPECT_EQ(lhs.full_coarse_graining(), rhs.full_coarse_graining());
  }
}

TEST(InvariantTest, CausalitySurrogate) {
  std::mt19937_64 rng(15);
  SystemType d3({3});
  for (int trial = 0; trial < 20; ++trial) {
    RatMatrix a = random_substochastic(rng, 3, 3);
    RatMatrix rest(3, 3);
    for (std::size_t c = 0; c < 3; ++c) {
      Rat missing = Rat(1) - a.col_sum(c);
      rest.at(0, c) = missing;
    }
    OTest t(d3, d3, {{"a", a}, {"b", rest}});
    RatMatrix u_row = deterministic_effect(d3).as_row();
    EXPECT_EQ(u_row * t.full_coarse_graining(), u_row);
  }
}

}  // namespace
