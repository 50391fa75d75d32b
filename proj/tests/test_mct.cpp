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

#include <string>
#include <vector>

#include "optmct/circuit/parse.hpp"
#include "optmct/harness/gen.hpp"
#include "optmct/mct/normalize.hpp"

using namespace optmct;
using OTest = optmct::Test;

namespace {

// Destroy-and-reprepare form: everything flows through the A'/B' registers.
// The observation is completed with the complement effect so it is a test.
CanonicalForm destroy_reprepare(const std::vector<Rat> &state,
                                const std::vector<Rat> &effect) {
  SystemType sys({state.size()});
  std::vector<Rat> rest(effect.size());
  for (std::size_t i = 0; i < effect.size(); ++i) rest[i] = Rat(1) - effect[i];
  CanonicalForm cf;
  cf.A = cf.B = cf.Ap = cf.Bp = sys;
  cf.C = cf.E = SystemType::trivial();
  cf.S1 = PermutationSpec::identity(sys);
  cf.S2 = PermutationSpec::identity(sys);
  cf.prep = preparation_test(sys, {{"p", StateVector{sys, state}}});
  cf.obs = observation_test(sys, {{"a", EffectVector{sys, effect}},
                                  {"rest", EffectVector{sys, rest}}});
  cf.labels = product_labels(cf.prep, cf.obs);
  return cf;
}

}  // namespace

TEST(NormalizeTest, IdentityShape) {
  CanonicalForm cf = normalize(make_identity(SystemType({2}), "A"));
  EXPECT_TRUE(cf.Ap.is_trivial());
  EXPECT_TRUE(cf.Bp.is_trivial());
  EXPECT_TRUE(cf.C.is_trivial());
  EXPECT_EQ(cf.E, SystemType({2}));
  EXPECT_TRUE(cf.S1.is_identity());
  EXPECT_TRUE(cf.S2.is_identity());
  OTest t = semantics(cf);
  EXPECT_EQ(t.outcome_count(), 1u);
  EXPECT_EQ(t.event(0), RatMatrix::identity(2));
}

TEST(NormalizeTest, MeasureAndPrepareShape) {
  CircuitSource src = parse(
      "system A2 = [2]\n"
      "ptest r on A2 { p: [1/3, 2/3] }\n"
      "otest m on A2 { y0: [1, 0], y1: [0, 1] }\n"
      "circuit: obs(m) ; prep(r)\n");
  CanonicalForm cf = normalize(src);
  EXPECT_EQ(cf.Ap, SystemType({2}));
  EXPECT_EQ(cf.Bp, SystemType({2}));
  EXPECT_TRUE(cf.C.is_trivial());
  EXPECT_TRUE(cf.E.is_trivial());
  EXPECT_TRUE(semantics(cf).event_map() == evaluate(src).event_map());
}

TEST(NormalizeTest, RandomCircuitSoundness) {
  GenParams params;
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng rng(Rng::derive(91, i));
    NodePtr c = gen_circuit(rng, params);
    OTest direct = evaluate(c);
    OTest via_canonical = semantics(normalize(c));
    EXPECT_TRUE(direct.event_map() == via_canonical.event_map())
        << "case " << i << " disagrees";
  }
}

TEST(NormalizeTest, PopulationSoundness) {
  GenParams params;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(Rng::derive(92, i));
    NodePtr c = i % 2 ? gen_wire_word(rng, params) : gen_identity_coin(rng, params);
    EXPECT_TRUE(evaluate(c).event_map() == semantics(normalize(c)).event_map());
  }
}

TEST(NormalizeTest, RejectsDottedLeafLabels) {
  SystemType sys({2});
  OTest bad = preparation_test(
      sys, {{"a.b", StateVector{sys, {make_rat(1, 2), make_rat(1, 2)}}}});
  EXPECT_THROW(normalize(make_prep(bad, "r")), std::invalid_argument);
}

TEST(SemanticsTest, DestroyReprepare) {
  CanonicalForm cf = destroy_reprepare({make_rat(1, 4), make_rat(3, 4)},
                                       {Rat(1), Rat(1)});
  OTest t = semantics(cf);
  RatMatrix expect(2, 2);
  expect.at(0, 0) = expect.at(0, 1) = make_rat(1, 4);
  expect.at(1, 0) = expect.at(1, 1) = make_rat(3, 4);
  EXPECT_EQ(t.event_map().at("p.a"), expect);
  EXPECT_EQ(t.event_map().at("p.rest"), RatMatrix(2, 2));
}

TEST(SemanticsTest, IdentityWire) {
  SystemType sys({3});
  CanonicalForm cf;
  cf.A = cf.B = cf.E = sys;
  cf.Ap = cf.Bp = cf.C = SystemType::trivial();
  cf.S1 = PermutationSpec::identity(sys);
  cf.S2 = PermutationSpec::identity(sys);
  cf.prep = trivial_prep_star();
  cf.obs = trivial_obs_star();
  cf.labels = {{"*"}};
  OTest t = semantics(cf);
  EXPECT_EQ(t.event(0), RatMatrix::identity(3));
}

TEST(SemanticsTest, CorrelatedAncilla) {
  SystemType two({2}), four({2, 2});
  Rat l0 = make_rat(1, 3), l1 = make_rat(2, 3);
  CanonicalForm cf;
  cf.A = cf.B = cf.Ap = cf.Bp = two;
  cf.C = two;
  cf.E = SystemType::trivial();
  cf.S1 = PermutationSpec::identity(two);
  cf.S2 = PermutationSpec::identity(two);
  cf.prep = preparation_test(
      four, {{"r", StateVector{four, {l0, Rat(0), Rat(0), l1}}}});
  cf.obs = observation_test(
      four, {{"x0", EffectVector{four, {Rat(1), Rat(0), Rat(0), Rat(0)}}},
             {"x1", EffectVector{four, {Rat(0), Rat(0), Rat(0), Rat(1)}}},
             {"rem", EffectVector{four, {Rat(0), Rat(1), Rat(1), Rat(0)}}}});
  cf.labels = product_labels(cf.prep, cf.obs);
  OTest t = semantics(cf);
  ASSERT_EQ(t.outcome_count(), 3u);
  RatMatrix e0(2, 2), e1(2, 2), erem(2, 2);
  e0.at(0, 0) = l0;
  e1.at(1, 1) = l1;
  erem.at(0, 1) = l0;
  erem.at(1, 0) = l1;
  EXPECT_EQ(t.event(0), e0);
  EXPECT_EQ(t.event(1), e1);
  EXPECT_EQ(t.event(2), erem);
  // full coarse-graining is a constant channel, not the identity
  RatMatrix cg(2, 2);
  cg.at(0, 0) = cg.at(0, 1) = l0;
  cg.at(1, 0) = cg.at(1, 1) = l1;
  EXPECT_EQ(t.full_coarse_graining(), cg);
}

TEST(ClosureTest, DestroyReprepareComposition) {
  CanonicalForm first = destroy_reprepare({make_rat(1, 2), make_rat(1, 2)},
                                          {make_rat(1, 3), Rat(1)});
  CanonicalForm second = destroy_reprepare({make_rat(1, 5), make_rat(4, 5)},
                                           {make_rat(1, 2), make_rat(1, 4)});
  CanonicalForm seq = canonical_seq_compose(first, second);
  OTest t = semantics(seq);
  EXPECT_TRUE(t.event_map() ==
              compose_seq(semantics(first), semantics(second)).event_map());
  // the a-then-a branch: <a2|rho1> = 3/8, event = 3/8 * |rho2><a1|
  RatMatrix expect(2, 2);
  expect.at(0, 0) = make_rat(3, 8) * make_rat(1, 5) * make_rat(1, 3);
  expect.at(0, 1) = make_rat(3, 8) * make_rat(1, 5) * Rat(1);
  expect.at(1, 0) = make_rat(3, 8) * make_rat(4, 5) * make_rat(1, 3);
  expect.at(1, 1) = make_rat(3, 8) * make_rat(4, 5) * Rat(1);
  EXPECT_EQ(t.event_map().at("p.a.p.a"), expect);
  // no environment wire appears; the scalar contraction rides on C
  EXPECT_TRUE(seq.E.is_trivial());
  EXPECT_EQ(seq.C, SystemType({2}));
}

TEST(ClosureTest, ParallelIdentityGrowsEnvironment) {
  Rng rng(Rng::derive(93, 0));
  GenParams params;
  params.max_factors = 2;
  CanonicalForm f = normalize(gen_circuit(rng, params));
  CanonicalForm fid =
      canonical_par_compose(f, normalize(make_identity(SystemType({3}), "W")));
  EXPECT_EQ(fid.E, f.E.tensor(SystemType({3})));
  EXPECT_EQ(fid.C, f.C);
  EXPECT_EQ(fid.Bp, f.Bp);
  EXPECT_EQ(fid.Ap, f.Ap);
  EXPECT_TRUE(fid.prep.events() == f.prep.events());
  EXPECT_TRUE(fid.obs.events() == f.obs.events());
}

TEST(ClosureTest, RandomPairsAgainstDirectComposition) {
  GenParams params;
  params.max_factors = 3;
  params.max_depth = 4;
  for (std::uint64_t i = 0; i < 60; ++i) {
    Rng rng(Rng::derive(94, i));
    NodePtr f = gen_circuit(rng, params);
    SystemType mid = typecheck(f).out;
    NodePtr g = gen_circuit_on(rng, mid, params);
    OTest direct = compose_seq(evaluate(f), evaluate(g));
    OTest canonical = semantics(canonical_seq_compose(normalize(f), normalize(g)));
    EXPECT_TRUE(direct.event_map() == canonical.event_map()) << "seq case " << i;

    NodePtr h = gen_circuit(rng, params);
    OTest direct_par = compose_par(evaluate(f), evaluate(h));
    OTest canonical_par =
        semantics(canonical_par_compose(normalize(f), normalize(h)));
    EXPECT_TRUE(direct_par.event_map() == canonical_par.event_map())
        << "par case " << i;
  }
}
