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
#include <string>
#include <vector>

#include "optmct/circuit/ast.hpp"
#include "optmct/circuit/eval.hpp"
#include "optmct/circuit/parse.hpp"
#include "optmct/circuit/print.hpp"
#include "optmct/test.hpp"

using namespace optmct;
using OTest = optmct::Test;

namespace {

const char *kMeasurePrepare = R"(
# measure on A2, then reprepare a fixed state
system A2 = [2]
ptest r on A2 { p: [1/3, 2/3] }
otest m on A2 { y0: [1, 0], y1: [0, 1] }
circuit: obs(m) ; prep(r)
)";

// Random well-typed circuit with the given input type. Prep leaves appear on
// trivial input wires created by parallel splits.
NodePtr gen_with_in(const SystemType &in, std::size_t depth, std::mt19937_64 &rng) {
  if (depth > 0 && rng() % 3 != 0) {
    if (rng() % 2 == 0) {
      NodePtr f = gen_with_in(in, depth - 1, rng);
      NodePtr g = gen_with_in(typecheck(f).out, depth - 1, rng);
      return make_seq(f, g);
    }
    std::size_t k = rng() % (in.factor_count() + 1);
    NodePtr f = gen_with_in(in.slice(0, k), depth - 1, rng);
    NodePtr g = gen_with_in(in.slice(k, in.factor_count()), depth - 1, rng);
    return make_par(f, g);
  }
  if (in.is_trivial()) {
    if (rng() % 2 == 0) {
      // preparation leaf on a fresh system
      std::vector<std::size_t> dims(1 + rng() % 2);
      for (auto &d : dims) d = 1 + rng() % 3;
      SystemType sys{dims};
      std::size_t outcomes = 1 + rng() % 3;
      std::vector<long> weights(outcomes * sys.dim());
      long total = 0;
      for (auto &w : weights) {
        w = static_cast<long>(rng() % 4);
        total += w;
      }
      if (total == 0) {
        weights[0] = 1;
        total = 1;
      }
      std::vector<std::pair<std::string, StateVector>> states;
      for (std::size_t o = 0; o < outcomes; ++o) {
        std::vector<Rat> v(sys.dim());
        for (std::size_t j = 0; j < sys.dim(); ++j)
          v[j] = make_rat(weights[o * sys.dim() + j], total);
        states.emplace_back("p" + std::to_string(o), StateVector{sys, v});
      }
      return make_prep(preparation_test(sys, std::move(states)), "g");
    }
    return make_identity(SystemType::trivial(), "triv");
  }
  switch (rng() % 3) {
    case 0:
      return make_identity(in, "w");
    case 1: {
      std::vector<std::size_t> m(in.factor_count());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = i;
      for (std::size_t i = m.size(); i > 1; --i) std::swap(m[i - 1], m[rng() % i]);
      return make_permutation(PermutationSpec(in, m), "s", "t");
    }
    default: {
      std::size_t outcomes = 1 + rng() % 3;
      std::vector<std::vector<Rat>> vals(outcomes, std::vector<Rat>(in.dim(), Rat(0)));
      for (std::size_t j = 0; j < in.dim(); ++j) {
        std::vector<long> cuts(outcomes);
        long total = 0;
        for (auto &c : cuts) {
          c = static_cast<long>(rng() % 4);
          total += c;
        }
        if (total == 0) {
          cuts[0] = 1;
          total = 1;
        }
        for (std::size_t o = 0; o < outcomes; ++o) vals[o][j] = make_rat(cuts[o], total);
      }
      std::vector<std::pair<std::string, EffectVector>> effects;
      for (std::size_t o = 0; o < outcomes; ++o)
        effects.emplace_back("y" + std::to_string(o), EffectVector{in, vals[o]});
      return make_obs(observation_test(in, std::move(effects)), "g");
    }
  }
}

NodePtr gen_random(std::mt19937_64 &rng) {
  std::vector<std::size_t> dims(1 + rng() % 3);
  for (auto &d : dims) d = 1 + rng() % 3;
  return gen_with_in(SystemType{dims}, 1 + rng() % 5, rng);
}

}  // namespace

TEST(ParseTest, IdentityAtom) {
  CircuitSource src = parse("system A2 = [2]\ncircuit: id(A2)");
  ASSERT_TRUE(src.circuit);
  EXPECT_EQ(src.circuit->kind, NodeKind::Identity);
  EXPECT_EQ(src.circuit->sys, SystemType({2}));
}

TEST(ParseTest, MeasureAndPrepareShape) {
  CircuitSource src = parse(kMeasurePrepare);
  ASSERT_EQ(src.circuit->kind, NodeKind::Seq);
  EXPECT_EQ(src.circuit->left->kind, NodeKind::Obs);
  EXPECT_EQ(src.circuit->right->kind, NodeKind::Prep);
}

TEST(ParseTest, MalformedCallPointsAtParen) {
  try {
    parse("system A = [2]\nptest r on A { p: [1, 0] }\ncircuit: prep(");
    FAIL() << "expected a syntax error";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line, 3u);
    EXPECT_EQ(e.col, 14u);  // the '(' of prep(
  }
}

TEST(ParseTest, UnknownIdentifier) {
  try {
    parse("system A = [2]\ncircuit: id(Z)");
    FAIL() << "expected an error";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("Z"), std::string::npos);
  }
}

TEST(ParseTest, RationalsAndComments) {
  CircuitSource src = parse(
      "system A = [3]            # three levels\n"
      "ptest r on A { p: [1/2, 1/6, 1/3] }\n"
      "circuit: prep(r)\n");
  const RatMatrix &m = src.circuit->test.event(0);
  EXPECT_EQ(m.at(0, 0), make_rat(1, 2));
  EXPECT_EQ(m.at(1, 0), make_rat(1, 6));
  EXPECT_EQ(m.at(2, 0), make_rat(1, 3));
}

TEST(ParseTest, RejectsInvalidDeclaredTest) {
  EXPECT_THROW(parse("system A = [2]\notest m on A { y: [1, 2] }\ncircuit: obs(m)"),
               ParseError);
  EXPECT_THROW(parse("system A = [2]\nptest r on A { p: [1/2, 1/4] }\ncircuit: prep(r)"),
               ParseError);
}

TEST(TypecheckTest, ParallelTypes) {
  NodePtr n = make_par(make_identity(SystemType({2}), "A"),
                       make_identity(SystemType({3}), "B"));
  TypedNode t = typecheck(n);
  EXPECT_EQ(t.in, SystemType({2, 3}));
  EXPECT_EQ(t.out, SystemType({2, 3}));
}

TEST(TypecheckTest, SequentialMismatchNamesBothTypes) {
  NodePtr n = make_seq(make_identity(SystemType({2}), "A"),
                       make_identity(SystemType({3}), "B"));
  try {
    typecheck(n);
    FAIL() << "expected a type error";
  } catch (const TypeError &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("[2]"), std::string::npos);
    EXPECT_NE(msg.find("[3]"), std::string::npos);
  }
}

TEST(TypecheckTest, CanonicalTemplateTypes) {
  CircuitSource src = parse(
      "system A = [2]\n"
      "system Bp = [2]\n"
      "system C = [2]\n"
      "system CBp = [2,2]\n"
      "system CAp = [2,2]\n"
      "ptest rho on CBp { r: [1/4, 1/4, 1/4, 1/4] }\n"
      "otest a on CAp { y0: [1,1,0,0], y1: [0,0,1,1] }\n"
      "circuit: (prep(rho) | id(A)) ; (id(C) | swap(Bp,A)) ; (obs(a) | id(Bp))\n");
  TypedNode t = typecheck(src.circuit);
  EXPECT_EQ(t.in, SystemType({2}));
  EXPECT_EQ(t.out, SystemType({2}));
}

TEST(EvaluateTest, IdentityLeaf) {
  OTest t = evaluate(make_identity(SystemType({2}), "A"));
  EXPECT_EQ(t.outcome_count(), 1u);
  EXPECT_EQ(t.label(0), "*");
  EXPECT_EQ(t.event(0), RatMatrix::identity(2));
}

TEST(EvaluateTest, MeasureAndPrepareEvents) {
  OTest t = evaluate(parse(kMeasurePrepare));
  ASSERT_EQ(t.outcome_count(), 2u);
  EXPECT_EQ(t.label(0), "y0.p");
  EXPECT_EQ(t.label(1), "y1.p");
  RatMatrix e0(2, 2), e1(2, 2);
  e0.at(0, 0) = make_rat(1, 3);
  e0.at(1, 0) = make_rat(2, 3);
  e1.at(0, 1) = make_rat(1, 3);
  e1.at(1, 1) = make_rat(2, 3);
  EXPECT_EQ(t.event(0), e0);
  EXPECT_EQ(t.event(1), e1);
}

TEST(EvaluateTest, ReassociationInvariance) {
  std::mt19937_64 rng(404);
  int composite = 0;
  for (int trial = 0; trial < 60; ++trial) {
    NodePtr n = gen_random(rng);
    NodePtr m = reassociate_random(n, rng);
    if (!node_equal(n, m)) ++composite;
    OTest a = evaluate(n);
    OTest b = evaluate(m);
    EXPECT_TRUE(a == b) << "re-association changed the evaluated test";
  }
  EXPECT_GT(composite, 10);
}

TEST(EvaluateTest, EvaluatedTestsValidate) {
  std::mt19937_64 rng(405);
  for (int trial = 0; trial < 60; ++trial) {
    OTest t = evaluate(gen_random(rng));
    EXPECT_TRUE(validate(t).valid);
  }
}

TEST(EvaluateTest, CoarseGrainCommutes) {
  SystemType a2({2});
  std::vector<std::pair<std::string, StateVector>> states{
      {"a", StateVector{a2, {make_rat(1, 6), make_rat(1, 6)}}},
      {"b", StateVector{a2, {make_rat(1, 3), make_rat(0)}}},
      {"c", StateVector{a2, {make_rat(0), make_rat(1, 3)}}}};
  OTest fine = preparation_test(a2, states);
  NodePtr circuit_fine = make_par(make_prep(fine, "r"), make_identity(a2, "A"));
  NodePtr circuit_coarse = make_par(
      make_prep(coarse_grain(fine, {{"ab", {"a", "b"}}, {"cc", {"c"}}}), "r2"),
      make_identity(a2, "A"));
  OTest lhs = evaluate(circuit_coarse);
  OTest rhs = coarse_grain(evaluate(circuit_fine),
                           {{"ab.*", {"a.*", "b.*"}}, {"cc.*", {"c.*"}}});
  EXPECT_TRUE(lhs.event_map() == rhs.event_map());
}

TEST(RoundTripTest, PrintThenParse) {
  std::vector<std::string> sources{
      kMeasurePrepare,
      "system A = [2,3]\n"
      "system B = [2]\n"
      "otest m on B { u: [1/2, 1/2], v: [1/2, 1/2] }\n"
      "circuit: id(A) | (obs(m) ; obs(m))\n",
      "system A = [2]\n"
      "system B = [3]\n"
      "ptest r on B { p0: [1/9, 2/9, 0], p1: [2/3, 0, 0] }\n"
      "otest m on A { y: [1, 1] }\n"
      "circuit: (prep(r) | id(A)) ; swap(B,A) ; (obs(m) | id(B))\n"};
  for (const auto &text : sources) {
    CircuitSource first = parse(text);
    CircuitSource second = parse(print_source(first));
    EXPECT_TRUE(source_equal(first, second));
    EXPECT_EQ(print_source(first), print_source(second));
  }
}

TEST(RoundTripTest, PrecedenceShapes) {
  // Par under Seq needs no parens; Seq under Par and right-nested chains do.
  CircuitSource base = parse(
      "system A = [2]\n"
      "otest m on A { y0: [1,0], y1: [0,1] }\n"
      "ptest r on A { p: [1/2,1/2] }\n"
      "circuit: id(A)\n");
  NodePtr oa = base.circuit;  // id(A)
  NodePtr seq = make_seq(oa, oa);
  NodePtr shapes[] = {
      make_par(seq, oa),  make_par(oa, seq),        make_seq(oa, make_seq(oa, oa)),
      make_seq(seq, seq), make_par(oa, make_par(oa, oa)),
  };
  for (const NodePtr &s : shapes) {
    CircuitSource src = base;
    src.circuit = s;
    CircuitSource back = parse(print_source(src));
    EXPECT_TRUE(node_equal(back.circuit, s)) << print_source(src);
  }
}
