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

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "optmct/permutation.hpp"
#include "optmct/test.hpp"

namespace optmct {

struct SourcePos {
  std::size_t line = 1;
  std::size_t col = 1;
};

enum class NodeKind { Identity, Permutation, Prep, Obs, Seq, Par };

struct CircuitNode;
using NodePtr = std::shared_ptr<const CircuitNode>;

// Generator-circuit AST node. Leaves are exactly the generator set: system
// identities, factor permutations, preparation tests, observation tests.
struct CircuitNode {
  NodeKind kind;
  SourcePos pos;
  SystemType sys;            // Identity
  PermutationSpec perm;      // Permutation
  Test test;                 // Prep / Obs
  std::string ref_a, ref_b;  // source names (id/prep/obs use ref_a; swap both)
  NodePtr left, right;       // Seq / Par
};

inline NodePtr make_identity(SystemType sys, std::string name, SourcePos pos = {}) {
  auto n = std::make_shared<CircuitNode>();
  n->kind = NodeKind::Identity;
  n->pos = pos;
  n->sys = std::move(sys);
  n->ref_a = std::move(name);
  return n;
}

inline NodePtr make_permutation(PermutationSpec p, std::string name_a,
                                std::string name_b, SourcePos pos = {}) {
  auto n = std::make_shared<CircuitNode>();
  n->kind = NodeKind::Permutation;
  n->pos = pos;
  n->perm = std::move(p);
  n->ref_a = std::move(name_a);
  n->ref_b = std::move(name_b);
  return n;
}

inline NodePtr make_prep(Test t, std::string name, SourcePos pos = {}) {
  if (!is_preparation_test(t))
    throw TypeError("prep leaf requires a preparation test");
  auto n = std::make_shared<CircuitNode>();
  n->kind = NodeKind::Prep;
  n->pos = pos;
  n->test = std::move(t);
  n->ref_a = std::move(name);
  return n;
}

inline NodePtr make_obs(Test t, std::string name, SourcePos pos = {}) {
  if (!is_observation_test(t))
    throw TypeError("obs leaf requires an observation test");
  auto n = std::make_shared<CircuitNode>();
  n->kind = NodeKind::Obs;
  n->pos = pos;
  n->test = std::move(t);
  n->ref_a = std::move(name);
  return n;
}

inline NodePtr make_seq(NodePtr first, NodePtr second, SourcePos pos = {}) {
  auto n = std::make_shared<CircuitNode>();
  n->kind = NodeKind::Seq;
  n->pos = pos;
  n->left = std::move(first);
  n->right = std::move(second);
  return n;
}

inline NodePtr make_par(NodePtr top, NodePtr bottom, SourcePos pos = {}) {
  auto n = std::make_shared<CircuitNode>();
  n->kind = NodeKind::Par;
  n->pos = pos;
  n->left = std::move(top);
  n->right = std::move(bottom);
  return n;
}

/// Structural equality ignoring source positions.
inline bool node_equal(const NodePtr &a, const NodePtr &b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Identity:
      return a->sys == b->sys && a->ref_a == b->ref_a;
    case NodeKind::Permutation:
      return a->perm == b->perm && a->ref_a == b->ref_a && a->ref_b == b->ref_b;
    case NodeKind::Prep:
    case NodeKind::Obs:
      return a->test == b->test && a->ref_a == b->ref_a;
    case NodeKind::Seq:
    case NodeKind::Par:
      return node_equal(a->left, b->left) && node_equal(a->right, b->right);
  }
  return false;
}

// A parsed source file: named declarations plus the circuit expression.
struct CircuitSource {
  std::vector<std::pair<std::string, SystemType>> systems;
  struct TestDecl {
    bool is_prep = true;
    std::string name;
    std::string sys_name;
    Test test;
  };
  std::vector<TestDecl> tests;
  NodePtr circuit;

  const SystemType *find_system(const std::string &name) const {
    for (const auto &[n, s] : systems)
      if (n == name) return &s;
    return nullptr;
  }
  const TestDecl *find_test(const std::string &name) const {
    for (const auto &d : tests)
      if (d.name == name) return &d;
    return nullptr;
  }
};

inline bool source_equal(const CircuitSource &a, const CircuitSource &b) {
  if (a.systems != b.systems) return false;
  if (a.tests.size() != b.tests.size()) return false;
  for (std::size_t i = 0; i < a.tests.size(); ++i) {
    const auto &x = a.tests[i], &y = b.tests[i];
    if (x.is_prep != y.is_prep || x.name != y.name || x.sys_name != y.sys_name ||
        !(x.test == y.test))
      return false;
  }
  return node_equal(a.circuit, b.circuit);
}

}  // namespace optmct
