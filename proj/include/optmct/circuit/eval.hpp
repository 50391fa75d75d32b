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

#include <random>
#include <string>
#include <vector>

#include "optmct/circuit/ast.hpp"
#include "optmct/test.hpp"

namespace optmct {

// AST annotated with input/output types at every node.
struct TypedNode {
  NodePtr node;
  SystemType in, out;
  std::vector<TypedNode> children;
};

namespace detail {
inline std::string pos_str(const SourcePos &p) {
  return std::to_string(p.line) + ":" + std::to_string(p.col);
}
}  // namespace detail

/// Bottom-up type propagation; rejects sequential mismatches naming both types.
inline TypedNode typecheck(const NodePtr &node) {
  TypedNode t;
  t.node = node;
  switch (node->kind) {
    case NodeKind::Identity:
      t.in = t.out = node->sys;
      break;
    case NodeKind::Permutation:
      t.in = node->perm.input();
      t.out = node->perm.output();
      break;
    case NodeKind::Prep:
    case NodeKind::Obs:
      t.in = node->test.in();
      t.out = node->test.out();
      break;
    case NodeKind::Seq: {
      TypedNode l = typecheck(node->left);
      TypedNode r = typecheck(node->right);
      if (l.out != r.in)
        throw TypeError("sequential mismatch at " + detail::pos_str(node->pos) +
                        ": first part produces " + l.out.to_string() +
                        ", second part consumes " + r.in.to_string());
      t.in = l.in;
      t.out = r.out;
      t.children.push_back(std::move(l));
      t.children.push_back(std::move(r));
      break;
    }
    case NodeKind::Par: {
      TypedNode l = typecheck(node->left);
      TypedNode r = typecheck(node->right);
      t.in = l.in.tensor(r.in);
      t.out = l.out.tensor(r.out);
      t.children.push_back(std::move(l));
      t.children.push_back(std::move(r));
      break;
    }
  }
  return t;
}

namespace detail {
inline Test evaluate_unchecked(const NodePtr &node) {
  switch (node->kind) {
    case NodeKind::Identity:
      return identity_test(node->sys);
    case NodeKind::Permutation:
      return Test(node->perm.input(), node->perm.output(),
                  {{"*", node->perm.matrix()}});
    case NodeKind::Prep:
    case NodeKind::Obs:
      return node->test;
    case NodeKind::Seq:
      return compose_seq(evaluate_unchecked(node->left),
                         evaluate_unchecked(node->right));
    case NodeKind::Par:
      return compose_par(evaluate_unchecked(node->left),
                         evaluate_unchecked(node->right));
  }
  throw std::logic_error("unreachable node kind");
}
}  // namespace detail

/// Maps the circuit to its Test. Leaf outcome sets multiply left-to-right,
/// top-to-bottom; deterministic leaves contribute the single outcome "*".
inline Test evaluate(const NodePtr &node) {
  typecheck(node);
  return detail::evaluate_unchecked(node);
}

inline Test evaluate(const CircuitSource &src) { return evaluate(src.circuit); }

namespace detail {
inline void flatten_chain(const NodePtr &node, NodeKind kind,
                          std::vector<NodePtr> &parts, std::mt19937_64 &rng);

inline NodePtr rebuild_chain(const std::vector<NodePtr> &parts, NodeKind kind,
                             std::size_t lo, std::size_t hi, std::mt19937_64 &rng) {
  if (hi - lo == 1) return parts[lo];
  std::size_t split = lo + 1 + rng() % (hi - lo - 1);
  NodePtr l = rebuild_chain(parts, kind, lo, split, rng);
  NodePtr r = rebuild_chain(parts, kind, split, hi, rng);
  return kind == NodeKind::Seq ? make_seq(l, r) : make_par(l, r);
}

inline NodePtr reassociate_random_impl(const NodePtr &node, std::mt19937_64 &rng) {
  if (node->kind != NodeKind::Seq && node->kind != NodeKind::Par) return node;
  std::vector<NodePtr> parts;
  flatten_chain(node, node->kind, parts, rng);
  return rebuild_chain(parts, node->kind, 0, parts.size(), rng);
}

inline void flatten_chain(const NodePtr &node, NodeKind kind,
                          std::vector<NodePtr> &parts, std::mt19937_64 &rng) {
  if (node->kind == kind) {
    flatten_chain(node->left, kind, parts, rng);
    flatten_chain(node->right, kind, parts, rng);
  } else {
    parts.push_back(reassociate_random_impl(node, rng));
  }
}
}  // namespace detail

/// Semantically equivalent AST with Seq/Par chains re-bracketed at random.
inline NodePtr reassociate_random(const NodePtr &node, std::mt19937_64 &rng) {
  return detail::reassociate_random_impl(node, rng);
}

}  // namespace optmct
