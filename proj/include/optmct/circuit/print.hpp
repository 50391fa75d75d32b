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

#include <string>

#include "optmct/circuit/ast.hpp"
#include "optmct/rational.hpp"

namespace optmct {

namespace detail {

// Precedence: seq 0 < par 1 < atom 2. Parenthesize when a node is looser
// than its context; both operators associate to the left.
inline void print_expr(const NodePtr &node, std::string &out, int min_prec) {
  switch (node->kind) {
    case NodeKind::Identity:
      out += "id(" + node->ref_a + ")";
      return;
    case NodeKind::Permutation:
      out += "swap(" + node->ref_a + "," + node->ref_b + ")";
      return;
    case NodeKind::Prep:
      out += "prep(" + node->ref_a + ")";
      return;
    case NodeKind::Obs:
      out += "obs(" + node->ref_a + ")";
      return;
    case NodeKind::Seq: {
      bool wrap = min_prec > 0;
      if (wrap) out += "(";
      print_expr(node->left, out, 0);
      out += " ; ";
      print_expr(node->right, out, 1);
      if (wrap) out += ")";
      return;
    }
    case NodeKind::Par: {
      bool wrap = min_prec > 1;
      if (wrap) out += "(";
      print_expr(node->left, out, 1);
      out += " | ";
      print_expr(node->right, out, 2);
      if (wrap) out += ")";
      return;
    }
  }
}

}  // namespace detail

/// Serializes an expression; parse of the result rebuilds the same AST.
inline std::string print_expr(const NodePtr &node) {
  std::string out;
  detail::print_expr(node, out, 0);
  return out;
}

/// Serializes a full source file; parse(print(src)) equals src structurally.
inline std::string print_source(const CircuitSource &src) {
  std::string out;
  for (const auto &[name, sys] : src.systems) {
    out += "system " + name + " = [";
    for (std::size_t i = 0; i < sys.factor_count(); ++i) {
      if (i) out += ",";
      out += std::to_string(sys.factors()[i]);
    }
    out += "]\n";
  }
  for (const auto &decl : src.tests) {
    out += (decl.is_prep ? "ptest " : "otest ") + decl.name + " on " + decl.sys_name +
           " {\n";
    for (std::size_t i = 0; i < decl.test.outcome_count(); ++i) {
      out += "  " + decl.test.label(i) + ": [";
      const RatMatrix &m = decl.test.event(i);
      const std::size_t n = decl.is_prep ? m.rows() : m.cols();
      for (std::size_t j = 0; j < n; ++j) {
        if (j) out += ",";
        out += rat_to_string(decl.is_prep ? m.at(j, 0) : m.at(0, j));
      }
      out += "]";
      if (i + 1 < decl.test.outcome_count()) out += ",";
      out += "\n";
    }
    out += "}\n";
  }
  out += "circuit: " + print_expr(src.circuit) + "\n";
  return out;
}

}  // namespace optmct
