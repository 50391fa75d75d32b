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
#include "optmct/circuit/eval.hpp"
#include "optmct/mct/flatform.hpp"

namespace optmct {

namespace detail {

inline void require_plain_labels(const Test &t) {
  for (std::size_t i = 0; i < t.outcome_count(); ++i)
    if (t.label(i).find('.') != std::string::npos)
      throw std::invalid_argument("leaf outcome label '" + t.label(i) +
                                  "' contains '.', which is reserved for "
                                  "composite outcomes");
}

inline FlatForm flat_leaf_perm(const PermutationSpec &p) {
  FlatForm r;
  r.prep = trivial_prep_star();
  r.obs = trivial_obs_star();
  r.A = p.input();
  r.B = p.output();
  r.S = p;
  r.labels = {{"*"}};
  return r;
}

inline FlatForm flatten(const NodePtr &node) {
  switch (node->kind) {
    case NodeKind::Identity:
      return flat_leaf_perm(PermutationSpec::identity(node->sys));
    case NodeKind::Permutation:
      return flat_leaf_perm(node->perm);
    case NodeKind::Prep: {
      require_plain_labels(node->test);
      FlatForm r;
      r.prep = node->test;
      r.obs = trivial_obs_star();
      r.A = SystemType::trivial();
      r.B = node->test.out();
      r.S = PermutationSpec::identity(r.B);
      r.labels.assign(r.prep.outcome_count(), {});
      for (std::size_t p = 0; p < r.prep.outcome_count(); ++p)
        r.labels[p] = {r.prep.label(p)};
      return r;
    }
    case NodeKind::Obs: {
      require_plain_labels(node->test);
      FlatForm r;
      r.prep = trivial_prep_star();
      r.obs = node->test;
      r.A = node->test.in();
      r.B = SystemType::trivial();
      r.S = PermutationSpec::identity(r.A);
      r.labels = {{}};
      for (std::size_t o = 0; o < r.obs.outcome_count(); ++o)
        r.labels[0].push_back(r.obs.label(o));
      return r;
    }
    case NodeKind::Seq:
      return flat_seq(flatten(node->left), flatten(node->right));
    case NodeKind::Par:
      return flat_par(flatten(node->left), flatten(node->right));
  }
  throw std::logic_error("unreachable node kind");
}

}  // namespace detail

/// Rewrites a generator circuit into canonical shape. The result's labels
/// grid carries the circuit's own outcome words, so
/// semantics(normalize(c)) equals evaluate(c) as a labelled event map.
inline CanonicalForm normalize(const NodePtr &node) {
  typecheck(node);
  return flat_to_canonical(detail::flatten(node));
}

inline CanonicalForm normalize(const CircuitSource &src) {
  return normalize(src.circuit);
}

/// Sequential composition carried out on canonical forms directly.
inline CanonicalForm canonical_seq_compose(const CanonicalForm &f,
                                           const CanonicalForm &g) {
  if (f.B != g.A)
    throw TypeError("canonical sequential mismatch: " + f.B.to_string() + " vs " +
                    g.A.to_string());
  return flat_to_canonical(flat_seq(canonical_to_flat(f), canonical_to_flat(g)));
}

/// Parallel composition carried out on canonical forms directly.
inline CanonicalForm canonical_par_compose(const CanonicalForm &f,
                                           const CanonicalForm &g) {
  return flat_to_canonical(flat_par(canonical_to_flat(f), canonical_to_flat(g)));
}

}  // namespace optmct
