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
#include <vector>

#include "optmct/circuit/ast.hpp"
#include "optmct/circuit/eval.hpp"
#include "optmct/harness/rng.hpp"
#include "optmct/test.hpp"

namespace optmct {

struct GenParams {
  std::size_t max_factors = 4;
  std::size_t max_dim = 3;
  std::size_t max_depth = 6;
  std::size_t max_outcomes = 3;
};

inline SystemType gen_system(Rng &rng, std::size_t max_factors, std::size_t max_dim,
                             std::size_t min_factors = 1) {
  std::size_t n = min_factors + rng.pick(max_factors - min_factors + 1);
  std::vector<std::size_t> dims(n);
  for (auto &d : dims) d = 1 + rng.pick(max_dim);
  return SystemType(std::move(dims));
}

/// Random exact weights: nonnegative integers normalized by their sum.
inline std::vector<Rat> gen_weights(Rng &rng, std::size_t n, long granularity = 6) {
  std::vector<long> raw(n);
  long total = 0;
  for (auto &w : raw) {
    w = static_cast<long>(rng.pick(static_cast<std::size_t>(granularity)));
    total += w;
  }
  if (total == 0) {
    raw[rng.pick(n)] = 1;
    total = 1;
  }
  std::vector<Rat> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = make_rat(raw[i], total);
  return out;
}

/// Preparation test with exact rational states of total weight 1.
inline Test gen_prep(Rng &rng, const SystemType &sys, std::size_t max_outcomes,
                     const std::string &prefix = "p") {
  std::size_t outcomes = 1 + rng.pick(max_outcomes);
  std::vector<Rat> flat = gen_weights(rng, outcomes * sys.dim());
  std::vector<std::pair<std::string, StateVector>> states;
  for (std::size_t o = 0; o < outcomes; ++o) {
    std::vector<Rat> v(flat.begin() + o * sys.dim(), flat.begin() + (o + 1) * sys.dim());
    states.emplace_back(prefix + std::to_string(o), StateVector{sys, v});
  }
  return preparation_test(sys, std::move(states));
}

/// Observation test: each column of effects is an exact composition of 1.
inline Test gen_obs(Rng &rng, const SystemType &sys, std::size_t max_outcomes,
                    const std::string &prefix = "y") {
  std::size_t outcomes = 1 + rng.pick(max_outcomes);
  std::vector<std::vector<Rat>> vals(outcomes, std::vector<Rat>(sys.dim()));
  for (std::size_t j = 0; j < sys.dim(); ++j) {
    std::vector<Rat> col = gen_weights(rng, outcomes);
    for (std::size_t o = 0; o < outcomes; ++o) vals[o][j] = col[o];
  }
  std::vector<std::pair<std::string, EffectVector>> effects;
  for (std::size_t o = 0; o < outcomes; ++o)
    effects.emplace_back(prefix + std::to_string(o), EffectVector{sys, vals[o]});
  return observation_test(sys, std::move(effects));
}

inline PermutationSpec gen_perm(Rng &rng, const SystemType &sys) {
  std::vector<std::size_t> m(sys.factor_count());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = i;
  for (std::size_t i = m.size(); i > 1; --i) std::swap(m[i - 1], m[rng.pick(i)]);
  return PermutationSpec(sys, std::move(m));
}

namespace detail {

/// `extra` bounds how many fresh factors preparations may introduce.
inline NodePtr gen_node(Rng &rng, const SystemType &in, std::size_t depth,
                        std::size_t extra, const GenParams &p) {
  if (depth > 0 && rng.pick(3) != 0) {
    if (rng.coin()) {
      // the width cap for this subtree, not the global one: a sibling branch
      // may already hold wires of its own
      std::size_t cap = in.factor_count() + extra;
      NodePtr f = gen_node(rng, in, depth - 1, extra, p);
      SystemType mid = typecheck(f).out;
      std::size_t room = cap > mid.factor_count() ? cap - mid.factor_count() : 0;
      NodePtr g = gen_node(rng, mid, depth - 1, room, p);
      return make_seq(f, g);
    }
    std::size_t k = rng.pick(in.factor_count() + 1);
    std::size_t extra_left = rng.pick(extra + 1);
    NodePtr f = gen_node(rng, in.slice(0, k), depth - 1, extra_left, p);
    NodePtr g =
        gen_node(rng, in.slice(k, in.factor_count()), depth - 1, extra - extra_left, p);
    return make_par(f, g);
  }
  if (in.is_trivial()) {
    if (extra > 0 && rng.coin()) {
      SystemType sys = gen_system(rng, extra, p.max_dim);
      return make_prep(gen_prep(rng, sys, p.max_outcomes), "g");
    }
    return make_identity(SystemType::trivial(), "triv");
  }
  switch (rng.pick(3)) {
    case 0:
      return make_identity(in, "w");
    case 1:
      return make_permutation(gen_perm(rng, in), "s", "t");
    default:
      return make_obs(gen_obs(rng, in, p.max_outcomes), "g");
  }
}

}  // namespace detail

/// Well-typed random generator circuit within the size bounds.
inline NodePtr gen_circuit(Rng &rng, const GenParams &p) {
  SystemType in = gen_system(rng, p.max_factors, p.max_dim);
  std::size_t extra = p.max_factors - in.factor_count();
  return detail::gen_node(rng, in, 1 + rng.pick(p.max_depth), extra, p);
}

/// Random circuit with a fixed input type, for composition pairs.
inline NodePtr gen_circuit_on(Rng &rng, const SystemType &in,
                              const GenParams &p) {
  std::size_t extra =
      p.max_factors > in.factor_count() ? p.max_factors - in.factor_count() : 0;
  return detail::gen_node(rng, in, 1 + rng.pick(p.max_depth), extra, p);
}

/// Noisy identity: a word of factor permutations followed by its reversal.
inline NodePtr gen_wire_word(Rng &rng, const GenParams &p) {
  SystemType sys = gen_system(rng, p.max_factors, p.max_dim);
  std::size_t steps = 1 + rng.pick(3);
  std::vector<PermutationSpec> word;
  SystemType cur = sys;
  for (std::size_t i = 0; i < steps; ++i) {
    PermutationSpec s = gen_perm(rng, cur);
    cur = s.output();
    word.push_back(std::move(s));
  }
  NodePtr node = make_permutation(word[0], "s", "t");
  for (std::size_t i = 1; i < word.size(); ++i)
    node = make_seq(node, make_permutation(word[i], "s", "t"));
  for (std::size_t i = word.size(); i-- > 0;)
    node = make_seq(node, make_permutation(word[i].inverse(), "s", "t"));
  return node;
}

/// Coin-decorated identity: an ancilla wire is prepared and measured beside
/// untouched wires, so every event is a multiple of the identity.
inline NodePtr gen_identity_coin(Rng &rng, const GenParams &p) {
  SystemType main = gen_system(rng, p.max_factors > 1 ? p.max_factors - 1 : 1, p.max_dim);
  SystemType coin = gen_system(rng, 1, p.max_dim);
  NodePtr first = make_par(make_prep(gen_prep(rng, coin, p.max_outcomes), "c"),
                           make_identity(main, "A"));
  NodePtr second = make_par(make_obs(gen_obs(rng, coin, p.max_outcomes), "m"),
                            make_identity(main, "A"));
  return make_seq(first, second);
}

}  // namespace optmct
