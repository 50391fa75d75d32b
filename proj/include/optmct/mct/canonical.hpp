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

#include <stdexcept>
#include <string>
#include <vector>

#include "optmct/bipartite.hpp"
#include "optmct/permutation.hpp"
#include "optmct/test.hpp"

namespace optmct {

// Canonical shape of an MCT test on A -> B:
//
//   input A --S1--> [A' ++ E]
//   prep on [C ++ B'] beside identity     -> wires [C B' A' E]
//   central swap of B' and A'             -> wires [C A' B' E]
//   obs on [C ++ A'] beside identity      -> wires [B' E]
//   [B' ++ E] --S2--> output B
//
// One event per (prep outcome, obs outcome) pair; `labels` names each pair
// (normalization stores the source circuit's outcome words here).
struct CanonicalForm {
  SystemType A, B, Ap, Bp, C, E;
  PermutationSpec S1;  // A -> [Ap ++ E]
  Test prep;           // trivial -> [C ++ Bp]
  Test obs;            // [C ++ Ap] -> trivial
  PermutationSpec S2;  // [Bp ++ E] -> B

  std::vector<std::vector<std::string>> labels;  // [prep outcome][obs outcome]

  PermutationSpec central_swap() const {
    return PermutationSpec::identity(C)
        .beside(PermutationSpec::block_swap(Bp, Ap))
        .beside(PermutationSpec::identity(E));
  }
};

/// Internal wiring guard; throws on a construction bug.
inline void check_canonical(const CanonicalForm &cf) {
  auto fail = [](const std::string &what) {
    throw std::logic_error("canonical form wiring broken: " + what);
  };
  if (cf.S1.input() != cf.A) fail("S1 input is not A");
  if (cf.S1.output() != cf.Ap.tensor(cf.E)) fail("S1 output is not [A' E]");
  if (cf.S2.input() != cf.Bp.tensor(cf.E)) fail("S2 input is not [B' E]");
  if (cf.S2.output() != cf.B) fail("S2 output is not B");
  if (!is_preparation_test(cf.prep)) fail("prep is not a preparation test");
  if (!is_observation_test(cf.obs)) fail("obs is not an observation test");
  if (cf.prep.out() != cf.C.tensor(cf.Bp)) fail("prep is not on [C B']");
  if (cf.obs.in() != cf.C.tensor(cf.Ap)) fail("obs is not on [C A']");
  if (cf.labels.size() != cf.prep.outcome_count()) fail("label row count");
  for (const auto &row : cf.labels)
    if (row.size() != cf.obs.outcome_count()) fail("label column count");
}

/// The represented Test, built event by event from the wiring above.
///
/// The staged product S2 (obs x id) swap (prep x id) S1 is never formed as
/// matrices; the registers it would act on grow with every preparation in the
/// source circuit. Each stage only routes wires, so an event entry is a sum of
/// prep weight times obs weight over matching wire assignments.
inline Test semantics(const CanonicalForm &cf) {
  check_canonical(cf);
  const std::size_t da = cf.A.dim(), db = cf.B.dim();
  const std::size_t dap = cf.Ap.dim(), dbp = cf.Bp.dim(), de = cf.E.dim();

  // sparse view of each preparation column, indexed over [C ++ B']
  std::vector<std::vector<std::pair<std::size_t, Rat>>> prep_nz(
      cf.prep.outcome_count());
  for (std::size_t p = 0; p < cf.prep.outcome_count(); ++p) {
    const RatMatrix &col = cf.prep.event(p);
    for (std::size_t i = 0; i < col.rows(); ++i)
      if (col.at(i, 0) != 0) prep_nz[p].emplace_back(i, col.at(i, 0));
  }

  std::vector<std::pair<std::string, RatMatrix>> events;
  events.reserve(cf.prep.outcome_count() * cf.obs.outcome_count());
  for (std::size_t p = 0; p < cf.prep.outcome_count(); ++p)
    for (std::size_t o = 0; o < cf.obs.outcome_count(); ++o) {
      const RatMatrix &row = cf.obs.event(o);
      RatMatrix m(db, da);
      for (std::size_t alpha = 0; alpha < da; ++alpha) {
        // S1 splits the input wire assignment into (A', E)
        const std::size_t s1 = cf.S1.apply_index(alpha);
        const std::size_t ap = s1 / de, e = s1 % de;
        for (const auto &[cb, wp] : prep_nz[p]) {
          const std::size_t c = cb / dbp, bp = cb % dbp;
          // after the central swap the observation reads (C, A')
          const Rat &wo = row.at(0, c * dap + ap);
          if (wo == 0) continue;
          // what survives is (B', E), finished by S2
          const std::size_t beta = cf.S2.apply_index(bp * de + e);
          m.at(beta, alpha) += wp * wo;
        }
      }
      events.emplace_back(cf.labels[p][o], std::move(m));
    }
  return Test(cf.A, cf.B, std::move(events));
}

/// Default label grid "prepLabel.obsLabel" for hand-built forms.
inline std::vector<std::vector<std::string>> product_labels(const Test &prep,
                                                            const Test &obs) {
  std::vector<std::vector<std::string>> labels(prep.outcome_count());
  for (std::size_t p = 0; p < prep.outcome_count(); ++p) {
    labels[p].reserve(obs.outcome_count());
    for (std::size_t o = 0; o < obs.outcome_count(); ++o)
      labels[p].push_back(prep.label(p) + "." + obs.label(o));
  }
  return labels;
}

/// Single-outcome "*" preparation on the trivial system.
inline Test trivial_prep_star() {
  return preparation_test(SystemType::trivial(),
                          {{"*", StateVector{SystemType::trivial(), {Rat(1)}}}});
}

/// Single-outcome "*" observation on the trivial system.
inline Test trivial_obs_star() {
  return observation_test(SystemType::trivial(),
                          {{"*", EffectVector{SystemType::trivial(), {Rat(1)}}}});
}

/// Signature compared by subsequence stabilization: everything but prep/obs.
inline bool same_shape(const CanonicalForm &a, const CanonicalForm &b) {
  return a.A == b.A && a.B == b.B && a.Ap == b.Ap && a.Bp == b.Bp && a.C == b.C &&
         a.E == b.E && a.S1 == b.S1 && a.S2 == b.S2;
}

}  // namespace optmct
