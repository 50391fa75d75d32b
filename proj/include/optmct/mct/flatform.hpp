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
#include <utility>
#include <vector>

#include "optmct/bipartite.hpp"
#include "optmct/mct/canonical.hpp"
#include "optmct/permutation.hpp"
#include "optmct/test.hpp"

namespace optmct {

// Intermediate peeled shape: all preparations pulled to the front, all
// observations pushed to the back, one permutation between:
//   T_{(p,o)} = (<a_o| (x) Id_B) . S . (|rho_p> (x) Id_A)
// with S wired [C' ++ A] -> [D' ++ B].
struct FlatForm {
  Test prep;  // trivial -> C'
  PermutationSpec S;
  Test obs;  // D' -> trivial
  SystemType A, B;
  std::vector<std::vector<std::string>> labels;  // [prep outcome][obs outcome]

  SystemType Cp() const { return prep.out(); }
  SystemType Dp() const { return obs.in(); }

  void assert_wiring() const {
    if (S.input() != Cp().tensor(A))
      throw std::logic_error("flat form: S input is not [C' A]");
    if (S.output() != Dp().tensor(B))
      throw std::logic_error("flat form: S output is not [D' B]");
  }

  /// Event matrix for one (prep outcome, obs outcome) pair. S only routes
  /// wires, so the product is accumulated by walking index assignments
  /// instead of forming the (possibly huge) staged matrices.
  RatMatrix event(std::size_t p, std::size_t o) const {
    const std::size_t da = A.dim(), db = B.dim(), dcp = Cp().dim();
    const RatMatrix &col = prep.event(p);
    const RatMatrix &row = obs.event(o);
    RatMatrix m(db, da);
    for (std::size_t cp = 0; cp < dcp; ++cp) {
      const Rat &wp = col.at(cp, 0);
      if (wp == 0) continue;
      for (std::size_t a = 0; a < da; ++a) {
        const std::size_t out = S.apply_index(cp * da + a);
        const Rat &wo = row.at(0, out / db);
        if (wo == 0) continue;
        m.at(out % db, a) += wp * wo;
      }
    }
    return m;
  }
};

namespace detail {

// True when the represented test is the trivial identity (trivial input and
// output, a single outcome, and a unit scalar event). The internal C'/D'
// registers may still be nontrivial; they carry no outcome in that case.
inline bool is_flat_trivial_identity(const FlatForm &f) {
  return f.A.is_trivial() && f.B.is_trivial() &&
         f.prep.outcome_count() == 1 && f.obs.outcome_count() == 1 &&
         f.event(0, 0).at(0, 0) == 1;
}

inline std::vector<std::vector<std::string>> merge_labels(
    const FlatForm &f, const FlatForm &g, bool seq) {
  const std::size_t npf = f.prep.outcome_count(), npg = g.prep.outcome_count();
  const std::size_t nof = f.obs.outcome_count(), nog = g.obs.outcome_count();
  std::vector<std::vector<std::string>> out(npf * npg,
                                            std::vector<std::string>(nof * nog));
  for (std::size_t pf = 0; pf < npf; ++pf)
    for (std::size_t pg = 0; pg < npg; ++pg)
      for (std::size_t of = 0; of < nof; ++of)
        for (std::size_t og = 0; og < nog; ++og) {
          // seq prep merge is (g outer, f inner); par is (f outer, g inner)
          std::size_t p = seq ? pg * npf + pf : pf * npg + pg;
          std::size_t o = of * nog + og;
          out[p][o] = f.labels[pf][of] + "." + g.labels[pg][og];
        }
  return out;
}

}  // namespace detail

/// `f` then `g`; preparations merge as rho_g (x) rho_f, observations as
/// a_f (x) a_g, and the permutation routes f's outputs through g.
inline FlatForm flat_seq(const FlatForm &f, const FlatForm &g) {
  if (f.B != g.A)
    throw TypeError("flat sequential mismatch: " + f.B.to_string() + " vs " +
                    g.A.to_string());
  const std::size_t cf_n = f.Cp().factor_count(), cg_n = g.Cp().factor_count();
  const std::size_t a_n = f.A.factor_count();
  const std::size_t df_n = f.Dp().factor_count(), dg_n = g.Dp().factor_count();

  auto through_g = [&](std::size_t g_slot) -> std::size_t {
    std::size_t gs = g.S.mapping()[g_slot];
    return gs < dg_n ? df_n + gs : df_n + dg_n + (gs - dg_n);
  };
  auto through_f = [&](std::size_t f_slot) -> std::size_t {
    std::size_t fs = f.S.mapping()[f_slot];
    return fs < df_n ? fs : through_g(cg_n + (fs - df_n));
  };

  FlatForm r;
  r.prep = compose_par(g.prep, f.prep);
  r.obs = compose_par(f.obs, g.obs);
  r.A = f.A;
  r.B = g.B;
  std::vector<std::size_t> m(cg_n + cf_n + a_n);
  for (std::size_t i = 0; i < cg_n; ++i) m[i] = through_g(i);
  for (std::size_t j = 0; j < cf_n + a_n; ++j) m[cg_n + j] = through_f(j);
  r.S = PermutationSpec(g.Cp().tensor(f.Cp()).tensor(f.A), std::move(m));
  r.labels = detail::merge_labels(f, g, true);
  r.assert_wiring();
  return r;
}

/// `f` beside `g` (f on top). Mirrors the evaluator: a trivial identity
/// operand is a strict no-op, so its labels leave no trace.
inline FlatForm flat_par(const FlatForm &f, const FlatForm &g) {
  if (detail::is_flat_trivial_identity(g)) return f;
  if (detail::is_flat_trivial_identity(f)) return g;
  const std::size_t cf_n = f.Cp().factor_count(), cg_n = g.Cp().factor_count();
  const std::size_t af_n = f.A.factor_count(), ag_n = g.A.factor_count();
  const std::size_t df_n = f.Dp().factor_count(), dg_n = g.Dp().factor_count();
  const std::size_t bf_n = f.B.factor_count();

  auto through_f = [&](std::size_t f_slot) -> std::size_t {
    std::size_t fs = f.S.mapping()[f_slot];
    return fs < df_n ? fs : df_n + dg_n + (fs - df_n);
  };
  auto through_g = [&](std::size_t g_slot) -> std::size_t {
    std::size_t gs = g.S.mapping()[g_slot];
    return gs < dg_n ? df_n + gs : df_n + dg_n + bf_n + (gs - dg_n);
  };

  FlatForm r;
  r.prep = compose_par(f.prep, g.prep);
  r.obs = compose_par(f.obs, g.obs);
  r.A = f.A.tensor(g.A);
  r.B = f.B.tensor(g.B);
  std::vector<std::size_t> m(cf_n + cg_n + af_n + ag_n);
  for (std::size_t i = 0; i < cf_n; ++i) m[i] = through_f(i);
  for (std::size_t i = 0; i < cg_n; ++i) m[cf_n + i] = through_g(i);
  for (std::size_t k = 0; k < af_n; ++k) m[cf_n + cg_n + k] = through_f(cf_n + k);
  for (std::size_t k = 0; k < ag_n; ++k)
    m[cf_n + cg_n + af_n + k] = through_g(cg_n + k);
  r.S = PermutationSpec(f.Cp().tensor(g.Cp()).tensor(f.A).tensor(g.A), std::move(m));
  r.labels = detail::merge_labels(f, g, false);
  r.assert_wiring();
  return r;
}

/// Splits the flat permutation across the (C'|A) -> (D'|B) cut and absorbs
/// the two inner sorting stages into prep and obs.
inline CanonicalForm flat_to_canonical(const FlatForm &f) {
  f.assert_wiring();
  const std::size_t cut_in = f.Cp().factor_count();
  const std::size_t cut_out = f.Dp().factor_count();
  BipartiteDecomposition d = decompose_bipartite(f.S, cut_in, cut_out);

  CanonicalForm cf;
  cf.A = f.A;
  cf.B = f.B;
  cf.C = d.Ap;    // C'-factors observed on the left
  cf.Bp = d.App;  // C'-factors surviving to the output
  cf.Ap = d.Bp;   // input factors observed on the left
  cf.E = d.Bpp;   // input factors surviving to the output
  cf.S1 = d.S1;
  cf.S2 = d.S2;

  // d.S3 sorts C' into [C ++ B']; push it into the preparation. A
  // permutation acting on a column is an index relabelling.
  std::vector<std::pair<std::string, RatMatrix>> prep_events;
  prep_events.reserve(f.prep.outcome_count());
  for (std::size_t p = 0; p < f.prep.outcome_count(); ++p) {
    const RatMatrix &old_col = f.prep.event(p);
    RatMatrix col(old_col.rows(), 1);
    for (std::size_t i = 0; i < old_col.rows(); ++i)
      col.at(d.S3.apply_index(i), 0) = old_col.at(i, 0);
    prep_events.emplace_back(f.prep.label(p), std::move(col));
  }
  cf.prep = Test(SystemType::trivial(), cf.C.tensor(cf.Bp), std::move(prep_events));

  // d.S4 maps [C ++ A'] onto D'; pull it into the observation.
  std::vector<std::pair<std::string, RatMatrix>> obs_events;
  obs_events.reserve(f.obs.outcome_count());
  for (std::size_t o = 0; o < f.obs.outcome_count(); ++o) {
    const RatMatrix &old_row = f.obs.event(o);
    RatMatrix row(1, old_row.cols());
    for (std::size_t j = 0; j < old_row.cols(); ++j)
      row.at(0, j) = old_row.at(0, d.S4.apply_index(j));
    obs_events.emplace_back(f.obs.label(o), std::move(row));
  }
  cf.obs = Test(cf.C.tensor(cf.Ap), SystemType::trivial(), std::move(obs_events));

  cf.labels = f.labels;
  check_canonical(cf);
  return cf;
}

/// Inverse of flat_to_canonical up to wiring choices: rebuilds a FlatForm
/// with C' = [C ++ B'], D' = [C ++ A'] and the fused permutation.
inline FlatForm canonical_to_flat(const CanonicalForm &cf) {
  check_canonical(cf);
  const std::size_t nc = cf.C.factor_count();
  const std::size_t nbp = cf.Bp.factor_count(), nap = cf.Ap.factor_count();
  const std::size_t na = cf.A.factor_count();

  FlatForm r;
  r.prep = cf.prep;
  r.obs = cf.obs;
  r.A = cf.A;
  r.B = cf.B;
  r.labels = cf.labels;

  // wires [C ++ B' ++ A] -> [C ++ A' ++ B]
  std::vector<std::size_t> m(nc + nbp + na);
  for (std::size_t i = 0; i < nc; ++i) m[i] = i;
  for (std::size_t i = 0; i < nbp; ++i)
    m[nc + i] = nc + nap + cf.S2.mapping()[i];
  for (std::size_t j = 0; j < na; ++j) {
    std::size_t k = cf.S1.mapping()[j];
    m[nc + nbp + j] = k < nap ? nc + k : nc + nap + cf.S2.mapping()[nbp + (k - nap)];
  }
  r.S = PermutationSpec(cf.C.tensor(cf.Bp).tensor(cf.A), std::move(m));
  r.assert_wiring();
  return r;
}

}  // namespace optmct
