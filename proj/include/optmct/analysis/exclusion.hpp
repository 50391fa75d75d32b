// Copyright 2026 optmct Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Exclusion: whether a test admits a dilation whose outcomes can be
// postprocessed back into a target test. A test that excludes the identity
// is intrinsically irreversible: no outcome-indexed postprocessing of any
// dilation restores the input. Verdicts are exact; witnesses replay through
// the core composition operations before being reported.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optmct/mct/membership.hpp"
#include "optmct/test.hpp"

namespace optmct {

/// T_x = |rho><a_x|: perform the observation, then reprepare rho. The
/// induced observation of the lifted test is a again, exactly.
inline Test lift_observation(const Test &a, const StateVector &rho) {
  if (!is_observation_test(a))
    throw TypeError("lift_observation expects an observation test");
  if (!rho.is_deterministic())
    throw TypeError("lift_observation expects a deterministic state");
  const std::size_t da = a.in().dim(), db = rho.sys.dim();
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (std::size_t x = 0; x < a.outcome_count(); ++x) {
    RatMatrix m(db, da);
    for (std::size_t i = 0; i < db; ++i)
      for (std::size_t j = 0; j < da; ++j)
        m.at(i, j) = rho.v[i] * a.event(x).at(0, j);
    events.emplace_back(a.label(x), std::move(m));
  }
  return Test(a.in(), rho.sys, std::move(events));
}

/// a_x = u_B T_x: the outcome statistics the test exposes on its input.
inline Test induced_observation(const Test &t) {
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (std::size_t x = 0; x < t.outcome_count(); ++x) {
    RatMatrix row(1, t.in().dim());
    for (std::size_t j = 0; j < t.in().dim(); ++j)
      row.at(0, j) = t.event(x).col_sum(j);
    events.emplace_back(t.label(x), std::move(row));
  }
  return Test(t.in(), SystemType::trivial(), std::move(events));
}

/// A reconstruction witness. The dilation refines the test on a larger
/// output B (x) env: discarding env and coarse-graining by the partition
/// gives the test back, while the per-outcome postprocessings sum against
/// the dilation to the target. Both identities are exact.
struct ExclusionWitness {
  Test dilation;    // A -> B (x) env
  SystemType env;   // the discarded register
  std::vector<std::pair<std::string, std::vector<std::string>>> partition;
  std::vector<std::pair<std::string, Test>> post;  // one per dilation outcome
};

struct ExclusionVerdict {
  enum class Kind { Excludes, DoesNotExclude, Unknown };
  Kind kind = Kind::Unknown;
  std::string certificate;                  // Excludes: why none can exist
  std::optional<ExclusionWitness> witness;  // DoesNotExclude
  std::string note;                         // Unknown: which bound was hit
};

/// Replays a witness against the defining equations. Returns false instead
/// of throwing so that callers can decide how hard to fail.
inline bool verify_exclusion_witness(const Test &t, const Test &target,
                                     const ExclusionWitness &w) {
  const std::size_t denv = w.env.dim();
  if (w.dilation.in() != t.in()) return false;
  if (w.dilation.out() != t.out().tensor(w.env)) return false;
  if (w.post.size() != w.dilation.outcome_count()) return false;

  // Recovery: discard env, coarse-grain by the partition, compare exactly.
  std::vector<std::pair<std::string, RatMatrix>> marg;
  for (std::size_t z = 0; z < w.dilation.outcome_count(); ++z) {
    const RatMatrix &d = w.dilation.event(z);
    RatMatrix m(t.out().dim(), t.in().dim());
    for (std::size_t b = 0; b < t.out().dim(); ++b)
      for (std::size_t a = 0; a < t.in().dim(); ++a) {
        Rat s(0);
        for (std::size_t e = 0; e < denv; ++e) s += d.at(b * denv + e, a);
        m.at(b, a) = s;
      }
    marg.emplace_back(w.dilation.label(z), std::move(m));
  }
  try {
    Test marginal(t.in(), t.out(), std::move(marg));
    if (!(coarse_grain(marginal, w.partition) == t)) return false;
  } catch (const std::exception &) {
    return false;
  }

  // Postprocessing: the composites must sum to the target, outcome by
  // outcome, with aligned labels.
  for (std::size_t z = 0; z < w.post.size(); ++z) {
    const auto &[lbl, p] = w.post[z];
    if (lbl != w.dilation.label(z)) return false;
    if (p.in() != w.dilation.out() || p.out() != target.out()) return false;
    if (p.outcome_count() != target.outcome_count()) return false;
    for (std::size_t y = 0; y < target.outcome_count(); ++y)
      if (p.label(y) != target.label(y)) return false;
  }
  for (std::size_t y = 0; y < target.outcome_count(); ++y) {
    RatMatrix sum(target.out().dim(), t.in().dim());
    for (std::size_t z = 0; z < w.post.size(); ++z)
      sum = sum + w.post[z].second.event(y) * w.dilation.event(z);
    if (!(sum == target.event(y))) return false;
  }
  return true;
}

namespace detail {

/// True when every column of m equals its first column.
inline bool columns_constant(const RatMatrix &m) {
  for (std::size_t c = 1; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r)
      if (m.at(r, c) != m.at(r, 0)) return false;
  return true;
}

/// The register-keeping reconstruction on a routing frame whose cores are
/// all column-constant, m_x u^T: the dilation prepares m_x beside the wires
/// while routing the measured register into env untouched, and a single
/// deterministic postprocessing discards the preparation and routes env
/// back. Each composite equals mass(m_x) times the identity.
inline ExclusionWitness keep_alive_witness(const Test &t,
                                           const RoutingFrame &fr,
                                           const std::vector<RatMatrix> &ms) {
  const std::size_t da = t.in().dim(), db = t.out().dim();
  const std::size_t dap = fr.ap.dim(), dbp = fr.bp.dim(), de = fr.e.dim();
  const PermutationSpec sa_inv = fr.sigma_a.inverse();
  const PermutationSpec sb_inv = fr.sigma_b.inverse();

  ExclusionWitness w;
  w.env = fr.ap;
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (std::size_t x = 0; x < t.outcome_count(); ++x) {
    RatMatrix c(db * dap, da);
    for (std::size_t a = 0; a < da; ++a) {
      const std::size_t ai = fr.sigma_a.apply_index(a);
      const std::size_t ap = ai / de, e = ai % de;
      for (std::size_t i = 0; i < dbp; ++i) {
        const Rat &v = ms[x].at(i, 0);
        if (v == 0) continue;
        const std::size_t b = sb_inv.apply_index(i * de + e);
        c.at(b * dap + ap, a) = v;
      }
    }
    events.emplace_back(t.label(x), std::move(c));
    w.partition.emplace_back(t.label(x),
                             std::vector<std::string>{t.label(x)});
  }
  w.dilation = Test(t.in(), t.out().tensor(fr.ap), std::move(events));

  RatMatrix pm(da, db * dap);
  for (std::size_t b = 0; b < db; ++b) {
    const std::size_t bi = fr.sigma_b.apply_index(b);
    const std::size_t e = bi % de;
    for (std::size_t ap = 0; ap < dap; ++ap)
      pm.at(sa_inv.apply_index(ap * de + e), b * dap + ap) = 1;
  }
  Test post(w.dilation.out(), t.in(), {{"*", pm}});
  for (std::size_t x = 0; x < t.outcome_count(); ++x) {
    // Composite proportional to the identity: the regime's refinement
    // discipline, checked exactly.
    RatMatrix comp = pm * w.dilation.event(x);
    Rat mass(0);
    for (std::size_t i = 0; i < dbp; ++i) mass += ms[x].at(i, 0);
    if (!(comp == RatMatrix::identity(da).scaled(mass)))
      throw InvariantError("register-keeping composite is not proportional "
                           "to the identity");
    w.post.emplace_back(t.label(x), post);
  }
  return w;
}

}  // namespace detail

/// Decides whether `t` excludes the identity: whether no dilation of `t`
/// admits an outcome-indexed postprocessing recovering Id on the input.
///
/// Within the wire-and-register regime (within_mct = true) the identity is
/// atomic, so a nontrivial induced observation already certifies exclusion;
/// a trivial one triggers a search for a register-keeping reconstruction
/// among the canonical-form dilations inside the caps. Witnesses replay
/// exactly; an exhausted search reports Unknown, never a guess. Outside the
/// regime (within_mct = false) outcome-conditioned repreparation always
/// reconstructs the identity from the vertex refinement, so nothing is
/// excluded.
inline ExclusionVerdict excludes_identity(const Test &t, bool within_mct,
                                          std::size_t ancilla_cap,
                                          std::size_t outcome_cap) {
  ExclusionVerdict v;
  const std::size_t da = t.in().dim();
  Test induced = induced_observation(t);
  std::size_t bad = t.outcome_count();
  for (std::size_t x = 0; x < induced.outcome_count() && bad == t.outcome_count();
       ++x) {
    const RatMatrix &row = induced.event(x);
    for (std::size_t j = 1; j < da; ++j)
      if (row.at(0, j) != row.at(0, 0)) {
        bad = x;
        break;
      }
  }
  const bool trivial_induced = bad == t.outcome_count();

  if (!within_mct) {
    // Conditioned postprocessing is freely available: refine to vertex
    // pieces, then reprepare whichever vertex was seen.
    ExclusionWitness w;
    w.env = SystemType::trivial();
    std::vector<std::pair<std::string, RatMatrix>> events;
    std::vector<std::vector<std::string>> blocks(t.outcome_count());
    std::vector<std::size_t> piece_vertex;
    for (std::size_t x = 0; x < t.outcome_count(); ++x)
      for (std::size_t j = 0; j < da; ++j) {
        bool zero = true;
        for (std::size_t r = 0; r < t.out().dim() && zero; ++r)
          if (t.event(x).at(r, j) != 0) zero = false;
        if (zero) continue;
        RatMatrix piece(t.out().dim(), da);
        for (std::size_t r = 0; r < t.out().dim(); ++r)
          piece.at(r, j) = t.event(x).at(r, j);
        std::string lbl = t.label(x) + "#" + std::to_string(j);
        blocks[x].push_back(lbl);
        piece_vertex.push_back(j);
        events.emplace_back(std::move(lbl), std::move(piece));
      }
    w.dilation = Test(t.in(), t.out(), std::move(events));
    for (std::size_t x = 0; x < t.outcome_count(); ++x)
      w.partition.emplace_back(t.label(x), std::move(blocks[x]));
    for (std::size_t z = 0; z < w.dilation.outcome_count(); ++z) {
      RatMatrix pm(da, t.out().dim());
      for (std::size_t c = 0; c < t.out().dim(); ++c)
        pm.at(piece_vertex[z], c) = 1;
      w.post.emplace_back(w.dilation.label(z),
                          Test(t.out(), t.in(), {{"*", pm}}));
    }
    if (!verify_exclusion_witness(t, identity_test(t.in()), w))
      throw InvariantError("vertex-refinement witness failed to replay");
    v.kind = ExclusionVerdict::Kind::DoesNotExclude;
    v.witness = std::move(w);
    v.note =
        "unrestricted regime: conditioned repreparation undoes any test";
    return v;
  }

  if (!trivial_induced) {
    v.kind = ExclusionVerdict::Kind::Excludes;
    v.certificate =
        "outcome '" + t.label(bad) +
        "' induces an effect that is not a multiple of the all-ones row; "
        "with the identity atomic, every reconstructible test has a trivial "
        "induced observation";
    if (da == t.out().dim() &&
        t.full_coarse_graining() == RatMatrix::identity(da) &&
        !is_atomic_identity_refinement(t))
      v.certificate +=
          "; the family even sums to the identity while refining it "
          "non-proportionally, so it lies outside the regime's test set";
    return v;
  }

  MembershipVerdict m = membership(t, ancilla_cap, outcome_cap);
  if (m.kind == MembershipVerdict::Kind::NotInMCT) {
    v.kind = ExclusionVerdict::Kind::Excludes;
    v.certificate =
        "no dilation inside the regime can reproduce the test, because the "
        "test is not of the regime at all: " + m.certificate;
    return v;
  }
  if (m.kind == MembershipVerdict::Kind::Unknown) {
    v.kind = ExclusionVerdict::Kind::Unknown;
    v.note = "membership of the test itself is unresolved at the caps: " +
             m.note;
    return v;
  }

  std::vector<RatMatrix> events;
  events.reserve(t.outcome_count());
  for (std::size_t x = 0; x < t.outcome_count(); ++x)
    events.push_back(t.event(x));
  for (const detail::Routing &r : detail::enumerate_routings(t.in(), t.out())) {
    detail::RoutingFrame fr = detail::make_frame(t.in(), t.out(), r);
    std::vector<RatMatrix> ms;
    if (!detail::factor_events(events, fr, ms)) continue;
    if (!detail::constant_column_total(ms)) continue;
    bool all_const = true;
    for (const RatMatrix &mx : ms)
      if (!detail::columns_constant(mx)) {
        all_const = false;
        break;
      }
    if (!all_const) continue;
    ExclusionWitness w = detail::keep_alive_witness(t, fr, ms);
    if (!verify_exclusion_witness(t, identity_test(t.in()), w))
      throw InvariantError("register-keeping witness failed to replay");
    v.kind = ExclusionVerdict::Kind::DoesNotExclude;
    v.witness = std::move(w);
    return v;
  }
  v.kind = ExclusionVerdict::Kind::Unknown;
  v.note =
      "trivial induced observation, but no register-keeping reconstruction "
      "exists on any wire routing; exclusion is undecided at this window";
  return v;
}

inline ExclusionVerdict excludes_identity(const Test &t, bool within_mct) {
  return excludes_identity(t, within_mct, t.in().dim() * t.out().dim(), 16);
}

/// Exclusion against an arbitrary target on the same input. A witness for
/// the identity composes into one for any target: append the target to each
/// postprocessing. A test that excludes the identity still excludes only
/// what the bounded search can certify, so non-identity targets come back
/// Unknown rather than guessed.
inline ExclusionVerdict excludes(const Test &t, const Test &target,
                                 std::size_t ancilla_cap,
                                 std::size_t outcome_cap) {
  if (target.in() != t.in())
    throw TypeError("exclusion target consumes " + target.in().to_string() +
                    " but the test consumes " + t.in().to_string());
  const bool identity_target =
      target.out() == target.in() && target.outcome_count() == 1 &&
      target.event(0) == RatMatrix::identity(target.in().dim());

  ExclusionVerdict base =
      excludes_identity(t, true, ancilla_cap, outcome_cap);
  if (base.kind == ExclusionVerdict::Kind::DoesNotExclude) {
    ExclusionWitness w = *base.witness;
    std::vector<std::pair<std::string, Test>> composed;
    for (auto &[lbl, p] : w.post) {
      if (p.outcome_count() != 1)
        throw InvariantError("identity witness with split postprocessing");
      std::vector<std::pair<std::string, RatMatrix>> evs;
      for (std::size_t y = 0; y < target.outcome_count(); ++y)
        evs.emplace_back(target.label(y),
                         target.event(y) * p.event(0));
      composed.emplace_back(lbl,
                            Test(p.in(), target.out(), std::move(evs)));
    }
    w.post = std::move(composed);
    if (!verify_exclusion_witness(t, target, w))
      throw InvariantError("composed target witness failed to replay");
    ExclusionVerdict v;
    v.kind = ExclusionVerdict::Kind::DoesNotExclude;
    v.witness = std::move(w);
    return v;
  }
  if (identity_target) return base;
  if (base.kind == ExclusionVerdict::Kind::Excludes) {
    ExclusionVerdict v;
    v.kind = ExclusionVerdict::Kind::Unknown;
    v.note =
        "the test excludes the identity, and exclusion relative to other "
        "targets is outside the bounded search";
    return v;
  }
  return base;  // Unknown propagates
}

inline ExclusionVerdict excludes(const Test &t, const Test &target) {
  return excludes(t, target, t.in().dim() * t.out().dim(), 16);
}

}  // namespace optmct
