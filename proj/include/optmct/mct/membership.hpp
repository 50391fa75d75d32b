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

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optmct/mct/ancilla.hpp"
#include "optmct/mct/canonical.hpp"

namespace optmct {

/// True iff the test refines the identity in the only way the theory allows:
/// full coarse-graining Id and every event a scalar multiple of Id. When
/// true and `probs` is given, it receives the scalars.
inline bool is_atomic_identity_refinement(const Test &t,
                                          std::vector<Rat> *probs = nullptr) {
  const std::size_t d = t.in().dim();
  if (d != t.out().dim())
    throw TypeError("identity refinement requires a square test, got " +
                    t.out().to_string() + "<-" + t.in().to_string());
  if (t.full_coarse_graining() != RatMatrix::identity(d)) return false;
  std::vector<Rat> ps;
  ps.reserve(t.outcome_count());
  for (std::size_t x = 0; x < t.outcome_count(); ++x) {
    const RatMatrix &e = t.event(x);
    const Rat p = e.at(0, 0);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        if (e.at(r, c) != (r == c ? p : Rat(0))) return false;
    ps.push_back(p);
  }
  if (probs) *probs = std::move(ps);
  return true;
}

namespace detail {

// One way of routing wires around the canonical template: `eb` lists the
// output factors forming E (in output order), `ea` the input factor paired
// with each of them.
struct Routing {
  std::vector<std::size_t> ea, eb;
};

// All routings for the given endpoint types, canonically ordered: larger
// dim(E) first, then lexicographic on eb, then on ea. The first fit in this
// order is the reported witness, independent of any search scheduling.
inline std::vector<Routing> enumerate_routings(const SystemType &a,
                                               const SystemType &b) {
  const std::size_t na = a.factor_count(), nb = b.factor_count();
  std::vector<Routing> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << nb); ++mask) {
    Routing r;
    for (std::size_t i = 0; i < nb; ++i)
      if (mask & (std::size_t{1} << i)) r.eb.push_back(i);
    // ordered selections of distinct input factors with matching dims
    std::vector<std::size_t> pick;
    std::vector<bool> used(na, false);
    auto rec = [&](auto &&self, std::size_t k) -> void {
      if (k == r.eb.size()) {
        out.push_back({pick, r.eb});
        return;
      }
      for (std::size_t f = 0; f < na; ++f) {
        if (used[f] || a.factors()[f] != b.factors()[r.eb[k]]) continue;
        used[f] = true;
        pick.push_back(f);
        self(self, k + 1);
        pick.pop_back();
        used[f] = false;
      }
    };
    rec(rec, 0);
  }
  auto dim_of = [&](const Routing &r) {
    std::size_t d = 1;
    for (std::size_t i : r.eb) d *= b.factors()[i];
    return d;
  };
  std::stable_sort(out.begin(), out.end(), [&](const Routing &x, const Routing &y) {
    const std::size_t dx = dim_of(x), dy = dim_of(y);
    if (dx != dy) return dx > dy;
    if (x.eb != y.eb) return x.eb < y.eb;
    return x.ea < y.ea;
  });
  return out;
}

// The routing instantiated on concrete types: sorting permutations, the
// residual registers, and E.
struct RoutingFrame {
  PermutationSpec sigma_a;  // A -> [A' ++ E]
  PermutationSpec sigma_b;  // B -> [B' ++ E]
  SystemType ap, bp, e;
};

inline RoutingFrame make_frame(const SystemType &a, const SystemType &b,
                               const Routing &r) {
  const std::size_t na = a.factor_count(), nb = b.factor_count();
  const std::size_t k = r.eb.size();
  std::vector<std::size_t> ma(na), mb(nb);
  std::vector<bool> in_ea(na, false), in_eb(nb, false);
  for (std::size_t i = 0; i < k; ++i) {
    in_ea[r.ea[i]] = true;
    in_eb[r.eb[i]] = true;
    ma[r.ea[i]] = (na - k) + i;
    mb[r.eb[i]] = (nb - k) + i;
  }
  std::size_t next = 0;
  std::vector<std::size_t> ap_f, bp_f, e_f;
  for (std::size_t f = 0; f < na; ++f)
    if (!in_ea[f]) {
      ma[f] = next++;
      ap_f.push_back(a.factors()[f]);
    }
  next = 0;
  for (std::size_t f = 0; f < nb; ++f)
    if (!in_eb[f]) {
      mb[f] = next++;
      bp_f.push_back(b.factors()[f]);
    }
  for (std::size_t i : r.eb) e_f.push_back(b.factors()[i]);
  RoutingFrame fr;
  fr.sigma_a = PermutationSpec(a, std::move(ma));
  fr.sigma_b = PermutationSpec(b, std::move(mb));
  fr.ap = SystemType(std::move(ap_f));
  fr.bp = SystemType(std::move(bp_f));
  fr.e = SystemType(std::move(e_f));
  return fr;
}

// Tries to factor every event through the frame as M_x (x) Id_E after the
// sorting permutations; fills `ms` on success.
inline bool factor_events(const std::vector<RatMatrix> &events,
                          const RoutingFrame &fr, std::vector<RatMatrix> &ms) {
  const std::size_t de = fr.e.dim();
  const std::size_t di = fr.ap.dim(), dout = fr.bp.dim();
  ms.clear();
  for (const RatMatrix &t : events) {
    RatMatrix tt(t.rows(), t.cols());
    for (std::size_t r = 0; r < t.rows(); ++r)
      for (std::size_t c = 0; c < t.cols(); ++c)
        tt.at(fr.sigma_b.apply_index(r), fr.sigma_a.apply_index(c)) = t.at(r, c);
    RatMatrix m(dout, di);
    for (std::size_t i = 0; i < dout; ++i)
      for (std::size_t j = 0; j < di; ++j) m.at(i, j) = tt.at(i * de, j * de);
    for (std::size_t i = 0; i < dout; ++i)
      for (std::size_t j = 0; j < di; ++j)
        for (std::size_t e1 = 0; e1 < de; ++e1)
          for (std::size_t e2 = 0; e2 < de; ++e2)
            if (tt.at(i * de + e1, j * de + e2) !=
                (e1 == e2 ? m.at(i, j) : Rat(0)))
              return false;
    ms.push_back(std::move(m));
  }
  return true;
}

// The totals column when the factored events sum to q u^T, nothing otherwise.
inline std::optional<std::vector<Rat>> constant_column_total(
    const std::vector<RatMatrix> &ms) {
  if (ms.empty()) return std::nullopt;
  const std::size_t rows = ms[0].rows(), cols = ms[0].cols();
  RatMatrix sum(rows, cols);
  for (const RatMatrix &m : ms)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) sum.at(r, c) += m.at(r, c);
  std::vector<Rat> q(rows);
  for (std::size_t r = 0; r < rows; ++r) q[r] = sum.at(r, 0);
  for (std::size_t c = 1; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r)
      if (sum.at(r, c) != q[r]) return std::nullopt;
  return q;
}

}  // namespace detail

/// A replayable membership witness: coarse-graining the canonical form's
/// semantics by the partition reproduces the queried test exactly.
struct MembershipWitness {
  CanonicalForm cf;
  std::vector<std::pair<std::string, std::vector<std::string>>> partition;
};

struct MembershipVerdict {
  enum class Kind { InMCT, NotInMCT, Unknown };
  Kind kind = Kind::Unknown;
  std::optional<MembershipWitness> witness;  // InMCT
  std::string certificate;                   // NotInMCT: violated condition
  std::string note;                          // Unknown: which bound was hit
};

namespace detail {

// Builds the trivial-C witness for a frame whose events factor as
// M_x (x) Id_E with column-constant total q: the preparation emits weighted
// vertices q_i |i>, the observation cuts each column j at the overlaid
// running totals of M_x(i,j)/q_i, and the partition reassembles the pieces.
inline MembershipWitness cut_witness(const Test &t, const RoutingFrame &fr,
                                     const std::vector<RatMatrix> &ms,
                                     const std::vector<Rat> &q) {
  const std::size_t di = fr.ap.dim(), dout = fr.bp.dim();
  const std::size_t nx = ms.size();

  MembershipWitness w;
  w.cf.A = t.in();
  w.cf.B = t.out();
  w.cf.Ap = fr.ap;
  w.cf.Bp = fr.bp;
  w.cf.C = SystemType::trivial();
  w.cf.E = fr.e;
  w.cf.S1 = fr.sigma_a;
  w.cf.S2 = fr.sigma_b.inverse();

  std::vector<std::size_t> rows;  // i with q_i > 0
  std::vector<std::pair<std::string, StateVector>> states;
  for (std::size_t i = 0; i < dout; ++i) {
    if (q[i] == 0) continue;
    std::vector<Rat> v(dout);
    v[i] = q[i];
    states.emplace_back("q" + std::to_string(i), StateVector{fr.bp, std::move(v)});
    rows.push_back(i);
  }
  w.cf.prep = preparation_test(fr.bp, std::move(states));

  struct Piece {
    std::size_t j;
    std::vector<std::size_t> bin_of_row;
    std::string label;
  };
  std::vector<Piece> pieces;
  std::vector<std::pair<std::string, EffectVector>> effects;
  for (std::size_t j = 0; j < di; ++j) {
    std::vector<Rat> cuts;
    for (std::size_t i : rows) {
      Rat acc(0);
      for (std::size_t x = 0; x + 1 < nx; ++x) {
        acc += ms[x].at(i, j) / q[i];
        cuts.push_back(acc);
      }
    }
    cuts.push_back(Rat(1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Rat lo(0);
    std::size_t tcount = 0;
    for (const Rat &hi : cuts) {
      if (hi == lo) continue;
      Piece pc;
      pc.j = j;
      pc.bin_of_row.resize(rows.size());
      for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        Rat acc(0);
        std::size_t bin = nx - 1;
        for (std::size_t x = 0; x + 1 < nx; ++x) {
          acc += ms[x].at(rows[ri], j) / q[rows[ri]];
          if (lo < acc) {
            bin = x;
            break;
          }
        }
        pc.bin_of_row[ri] = bin;
      }
      pc.label = "c" + std::to_string(j) + "#" + std::to_string(tcount++);
      std::vector<Rat> v(di);
      v[j] = hi - lo;
      effects.emplace_back(pc.label, EffectVector{fr.ap, std::move(v)});
      pieces.push_back(std::move(pc));
      lo = hi;
    }
  }
  w.cf.obs = observation_test(fr.ap, std::move(effects));
  w.cf.labels = product_labels(w.cf.prep, w.cf.obs);
  check_canonical(w.cf);

  for (std::size_t x = 0; x < nx; ++x) {
    std::vector<std::string> block;
    for (std::size_t ri = 0; ri < rows.size(); ++ri)
      for (const Piece &pc : pieces)
        if (pc.bin_of_row[ri] == x)
          block.push_back("q" + std::to_string(rows[ri]) + "." + pc.label);
    w.partition.emplace_back(t.label(x), std::move(block));
  }
  return w;
}

}  // namespace detail

/// Decides whether `t` is a test of the minimal theory.
///
/// Any test of the theory is, after removing its internal register, of the
/// template shape: its events simultaneously factor as S2 (M_x (x) Id_E) S1
/// along some wire routing, with the M_x summing to a column-constant q u^T.
/// The search enumerates routings; a fit yields a replayable witness by
/// column cutting, no fit anywhere is a certificate. Atomicity of the
/// identity is checked first: it needs no search and gives the sharper
/// certificate. Witnesses larger than the caps yield Unknown, since the
/// verdict is defined relative to the searched window.
inline MembershipVerdict membership(const Test &t, std::size_t ancilla_cap,
                                    std::size_t outcome_cap) {
  MembershipVerdict v;
  const std::size_t d = t.in().dim();
  if (d == t.out().dim() &&
      t.full_coarse_graining() == RatMatrix::identity(d)) {
    std::vector<Rat> probs;
    if (!is_atomic_identity_refinement(t, &probs)) {
      for (std::size_t x = 0; x < t.outcome_count(); ++x) {
        const RatMatrix &e = t.event(x);
        bool prop = true;
        const Rat p = e.at(0, 0);
        for (std::size_t r = 0; r < d && prop; ++r)
          for (std::size_t c = 0; c < d && prop; ++c)
            if (e.at(r, c) != (r == c ? p : Rat(0))) prop = false;
        if (!prop) {
          v.kind = MembershipVerdict::Kind::NotInMCT;
          v.certificate =
              "full coarse-graining is the identity but outcome '" +
              t.label(x) +
              "' is not a multiple of it; refinements of the identity must "
              "be of the form {p_x Id}";
          return v;
        }
      }
    }
  }

  std::vector<RatMatrix> events;
  events.reserve(t.outcome_count());
  for (std::size_t x = 0; x < t.outcome_count(); ++x) events.push_back(t.event(x));

  bool any_fit = false;
  for (const detail::Routing &r : detail::enumerate_routings(t.in(), t.out())) {
    detail::RoutingFrame fr = detail::make_frame(t.in(), t.out(), r);
    std::vector<RatMatrix> ms;
    if (!detail::factor_events(events, fr, ms)) continue;
    auto q = detail::constant_column_total(ms);
    if (!q) continue;
    any_fit = true;
    MembershipWitness w = detail::cut_witness(t, fr, ms, *q);
    if (w.cf.C.dim() > ancilla_cap ||
        w.cf.prep.outcome_count() > outcome_cap ||
        w.cf.obs.outcome_count() > outcome_cap)
      continue;  // maybe a later routing cuts smaller
    if (!(coarse_grain(semantics(w.cf), w.partition) == t))
      throw InvariantError("membership witness failed to replay");
    v.kind = MembershipVerdict::Kind::InMCT;
    v.witness = std::move(w);
    return v;
  }
  if (any_fit) {
    v.kind = MembershipVerdict::Kind::Unknown;
    v.note = "a template fit exists but every witness exceeds the caps";
  } else {
    v.kind = MembershipVerdict::Kind::NotInMCT;
    v.certificate =
        "no routing of input/output wires factors all events as M (x) Id "
        "with a column-constant total, which the template shape requires";
  }
  return v;
}

inline MembershipVerdict membership(const Test &t) {
  return membership(t, t.in().dim() * t.out().dim(), 16);
}

/// The deterministic-channel template: S2 (|rho><u| on A'->B' (x) Id_E) S1.
struct DeterministicForm {
  PermutationSpec S1, S2;
  SystemType Ap, Bp, E;
  StateVector rho;
};

/// Writes a deterministic event in the template shape when a wire routing
/// admits it. Identity-shaped channels get the all-of-A environment.
inline std::optional<DeterministicForm> deterministic_form(
    const ClassicalEvent &t) {
  if (!t.is_deterministic())
    throw TypeError("deterministic form requires a deterministic event");
  std::vector<RatMatrix> events{t.m};
  for (const detail::Routing &r : detail::enumerate_routings(t.in, t.out)) {
    detail::RoutingFrame fr = detail::make_frame(t.in, t.out, r);
    std::vector<RatMatrix> ms;
    if (!detail::factor_events(events, fr, ms)) continue;
    const RatMatrix &m = ms[0];
    std::vector<Rat> col(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) col[i] = m.at(i, 0);
    bool constant = true;
    for (std::size_t c = 1; c < m.cols() && constant; ++c)
      for (std::size_t i = 0; i < m.rows(); ++i)
        if (m.at(i, c) != col[i]) {
          constant = false;
          break;
        }
    if (!constant) continue;
    DeterministicForm df{fr.sigma_a, fr.sigma_b.inverse(), fr.ap, fr.bp, fr.e,
                         StateVector{fr.bp, std::move(col)}};
    return df;
  }
  return std::nullopt;
}

/// The pigeonhole core of subsequence stabilization: the largest class of
/// list positions sharing (S1, S2, A', B', E); first seen wins ties. When
/// every member of the class carries a deterministic preparation, their
/// state sequence is returned too.
struct StabilizationResult {
  PermutationSpec S1, S2;
  SystemType Ap, Bp, E;
  std::vector<std::size_t> indices;
  std::optional<std::vector<StateVector>> prep_states;
};

inline StabilizationResult stabilize_subsequence(
    const std::vector<CanonicalForm> &seq) {
  if (seq.empty())
    throw std::invalid_argument("stabilization needs a non-empty sequence");
  for (const CanonicalForm &cf : seq)
    if (cf.A != seq[0].A || cf.B != seq[0].B)
      throw TypeError("stabilization requires a single test type");

  auto key_of = [](const CanonicalForm &cf) {
    std::string k = cf.Ap.to_string() + "|" + cf.Bp.to_string() + "|" +
                    cf.E.to_string() + "|";
    for (std::size_t s : cf.S1.mapping()) k += std::to_string(s) + ",";
    k += "|";
    for (std::size_t s : cf.S2.mapping()) k += std::to_string(s) + ",";
    return k;
  };

  std::map<std::string, std::vector<std::size_t>> classes;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::string k = key_of(seq[i]);
    auto [it, fresh] = classes.try_emplace(k);
    if (fresh) order.push_back(k);
    it->second.push_back(i);
  }
  const std::string *best = &order[0];
  for (const std::string &k : order)
    if (classes[k].size() > classes[*best].size()) best = &k;

  const std::vector<std::size_t> &idx = classes[*best];
  const CanonicalForm &rep = seq[idx[0]];
  StabilizationResult r{rep.S1, rep.S2, rep.Ap, rep.Bp, rep.E, idx, std::nullopt};

  bool det = true;
  for (std::size_t i : idx)
    if (seq[i].prep.outcome_count() != 1 ||
        seq[i].prep.event(0).col_sum(0) != 1)
      det = false;
  if (det) {
    std::vector<StateVector> states;
    for (std::size_t i : idx) {
      const RatMatrix &col = seq[i].prep.event(0);
      std::vector<Rat> v(col.rows());
      for (std::size_t j = 0; j < col.rows(); ++j) v[j] = col.at(j, 0);
      states.emplace_back(seq[i].prep.out(), std::move(v));
    }
    r.prep_states = std::move(states);
  }
  return r;
}

}  // namespace optmct
