// Copyright 2026 optmct Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Compatibility of observation tests on a simplicial system: a joint test
// whose coarse-grainings reproduce both marginals exactly. The product
// construction always succeeds; the min/max recipe is reproduced as printed
// and shielded by verification; the feasibility route re-derives a joint by
// exact pivoting.

#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "optmct/analysis/lp.hpp"
#include "optmct/test.hpp"

namespace optmct {

/// A joint observation test together with the partitions that coarse-grain
/// it back onto each marginal. Replay: coarse_grain(joint, to_a) == a and
/// coarse_grain(joint, to_b) == b, exactly.
struct CompatibilityWitness {
  Test joint;
  std::vector<std::pair<std::string, std::vector<std::string>>> to_a;
  std::vector<std::pair<std::string, std::vector<std::string>>> to_b;
};

/// A construction that produced an invalid family: the first violated
/// identity, plus the attempted effect rows for inspection.
struct ConstructionFailure {
  std::string violated;
  std::vector<std::pair<std::string, RatMatrix>> attempted;
};

namespace detail {

inline void require_observation_pair(const Test &a, const Test &b) {
  if (!is_observation_test(a) || !is_observation_test(b))
    throw TypeError("compatibility is defined for observation tests");
  if (a.in() != b.in())
    throw TypeError("observation tests live on different systems: " +
                    a.in().to_string() + " vs " + b.in().to_string());
}

/// Builds the witness around a prepared joint family, with outcome labels
/// "x.y" and index-aligned partitions; verifies both marginals by replay.
inline CompatibilityWitness assemble_joint(
    const Test &a, const Test &b,
    std::vector<std::pair<std::string, RatMatrix>> events) {
  CompatibilityWitness w{Test(a.in(), SystemType::trivial(), std::move(events)),
                         {},
                         {}};
  for (std::size_t x = 0; x < a.outcome_count(); ++x) {
    std::vector<std::string> block;
    for (std::size_t y = 0; y < b.outcome_count(); ++y)
      block.push_back(a.label(x) + "." + b.label(y));
    w.to_a.emplace_back(a.label(x), std::move(block));
  }
  for (std::size_t y = 0; y < b.outcome_count(); ++y) {
    std::vector<std::string> block;
    for (std::size_t x = 0; x < a.outcome_count(); ++x)
      block.push_back(a.label(x) + "." + b.label(y));
    w.to_b.emplace_back(b.label(y), std::move(block));
  }
  if (!(coarse_grain(w.joint, w.to_a) == a) ||
      !(coarse_grain(w.joint, w.to_b) == b))
    throw InvariantError("joint witness failed to reproduce its marginals");
  return w;
}

}  // namespace detail

/// The product joint: c_{(x,y)}(j) = a_x(j) b_y(j), outcomes x-major. On a
/// simplicial system this always yields a valid joint with exact marginals,
/// so any two observation tests are compatible.
inline CompatibilityWitness joint_product(const Test &a, const Test &b) {
  detail::require_observation_pair(a, b);
  const std::size_t d = a.in().dim();
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (std::size_t x = 0; x < a.outcome_count(); ++x)
    for (std::size_t y = 0; y < b.outcome_count(); ++y) {
      RatMatrix row(1, d);
      for (std::size_t j = 0; j < d; ++j)
        row.at(0, j) = a.event(x).at(0, j) * b.event(y).at(0, j);
      events.emplace_back(a.label(x) + "." + b.label(y), std::move(row));
    }
  return detail::assemble_joint(a, b, std::move(events));
}

/// The min/max recipe, as printed: pair outcomes by index (a singleton test
/// is broadcast over the other's index set), set r^i(j) = min of the paired
/// coefficients and s^i(j) = max - min, and emit the family {r^i_j <j|,
/// s^i_j <j|}. The family is then verified: outcome validity, then both
/// marginals under the index-aligned partitions V_i = {r^i, s^i}. The first
/// violated identity is reported as a ConstructionFailure; the product
/// construction remains the guaranteed route.
inline std::variant<CompatibilityWitness, ConstructionFailure> joint_minmax(
    const Test &a, const Test &b) {
  detail::require_observation_pair(a, b);
  const std::size_t na = a.outcome_count(), nb = b.outcome_count();
  if (na != nb && na != 1 && nb != 1)
    return ConstructionFailure{
        "outcome counts " + std::to_string(na) + " and " + std::to_string(nb) +
            " cannot be paired by index and neither test is a singleton",
        {}};
  const std::size_t n = na > nb ? na : nb;
  const std::size_t d = a.in().dim();

  auto arow = [&](std::size_t i) { return a.event(na == 1 ? 0 : i); };
  auto brow = [&](std::size_t i) { return b.event(nb == 1 ? 0 : i); };

  std::vector<std::pair<std::string, RatMatrix>> events;
  for (std::size_t i = 0; i < n; ++i) {
    RatMatrix r(1, d), s(1, d);
    for (std::size_t j = 0; j < d; ++j) {
      const Rat &p = arow(i).at(0, j);
      const Rat &q = brow(i).at(0, j);
      r.at(0, j) = p < q ? p : q;
      s.at(0, j) = (p < q ? q : p) - r.at(0, j);
    }
    events.emplace_back("r#" + std::to_string(i), std::move(r));
    events.emplace_back("s#" + std::to_string(i), std::move(s));
  }

  // Validity: the effects must sum to the deterministic effect.
  for (std::size_t j = 0; j < d; ++j) {
    Rat total(0);
    for (const auto &[lbl, row] : events) total += row.at(0, j);
    if (total != 1)
      return ConstructionFailure{"family is not an observation test: column " +
                                     std::to_string(j) + " sums to " +
                                     rat_to_string(total) + ", expected 1",
                                 events};
  }

  // Marginals under the index-aligned blocks.
  auto check_marginal = [&](const Test &t, bool broadcast,
                            const char *name) -> std::string {
    for (std::size_t i = 0; i < n; ++i) {
      const RatMatrix &want = t.event(broadcast ? 0 : i);
      for (std::size_t j = 0; j < d; ++j) {
        Rat got = events[2 * i].second.at(0, j) + events[2 * i + 1].second.at(0, j);
        if (broadcast) continue;  // a broadcast marginal has no block identity
        if (got != want.at(0, j))
          return std::string("block ") + std::to_string(i) +
                 " does not reproduce marginal " + name + " at vertex " +
                 std::to_string(j) + ": " + rat_to_string(got) + " vs " +
                 rat_to_string(want.at(0, j));
      }
    }
    return {};
  };
  if (std::string err = check_marginal(a, na == 1, "a"); !err.empty())
    return ConstructionFailure{err, events};
  if (std::string err = check_marginal(b, nb == 1, "b"); !err.empty())
    return ConstructionFailure{err, events};

  // A singleton side that survived validity forces n == 1 (its broadcast rows
  // make every column sum n), so index-aligned labels are well defined here.
  if (na != n || nb != n)
    throw InvariantError("min/max family validated with mismatched pairing");
  CompatibilityWitness w{Test(a.in(), SystemType::trivial(), std::move(events)),
                         {},
                         {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> block{"r#" + std::to_string(i),
                                   "s#" + std::to_string(i)};
    w.to_a.emplace_back(a.label(i), block);
    w.to_b.emplace_back(b.label(i), std::move(block));
  }
  if (!(coarse_grain(w.joint, w.to_a) == a) ||
      !(coarse_grain(w.joint, w.to_b) == b))
    throw InvariantError("min/max witness failed to reproduce its marginals");
  return w;
}

/// The feasibility route: per vertex j, an exact transportation problem with
/// row sums a_x(j) and column sums b_y(j), solved by rational pivoting. On a
/// simplicial system this is always feasible; an infeasible report on valid
/// input is a solver bug and aborts.
inline CompatibilityWitness joint_lp(const Test &a, const Test &b) {
  detail::require_observation_pair(a, b);
  const std::size_t na = a.outcome_count(), nb = b.outcome_count();
  const std::size_t d = a.in().dim();
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y)
      events.emplace_back(a.label(x) + "." + b.label(y), RatMatrix(1, d));

  for (std::size_t j = 0; j < d; ++j) {
    // Unknowns c_{(x,y)}(j), x-major. Marginal rows for a, then for b; the
    // shared total makes one row redundant, which the solver tolerates.
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> rhs;
    for (std::size_t x = 0; x < na; ++x) {
      std::vector<Rat> row(na * nb, Rat(0));
      for (std::size_t y = 0; y < nb; ++y) row[x * nb + y] = Rat(1);
      rows.push_back(std::move(row));
      rhs.push_back(a.event(x).at(0, j));
    }
    for (std::size_t y = 0; y < nb; ++y) {
      std::vector<Rat> row(na * nb, Rat(0));
      for (std::size_t x = 0; x < na; ++x) row[x * nb + y] = Rat(1);
      rows.push_back(std::move(row));
      rhs.push_back(b.event(y).at(0, j));
    }
    auto sol = solve_feasibility(std::move(rows), std::move(rhs));
    if (!sol)
      throw InvariantError(
          "transportation feasibility failed at vertex " + std::to_string(j) +
          " on valid observation tests; the pivoting solver is broken");
    for (std::size_t k = 0; k < na * nb; ++k) events[k].second.at(0, j) = (*sol)[k];
  }
  return detail::assemble_joint(a, b, std::move(events));
}

}  // namespace optmct
