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

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "optmct/event.hpp"

namespace optmct {

// An outcome-indexed collection of events with deterministic full
// coarse-graining. Outcome labels are ordered and unique.
class Test {
 public:
  Test() = default;

  /// Checked constructor: enforces shapes, nonnegativity and a deterministic
  /// full coarse-graining (column sums of the event sum equal to 1).
  Test(SystemType in, SystemType out,
       std::vector<std::pair<std::string, RatMatrix>> events)
      : Test(std::move(in), std::move(out), std::move(events), true) {}

  /// Builds without invariant checks; pair with validate().
  static Test make_unchecked(SystemType in, SystemType out,
                             std::vector<std::pair<std::string, RatMatrix>> events) {
    return Test(std::move(in), std::move(out), std::move(events), false);
  }

  const SystemType &in() const { return in_; }
  const SystemType &out() const { return out_; }
  const std::vector<std::pair<std::string, RatMatrix>> &events() const { return events_; }
  std::size_t outcome_count() const { return events_.size(); }

  const RatMatrix &event(std::size_t i) const { return events_.at(i).second; }
  const std::string &label(std::size_t i) const { return events_.at(i).first; }

  RatMatrix full_coarse_graining() const {
    RatMatrix sum(out_.dim(), in_.dim());
    for (const auto &[lbl, m] : events_) sum = sum + m;
    return sum;
  }

  bool operator==(const Test &o) const {
    return in_ == o.in_ && out_ == o.out_ && events_ == o.events_;
  }

  /// Label-keyed event map; outcome order is forgotten.
  std::map<std::string, RatMatrix> event_map() const {
    std::map<std::string, RatMatrix> m;
    for (const auto &[lbl, ev] : events_) m.emplace(lbl, ev);
    return m;
  }

  /// Equality up to outcome order: same types, same label set, same matrices.
  bool same_semantics(const Test &o) const {
    return in_ == o.in_ && out_ == o.out_ && event_map() == o.event_map();
  }

 private:
  Test(SystemType in, SystemType out,
       std::vector<std::pair<std::string, RatMatrix>> events, bool check)
      : in_(std::move(in)), out_(std::move(out)), events_(std::move(events)) {
    if (!check) return;
    if (events_.empty()) throw InvariantError("test with no outcomes");
    std::set<std::string> seen;
    for (const auto &[lbl, m] : events_) {
      if (!seen.insert(lbl).second)
        throw InvariantError("duplicate outcome label '" + lbl + "'");
      // Event constructor enforces shape and per-event invariants.
      ClassicalEvent check_event(in_, out_, m);
    }
    RatMatrix sum = full_coarse_graining();
    for (std::size_t c = 0; c < sum.cols(); ++c)
      if (sum.col_sum(c) != 1)
        throw InvariantError("full coarse-graining is not deterministic at column " +
                             std::to_string(c));
  }

  SystemType in_;
  SystemType out_;
  std::vector<std::pair<std::string, RatMatrix>> events_;
};

/// True when the test is a preparation test: trivial input, total weight 1.
inline bool is_preparation_test(const Test &t) { return t.in().is_trivial(); }

/// True when the test is an observation test: trivial output, effects sum to u.
inline bool is_observation_test(const Test &t) { return t.out().is_trivial(); }

inline Test identity_test(const SystemType &sys) {
  return Test(sys, sys, {{"*", RatMatrix::identity(sys.dim())}});
}

inline Test preparation_test(const SystemType &sys,
                             std::vector<std::pair<std::string, StateVector>> states) {
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (auto &[lbl, st] : states) {
    if (st.sys != sys) throw TypeError("preparation state on wrong system");
    events.emplace_back(lbl, st.as_column());
  }
  return Test(SystemType::trivial(), sys, std::move(events));
}

inline Test observation_test(const SystemType &sys,
                             std::vector<std::pair<std::string, EffectVector>> effects) {
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (auto &[lbl, ef] : effects) {
    if (ef.sys != sys) throw TypeError("observation effect on wrong system");
    events.emplace_back(lbl, ef.as_row());
  }
  return Test(sys, SystemType::trivial(), std::move(events));
}

namespace detail {
/// The singleton scalar identity on the trivial system; parallel composition
/// with it is defined as a strict no-op.
inline bool is_trivial_identity(const Test &t) {
  return t.in().is_trivial() && t.out().is_trivial() && t.outcome_count() == 1 &&
         t.event(0).at(0, 0) == 1;
}
}  // namespace detail

/// Sequential composition: `first` then `second`. Outcomes form the Cartesian
/// product labelled "x.y" with x from `first`.
inline Test compose_seq(const Test &first, const Test &second) {
  if (first.out() != second.in())
    throw TypeError("sequential composition type mismatch: " +
                    first.out().to_string() + " vs " + second.in().to_string());
  std::vector<std::pair<std::string, RatMatrix>> events;
  events.reserve(first.outcome_count() * second.outcome_count());
  for (std::size_t x = 0; x < first.outcome_count(); ++x)
    for (std::size_t y = 0; y < second.outcome_count(); ++y)
      events.emplace_back(first.label(x) + "." + second.label(y),
                          second.event(y) * first.event(x));
  return Test(first.in(), second.out(), std::move(events));
}

/// Parallel composition: `left` beside `right` (left factors first). The
/// trivial identity is a strict no-op.
inline Test compose_par(const Test &left, const Test &right) {
  if (detail::is_trivial_identity(right)) return left;
  if (detail::is_trivial_identity(left)) return right;
  std::vector<std::pair<std::string, RatMatrix>> events;
  events.reserve(left.outcome_count() * right.outcome_count());
  for (std::size_t x = 0; x < left.outcome_count(); ++x)
    for (std::size_t y = 0; y < right.outcome_count(); ++y)
      events.emplace_back(left.label(x) + "." + right.label(y),
                          left.event(x).kron(right.event(y)));
  return Test(left.in().tensor(right.in()), left.out().tensor(right.out()),
              std::move(events));
}

/// Sums events over partition blocks. Blocks must be disjoint and cover the
/// outcome set; block order gives the new outcome order.
inline Test coarse_grain(const Test &t,
                         const std::vector<std::pair<std::string, std::vector<std::string>>> &partition) {
  std::map<std::string, RatMatrix> evs = t.event_map();
  std::set<std::string> used;
  std::vector<std::pair<std::string, RatMatrix>> events;
  for (const auto &[new_label, block] : partition) {
    RatMatrix sum(t.out().dim(), t.in().dim());
    for (const auto &old_label : block) {
      auto it = evs.find(old_label);
      if (it == evs.end())
        throw std::invalid_argument("partition names unknown outcome '" + old_label + "'");
      if (!used.insert(old_label).second)
        throw std::invalid_argument("partition blocks overlap at '" + old_label + "'");
      sum = sum + it->second;
    }
    events.emplace_back(new_label, std::move(sum));
  }
  if (used.size() != t.outcome_count())
    throw std::invalid_argument("partition does not cover the outcome set");
  return Test(t.in(), t.out(), std::move(events));
}

/// Joint outcome distribution of prep -> t -> obs, keyed "x.y".
inline std::vector<std::pair<std::string, Rat>> probability(const StateVector &prep,
                                                            const Test &t,
                                                            const Test &obs) {
  if (prep.sys != t.in())
    throw TypeError("probability: state system " + prep.sys.to_string() +
                    " does not match test input " + t.in().to_string());
  if (!is_observation_test(obs) || obs.in() != t.out())
    throw TypeError("probability: observation test must consume " + t.out().to_string());
  std::vector<std::pair<std::string, Rat>> result;
  RatMatrix col = prep.as_column();
  for (std::size_t x = 0; x < t.outcome_count(); ++x) {
    RatMatrix pushed = t.event(x) * col;
    for (std::size_t y = 0; y < obs.outcome_count(); ++y) {
      RatMatrix p = obs.event(y) * pushed;
      result.emplace_back(t.label(x) + "." + obs.label(y), p.at(0, 0));
    }
  }
  return result;
}

struct ValidityReport {
  bool valid = true;
  std::vector<std::string> violations;

  void flag(const std::string &what) {
    valid = false;
    violations.push_back(what);
  }
};

/// Reports every invariant violation; never throws.
inline ValidityReport validate(const Test &t) {
  ValidityReport report;
  if (t.outcome_count() == 0) {
    report.flag("test has no outcomes");
    return report;
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.outcome_count(); ++i) {
    const auto &lbl = t.label(i);
    const auto &m = t.event(i);
    if (!seen.insert(lbl).second) report.flag("duplicate outcome label '" + lbl + "'");
    if (m.rows() != t.out().dim() || m.cols() != t.in().dim()) {
      report.flag("outcome '" + lbl + "' has shape " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()) + ", expected " + std::to_string(t.out().dim()) +
                  "x" + std::to_string(t.in().dim()));
      continue;
    }
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m.at(r, c) < 0)
          report.flag("outcome '" + lbl + "' has negative entry at (" + std::to_string(r) +
                      "," + std::to_string(c) + ")");
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.col_sum(c) > 1)
        report.flag("outcome '" + lbl + "' column " + std::to_string(c) + " sums above 1");
  }
  if (report.valid) {
    RatMatrix sum = t.full_coarse_graining();
    for (std::size_t c = 0; c < sum.cols(); ++c)
      if (sum.col_sum(c) != 1) {
        if (t.in().is_trivial())
          report.flag("preparation weights sum to " + rat_to_string(sum.col_sum(c)) +
                      ", expected 1");
        else if (t.out().is_trivial())
          report.flag("effects sum differs from the deterministic effect at vertex " +
                      std::to_string(c));
        else
          report.flag("full coarse-graining not deterministic at column " + std::to_string(c));
      }
  }
  return report;
}

}  // namespace optmct
