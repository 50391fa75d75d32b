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
#include <string>
#include <utility>
#include <vector>

#include "optmct/mct/canonical.hpp"

namespace optmct {

/// Result of removing the internal C register: an equivalent form with
/// trivial C and the coarse-graining that maps its refined outcomes back to
/// the original ones (block labels are the original outcome labels).
struct AncillaElimination {
  CanonicalForm cf;
  std::vector<std::pair<std::string, std::vector<std::string>>> partition;
};

/// Rewrites the form without the C register.
///
/// Writing the preparation as a combination of vertices |m>|i> of C (x) B'
/// and cutting the observation effects columnwise, the C contraction only
/// ties the vertex index m of the preparation side to the effect weight
/// d_{mj}; outcome (x,y) becomes the block sum over m of
/// sum_{ij} p_{mi} d_{mj} |i><j|. The new preparation emits one weighted
/// vertex per (x, m, i); the new observation emits, per column j, the common
/// refinement of the M cut sequences, so each piece lies in a single y bin
/// for every m at once.
inline AncillaElimination eliminate_ancilla(const CanonicalForm &cf) {
  check_canonical(cf);
  if (cf.C.is_trivial()) {
    AncillaElimination r;
    r.cf = cf;
    for (std::size_t p = 0; p < cf.prep.outcome_count(); ++p)
      for (std::size_t o = 0; o < cf.obs.outcome_count(); ++o)
        r.partition.emplace_back(cf.labels[p][o],
                                 std::vector<std::string>{cf.labels[p][o]});
    return r;
  }

  const std::size_t dc = cf.C.dim(), dbp = cf.Bp.dim(), dap = cf.Ap.dim();
  const std::size_t nx = cf.prep.outcome_count(), ny = cf.obs.outcome_count();

  // new preparation on B': one vertex outcome per (x, m, i) with weight
  // rho_x[(m,i)]; zero weights are skipped, their blocks lose nothing
  struct PrepEntry {
    std::size_t x, m;
    std::string label;
  };
  std::vector<PrepEntry> prep_entries;
  std::vector<std::pair<std::string, StateVector>> new_states;
  for (std::size_t x = 0; x < nx; ++x) {
    const RatMatrix &rho = cf.prep.event(x);
    for (std::size_t m = 0; m < dc; ++m)
      for (std::size_t i = 0; i < dbp; ++i) {
        const Rat &w = rho.at(m * dbp + i, 0);
        if (w == 0) continue;
        std::vector<Rat> v(dbp);
        v[i] = w;
        std::string lbl = cf.prep.label(x) + "#" + std::to_string(m) + "#" +
                          std::to_string(i);
        new_states.emplace_back(lbl, StateVector{cf.Bp, std::move(v)});
        prep_entries.push_back({x, m, std::move(lbl)});
      }
  }

  // new observation on A': per column j, overlay the cut sequences
  // (d_{mj}^{y0}, d_{mj}^{y1}, ...) of all m and emit one vertex effect per
  // refined piece; bins[t][m] remembers which y bin piece t of column j
  // occupies for contraction index m
  struct ObsEntry {
    std::size_t j;
    std::vector<std::size_t> bin_of_m;
    std::string label;
  };
  std::vector<ObsEntry> obs_entries;
  std::vector<std::pair<std::string, EffectVector>> new_effects;
  for (std::size_t j = 0; j < dap; ++j) {
    std::vector<Rat> cuts;  // interior cut points, both grids overlaid
    for (std::size_t m = 0; m < dc; ++m) {
      Rat acc(0);
      for (std::size_t y = 0; y + 1 < ny; ++y) {
        acc += cf.obs.event(y).at(0, m * dap + j);
        cuts.push_back(acc);
      }
    }
    cuts.push_back(Rat(1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Rat lo(0);
    std::size_t t = 0;
    for (const Rat &hi : cuts) {
      if (hi == lo) continue;  // zero-width piece
      ObsEntry entry;
      entry.j = j;
      entry.bin_of_m.resize(dc);
      for (std::size_t m = 0; m < dc; ++m) {
        // the y bin of m whose half-open interval [F(y-1), F(y)) holds lo
        Rat acc(0);
        std::size_t bin = ny - 1;
        for (std::size_t y = 0; y + 1 < ny; ++y) {
          acc += cf.obs.event(y).at(0, m * dap + j);
          if (lo < acc) {
            bin = y;
            break;
          }
        }
        entry.bin_of_m[m] = bin;
      }
      entry.label = "c" + std::to_string(j) + "#" + std::to_string(t++);
      std::vector<Rat> v(dap);
      v[j] = hi - lo;
      new_effects.emplace_back(entry.label, EffectVector{cf.Ap, std::move(v)});
      obs_entries.push_back(std::move(entry));
      lo = hi;
    }
  }

  AncillaElimination r;
  r.cf.A = cf.A;
  r.cf.B = cf.B;
  r.cf.Ap = cf.Ap;
  r.cf.Bp = cf.Bp;
  r.cf.C = SystemType::trivial();
  r.cf.E = cf.E;
  r.cf.S1 = cf.S1;
  r.cf.S2 = cf.S2;
  r.cf.prep = preparation_test(cf.Bp, std::move(new_states));
  r.cf.obs = observation_test(cf.Ap, std::move(new_effects));
  r.cf.labels = product_labels(r.cf.prep, r.cf.obs);
  check_canonical(r.cf);

  // block for (x,y): every ((x,m,i), (j,t)) whose piece sits in y's bin of m
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      std::vector<std::string> block;
      for (std::size_t p = 0; p < prep_entries.size(); ++p) {
        if (prep_entries[p].x != x) continue;
        for (const ObsEntry &oe : obs_entries)
          if (oe.bin_of_m[prep_entries[p].m] == y)
            block.push_back(prep_entries[p].label + "." + oe.label);
      }
      r.partition.emplace_back(cf.labels[x][y], std::move(block));
    }
  return r;
}

}  // namespace optmct
