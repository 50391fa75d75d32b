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

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "optmct/permutation.hpp"
#include "optmct/system_type.hpp"

namespace optmct {

// Factorization of a permutation across an input cut A|B and output cut C|D:
//   S = (S4 beside S2) after central swap after (S3 beside S1)
// where S3 sorts A into [A' A''] (A' headed for C), S1 sorts B into [B' B'']
// (B' headed for C), the central swap exchanges the A'' and B' blocks, S4
// finishes C from [A' B'] and S2 finishes D from [A'' B''].
struct BipartiteDecomposition {
  PermutationSpec S1, S2, S3, S4;
  SystemType Ap, App, Bp, Bpp;  // A', A'', B', B''

  PermutationSpec central_swap() const {
    return PermutationSpec::identity(Ap)
        .beside(PermutationSpec::block_swap(App, Bp))
        .beside(PermutationSpec::identity(Bpp));
  }

  PermutationSpec recompose() const {
    return S3.beside(S1).then(central_swap()).then(S4.beside(S2));
  }
};

/// Splits S across input factors [0,cut_in) | [cut_in,n) and output slots
/// [0,cut_out) | [cut_out,n). Within each sorted block the factors keep their
/// original relative order.
inline BipartiteDecomposition decompose_bipartite(const PermutationSpec &S,
                                                  std::size_t cut_in,
                                                  std::size_t cut_out) {
  const std::size_t n = S.factor_count();
  if (cut_in > n || cut_out > n)
    throw std::invalid_argument("bipartite cut out of range");
  const auto &sigma = S.mapping();
  const auto &in = S.input();

  auto to_c = [&](std::size_t s) { return sigma[s] < cut_out; };
  std::vector<std::size_t> ap, app, bp, bpp;  // original input slots
  for (std::size_t s = 0; s < cut_in; ++s) (to_c(s) ? ap : app).push_back(s);
  for (std::size_t s = cut_in; s < n; ++s) (to_c(s) ? bp : bpp).push_back(s);

  auto type_of = [&](const std::vector<std::size_t> &slots) {
    std::vector<std::size_t> f;
    f.reserve(slots.size());
    for (auto s : slots) f.push_back(in.factors()[s]);
    return SystemType(std::move(f));
  };

  BipartiteDecomposition d;
  d.Ap = type_of(ap);
  d.App = type_of(app);
  d.Bp = type_of(bp);
  d.Bpp = type_of(bpp);

  // Sorting stages on A and on B.
  {
    std::vector<std::size_t> m(cut_in);
    std::size_t pos = 0;
    for (auto s : ap) m[s] = pos++;
    for (auto s : app) m[s] = pos++;
    d.S3 = PermutationSpec(in.slice(0, cut_in), std::move(m));
  }
  {
    std::vector<std::size_t> m(n - cut_in);
    std::size_t pos = 0;
    for (auto s : bp) m[s - cut_in] = pos++;
    for (auto s : bpp) m[s - cut_in] = pos++;
    d.S1 = PermutationSpec(in.slice(cut_in, n), std::move(m));
  }

  // Finishing stages onto C and D.
  {
    std::vector<std::size_t> m;
    m.reserve(ap.size() + bp.size());
    for (auto s : ap) m.push_back(sigma[s]);
    for (auto s : bp) m.push_back(sigma[s]);
    d.S4 = PermutationSpec(d.Ap.tensor(d.Bp), std::move(m));
  }
  {
    std::vector<std::size_t> m;
    m.reserve(app.size() + bpp.size());
    for (auto s : app) m.push_back(sigma[s] - cut_out);
    for (auto s : bpp) m.push_back(sigma[s] - cut_out);
    d.S2 = PermutationSpec(d.App.tensor(d.Bpp), std::move(m));
  }
  return d;
}

}  // namespace optmct
