// Copyright 2026 optmct Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Exact rational linear feasibility: find x >= 0 with A x = b, or certify
// that none exists. Phase-1 simplex over artificial variables with Bland's
// anti-cycling rule; every pivot is exact, so the verdict is, too.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "optmct/rational.hpp"

namespace optmct {

/// Solves A x = b, x >= 0 exactly. Returns a feasible point or nullopt.
/// Redundant or degenerate rows are fine; artificials stuck in the basis at
/// value zero simply witness redundancy.
inline std::optional<std::vector<Rat>> solve_feasibility(
    std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
  const std::size_t m = a.size();
  const std::size_t n = m == 0 ? 0 : a[0].size();
  for (const auto &row : a)
    if (row.size() != n) throw std::invalid_argument("ragged constraint matrix");
  if (b.size() != m) throw std::invalid_argument("rhs length mismatch");
  if (m == 0) return std::vector<Rat>(n, Rat(0));

  // Make b nonnegative so the artificial basis starts feasible.
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      for (auto &v : a[i]) v = -v;
    }
  }

  // Tableau columns: n structural, then m artificials. Objective: minimize
  // the artificial total; its row is kept reduced against the current basis.
  const std::size_t cols = n + m;
  std::vector<std::vector<Rat>> t(m, std::vector<Rat>(cols));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = Rat(1);
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // cost[j] = (reduced cost of column j); cost_rhs = current objective value.
  std::vector<Rat> cost(cols, Rat(0));
  Rat cost_rhs(0);
  for (std::size_t j = 0; j < n; ++j) {
    Rat s(0);
    for (std::size_t i = 0; i < m; ++i) s += t[i][j];
    cost[j] = -s;  // c_j - sum of basis rows, with c_j = 0 for structurals
  }
  for (const Rat &bi : b) cost_rhs -= bi;

  std::vector<Rat> rhs = b;
  while (true) {
    // Bland: entering column = smallest index with negative reduced cost.
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == cols) break;  // optimal

    // Leaving row: minimum ratio, ties to the smallest basis variable.
    std::size_t leave = m;
    Rat best(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rat ratio = rhs[i] / t[i][enter];
      if (leave == m || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m)
      throw std::logic_error("phase-1 objective unbounded below");  // impossible

    // Pivot on (leave, enter).
    Rat piv = t[leave][enter];
    for (auto &v : t[leave]) v /= piv;
    rhs[leave] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      Rat f = t[i][enter];
      if (f == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
      rhs[i] -= f * rhs[leave];
    }
    Rat fc = cost[enter];
    if (fc != 0) {
      for (std::size_t j = 0; j < cols; ++j) cost[j] -= fc * t[leave][j];
      cost_rhs -= fc * rhs[leave];
    }
    basis[leave] = enter;
  }

  if (cost_rhs != 0) return std::nullopt;  // artificial mass remains
  std::vector<Rat> x(n, Rat(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = rhs[i];
  return x;
}

}  // namespace optmct
