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
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "optmct/event.hpp"
#include "optmct/matrix.hpp"
#include "optmct/system_type.hpp"

namespace optmct {

// A rearrangement of system factors, stored as a slot bijection. The matrix
// action is materialized on demand.
class PermutationSpec {
 public:
  PermutationSpec() = default;

  /// mapping[i] is the output slot receiving input factor i.
  PermutationSpec(SystemType input, std::vector<std::size_t> mapping)
      : input_(std::move(input)), map_(std::move(mapping)) {
    const std::size_t n = input_.factor_count();
    if (map_.size() != n)
      throw std::invalid_argument("permutation size does not match factor count");
    std::vector<bool> hit(n, false);
    for (auto s : map_) {
      if (s >= n || hit[s])
        throw std::invalid_argument("permutation mapping is not a bijection");
      hit[s] = true;
    }
  }

  static PermutationSpec identity(SystemType input) {
    std::vector<std::size_t> m(input.factor_count());
    std::iota(m.begin(), m.end(), 0);
    return PermutationSpec(std::move(input), std::move(m));
  }

  /// Block swap [X|Y] -> [Y|X] on the concatenated system.
  static PermutationSpec block_swap(const SystemType &x, const SystemType &y) {
    SystemType input = x.tensor(y);
    std::vector<std::size_t> m(input.factor_count());
    const std::size_t nx = x.factor_count(), ny = y.factor_count();
    for (std::size_t i = 0; i < nx; ++i) m[i] = ny + i;
    for (std::size_t j = 0; j < ny; ++j) m[nx + j] = j;
    return PermutationSpec(std::move(input), std::move(m));
  }

  const SystemType &input() const { return input_; }
  const std::vector<std::size_t> &mapping() const { return map_; }
  std::size_t factor_count() const { return map_.size(); }

  SystemType output() const {
    std::vector<std::size_t> f(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) f[map_[i]] = input_.factors()[i];
    return SystemType(std::move(f));
  }

  bool operator==(const PermutationSpec &o) const {
    return input_ == o.input_ && map_ == o.map_;
  }
  bool operator!=(const PermutationSpec &o) const { return !(*this == o); }

  bool is_identity() const {
    for (std::size_t i = 0; i < map_.size(); ++i)
      if (map_[i] != i) return false;
    return true;
  }

  /// Image of a flat basis index under the digit rearrangement.
  std::size_t apply_index(std::size_t index) const {
    std::vector<std::size_t> in_digits = input_.digits_of(index);
    std::vector<std::size_t> out_digits(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) out_digits[map_[i]] = in_digits[i];
    return output().index_of(out_digits);
  }

  RatMatrix matrix() const {
    const std::size_t d = input_.dim();
    RatMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m.at(apply_index(i), i) = 1;
    return m;
  }

  ClassicalEvent as_event() const { return ClassicalEvent(input_, output(), matrix()); }

  /// `this` then `other`.
  PermutationSpec then(const PermutationSpec &other) const {
    if (output() != other.input_)
      throw TypeError("permutation composition type mismatch: " + output().to_string() +
                      " vs " + other.input_.to_string());
    std::vector<std::size_t> m(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) m[i] = other.map_[map_[i]];
    return PermutationSpec(input_, std::move(m));
  }

  /// `this` beside `other` (slot-disjoint blocks).
  PermutationSpec beside(const PermutationSpec &other) const {
    SystemType input = input_.tensor(other.input_);
    std::vector<std::size_t> m(input.factor_count());
    const std::size_t n = map_.size();
    for (std::size_t i = 0; i < n; ++i) m[i] = map_[i];
    for (std::size_t j = 0; j < other.map_.size(); ++j) m[n + j] = n + other.map_[j];
    return PermutationSpec(std::move(input), std::move(m));
  }

  PermutationSpec inverse() const {
    std::vector<std::size_t> m(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) m[map_[i]] = i;
    return PermutationSpec(output(), std::move(m));
  }

  /// One-line cycle notation over factor slots; "()" for the identity.
  std::string to_cycles() const {
    std::string s;
    std::vector<bool> seen(map_.size(), false);
    for (std::size_t i = 0; i < map_.size(); ++i) {
      if (seen[i] || map_[i] == i) continue;
      s += "(";
      std::size_t j = i;
      bool first = true;
      while (!seen[j]) {
        seen[j] = true;
        if (!first) s += " ";
        s += std::to_string(j);
        first = false;
        j = map_[j];
      }
      s += ")";
    }
    return s.empty() ? "()" : s;
  }

 private:
  SystemType input_;
  std::vector<std::size_t> map_;
};

/// Adjacent transposition of slots k and k+1.
inline PermutationSpec adjacent_swap(const SystemType &sys, std::size_t k) {
  if (k + 1 >= sys.factor_count())
    throw std::out_of_range("adjacent swap slot " + std::to_string(k) +
                            " out of range for " + sys.to_string());
  std::vector<std::size_t> m(sys.factor_count());
  std::iota(m.begin(), m.end(), 0);
  std::swap(m[k], m[k + 1]);
  return PermutationSpec(sys, std::move(m));
}

/// Composes a word of adjacent swaps, each named by its lower slot. The swap
/// at step t acts on the running (already permuted) factor arrangement.
inline PermutationSpec perm_from_generators(const SystemType &sys,
                                            const std::vector<std::size_t> &word) {
  PermutationSpec acc = PermutationSpec::identity(sys);
  for (auto k : word) acc = acc.then(adjacent_swap(acc.output(), k));
  return acc;
}

/// Expands the transposition of slots i<j into adjacent swaps.
inline std::vector<std::size_t> transposition_word(std::size_t i, std::size_t j) {
  if (i == j) return {};
  if (i > j) std::swap(i, j);
  std::vector<std::size_t> word;
  for (std::size_t k = j; k-- > i;) word.push_back(k);      // bring j down to i
  for (std::size_t k = i + 1; k < j; ++k) word.push_back(k);  // push old i up to j
  return word;
}

}  // namespace optmct
