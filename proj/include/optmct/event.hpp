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

#include "optmct/matrix.hpp"
#include "optmct/system_type.hpp"

namespace optmct {

class TypeError : public std::invalid_argument {
 public:
  explicit TypeError(const std::string &what) : std::invalid_argument(what) {}
};

class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string &what) : std::logic_error(what) {}
};

// One outcome of a test: an entrywise-nonnegative rational matrix with column
// sums at most 1, mapping states on `in` to states on `out`.
struct ClassicalEvent {
  SystemType in;
  SystemType out;
  RatMatrix m;  // dim(out) x dim(in)

  ClassicalEvent() = default;
  ClassicalEvent(SystemType in_sys, SystemType out_sys, RatMatrix mat)
      : in(std::move(in_sys)), out(std::move(out_sys)), m(std::move(mat)) {
    if (m.rows() != out.dim() || m.cols() != in.dim())
      throw TypeError("event matrix is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + " but systems " +
                      out.to_string() + "<-" + in.to_string() + " require " +
                      std::to_string(out.dim()) + "x" + std::to_string(in.dim()));
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m.at(r, c) < 0)
          throw InvariantError("negative entry at (" + std::to_string(r) + "," +
                               std::to_string(c) + ")");
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.col_sum(c) > 1)
        throw InvariantError("column " + std::to_string(c) + " sums above 1");
  }

  bool is_deterministic() const {
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.col_sum(c) != 1) return false;
    return true;
  }

  bool operator==(const ClassicalEvent &o) const {
    return in == o.in && out == o.out && m == o.m;
  }
};

// A subnormalized state: column vector over a system's vertex basis.
struct StateVector {
  SystemType sys;
  std::vector<Rat> v;

  StateVector() = default;
  StateVector(SystemType s, std::vector<Rat> vals) : sys(std::move(s)), v(std::move(vals)) {
    if (v.size() != sys.dim())
      throw TypeError("state length " + std::to_string(v.size()) +
                      " does not match system " + sys.to_string());
    for (const auto &x : v)
      if (x < 0) throw InvariantError("negative state entry");
    if (weight() > 1) throw InvariantError("state weight above 1");
  }

  Rat weight() const {
    Rat s(0);
    for (const auto &x : v) s += x;
    return s;
  }
  bool is_deterministic() const { return weight() == 1; }

  RatMatrix as_column() const {
    RatMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m.at(i, 0) = v[i];
    return m;
  }
  ClassicalEvent as_event() const {
    return ClassicalEvent(SystemType::trivial(), sys, as_column());
  }

  bool operator==(const StateVector &o) const { return sys == o.sys && v == o.v; }
};

// An effect: row vector with entries in [0,1].
struct EffectVector {
  SystemType sys;
  std::vector<Rat> v;

  EffectVector() = default;
  EffectVector(SystemType s, std::vector<Rat> vals) : sys(std::move(s)), v(std::move(vals)) {
    if (v.size() != sys.dim())
      throw TypeError("effect length " + std::to_string(v.size()) +
                      " does not match system " + sys.to_string());
    for (const auto &x : v)
      if (x < 0 || x > 1) throw InvariantError("effect entry outside [0,1]");
  }

  RatMatrix as_row() const {
    RatMatrix m(1, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m.at(0, i) = v[i];
    return m;
  }
  ClassicalEvent as_event() const {
    return ClassicalEvent(sys, SystemType::trivial(), as_row());
  }

  bool operator==(const EffectVector &o) const { return sys == o.sys && v == o.v; }
};

/// The unique deterministic effect: the all-ones row.
inline EffectVector deterministic_effect(const SystemType &sys) {
  return EffectVector(sys, std::vector<Rat>(sys.dim(), Rat(1)));
}

/// The j-th vertex (pure) state.
inline StateVector vertex_state(const SystemType &sys, std::size_t j) {
  if (j >= sys.dim()) throw std::out_of_range("vertex index exceeds dimension");
  std::vector<Rat> v(sys.dim(), Rat(0));
  v[j] = 1;
  return StateVector(sys, std::move(v));
}

/// The j-th vertex effect; pairs with vertex states as <i|j> = delta_ij.
inline EffectVector vertex_effect(const SystemType &sys, std::size_t j) {
  if (j >= sys.dim()) throw std::out_of_range("vertex index exceeds dimension");
  std::vector<Rat> v(sys.dim(), Rat(0));
  v[j] = 1;
  return EffectVector(sys, std::move(v));
}

}  // namespace optmct
