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

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace optmct {

// Exact rational scalar. All arithmetic in the library is exact; no floating
// point appears anywhere in the computational path.
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

/// Renders a rational as "p/q", or "p" when the denominator is 1.
inline std::string rat_to_string(const Rat &r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Parses "p/q" or a bare integer. Whitespace is not accepted.
inline Rat rat_from_string(const std::string &s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      Rat r(mpz_class(s, 10));
      return r;
    }
    mpz_class num(s.substr(0, slash), 10);
    mpz_class den(s.substr(slash + 1), 10);
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument &) {
    throw std::invalid_argument("malformed rational literal: '" + s + "'");
  }
}

}  // namespace optmct
