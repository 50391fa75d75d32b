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
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace optmct {

// A finite classical system: an ordered list of factor dimensions. The empty
// list is the trivial system (dimension 1). Composite indexing is row-major
// mixed radix with the leftmost factor most significant.
class SystemType {
 public:
  SystemType() = default;
  explicit SystemType(std::vector<std::size_t> factors) : factors_(std::move(factors)) {
    for (auto d : factors_)
      if (d == 0) throw std::invalid_argument("system factor of dimension 0");
  }

  static SystemType trivial() { return SystemType(); }

  const std::vector<std::size_t> &factors() const { return factors_; }
  std::size_t factor_count() const { return factors_.size(); }
  bool is_trivial() const { return factors_.empty(); }

  std::size_t dim() const {
    std::size_t d = 1;
    for (auto f : factors_) d *= f;
    return d;
  }

  bool operator==(const SystemType &o) const { return factors_ == o.factors_; }
  bool operator!=(const SystemType &o) const { return !(*this == o); }

  /// Concatenation of factor lists: this system beside `o`.
  SystemType tensor(const SystemType &o) const {
    std::vector<std::size_t> f = factors_;
    f.insert(f.end(), o.factors_.begin(), o.factors_.end());
    return SystemType(std::move(f));
  }

  SystemType slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > factors_.size())
      throw std::out_of_range("system slice out of range");
    return SystemType(std::vector<std::size_t>(factors_.begin() + begin,
                                               factors_.begin() + end));
  }

  /// Flat index of the given digit tuple (one digit per factor).
  std::size_t index_of(const std::vector<std::size_t> &digits) const {
    if (digits.size() != factors_.size())
      throw std::invalid_argument("digit count does not match factor count");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (digits[i] >= factors_[i]) throw std::out_of_range("digit out of range");
      idx = idx * factors_[i] + digits[i];
    }
    return idx;
  }

  /// Digit tuple of the given flat index.
  std::vector<std::size_t> digits_of(std::size_t index) const {
    if (index >= dim()) throw std::out_of_range("index exceeds dimension");
    std::vector<std::size_t> digits(factors_.size(), 0);
    for (std::size_t i = factors_.size(); i-- > 0;) {
      digits[i] = index % factors_[i];
      index /= factors_[i];
    }
    return digits;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(factors_[i]);
    }
    return s + "]";
  }

 private:
  std::vector<std::size_t> factors_;
};

}  // namespace optmct
