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
#include <string>
#include <vector>

#include "optmct/rational.hpp"

namespace optmct {

// Dense matrix of exact rationals, row-major storage.
class RatMatrix {
 public:
  RatMatrix() : rows_(0), cols_(0) {}
  RatMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, Rat(0)) {}

  static RatMatrix identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat &at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const Rat &at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  bool operator==(const RatMatrix &o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const RatMatrix &o) const { return !(*this == o); }

  RatMatrix operator*(const RatMatrix &rhs) const {
    if (cols_ != rhs.rows_)
      throw std::invalid_argument("matrix product shape mismatch: " +
                                  std::to_string(cols_) + " vs " +
                                  std::to_string(rhs.rows_));
    RatMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rat &v = a_[i * cols_ + k];
        if (v == 0) continue;
        for (std::size_t j = 0; j < rhs.cols_; ++j)
          out.at(i, j) += v * rhs.at(k, j);
      }
    return out;
  }

  RatMatrix operator+(const RatMatrix &rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
      throw std::invalid_argument("matrix sum shape mismatch");
    RatMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + rhs.a_[i];
    return out;
  }

  RatMatrix operator-(const RatMatrix &rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
      throw std::invalid_argument("matrix difference shape mismatch");
    RatMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - rhs.a_[i];
    return out;
  }

  RatMatrix scaled(const Rat &s) const {
    RatMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * s;
    return out;
  }

  /// Kronecker product; *this occupies the most significant index block.
  RatMatrix kron(const RatMatrix &rhs) const {
    RatMatrix out(rows_ * rhs.rows_, cols_ * rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        const Rat &v = at(i, j);
        if (v == 0) continue;
        for (std::size_t r = 0; r < rhs.rows_; ++r)
          for (std::size_t c = 0; c < rhs.cols_; ++c)
            out.at(i * rhs.rows_ + r, j * rhs.cols_ + c) = v * rhs.at(r, c);
      }
    return out;
  }

  Rat col_sum(std::size_t c) const {
    Rat s(0);
    for (std::size_t r = 0; r < rows_; ++r) s += at(r, c);
    return s;
  }

  bool is_zero() const {
    for (const auto &v : a_)
      if (v != 0) return false;
    return true;
  }

  bool is_entrywise_nonneg() const {
    for (const auto &v : a_)
      if (v < 0) return false;
    return true;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Rat> a_;
};

}  // namespace optmct
