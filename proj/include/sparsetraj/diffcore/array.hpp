// Copyright 2026 The sparsetraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPARSETRAJ__DIFFCORE__ARRAY_HPP_
#define SPARSETRAJ__DIFFCORE__ARRAY_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sparsetraj::diff
{

/// Row-major 2-D array of doubles. Scalars are 1x1; a batch of feature rows is
/// [rows x features].
class Array
{
public:
  Array() = default;
  Array(std::size_t rows, std::size_t cols, double fill = 0.0);
  Array(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Array scalar(double v) {return Array(1, 1, v);}

  std::size_t rows() const {return rows_;}
  std::size_t cols() const {return cols_;}
  std::size_t size() const {return values_.size();}
  bool empty() const {return values_.empty();}
  std::vector<std::size_t> shape() const {return {rows_, cols_};}
  std::string shape_string() const;

  double * data() {return values_.data();}
  const double * data() const {return values_.data();}
  std::span<double> values() {return values_;}
  std::span<const double> values() const {return values_;}
  const std::vector<double> & storage() const {return values_;}

  double & operator[](std::size_t i) {return values_[i];}
  double operator[](std::size_t i) const {return values_[i];}
  double & at(std::size_t r, std::size_t c) {return values_[r * cols_ + c];}
  double at(std::size_t r, std::size_t c) const {return values_[r * cols_ + c];}
  double * row(std::size_t r) {return values_.data() + r * cols_;}
  const double * row(std::size_t r) const {return values_.data() + r * cols_;}

  void fill(double v);
  /// Same storage, new 2-D view; the element count must not change.
  void reshape(std::size_t rows, std::size_t cols);
  bool same_shape(const Array & other) const
  {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace sparsetraj::diff

#endif  // SPARSETRAJ__DIFFCORE__ARRAY_HPP_
