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
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsetraj/diffcore/array.hpp"

namespace sparsetraj::diff
{

Array::Array(std::size_t rows, std::size_t cols, double fill)
: rows_(rows), cols_(cols), values_(rows * cols, fill)
{
}

Array::Array(std::size_t rows, std::size_t cols, std::vector<double> values)
: rows_(rows), cols_(cols), values_(std::move(values))
{
  if (values_.size() != rows * cols) {
    throw std::invalid_argument(
      "Array: " + std::to_string(values_.size()) + " values do not fill shape [" +
      std::to_string(rows) + " x " + std::to_string(cols) + "]");
  }
}

std::string Array::shape_string() const
{
  return "[" + std::to_string(rows_) + " x " + std::to_string(cols_) + "]";
}

void Array::fill(double v)
{
  std::fill(values_.begin(), values_.end(), v);
}

void Array::reshape(std::size_t rows, std::size_t cols)
{
  if (rows * cols != values_.size()) {
    throw std::invalid_argument(
      "Array::reshape: cannot view " + shape_string() + " as [" + std::to_string(rows) +
      " x " + std::to_string(cols) + "]");
  }
  rows_ = rows;
  cols_ = cols;
}

bool Array::all_finite() const
{
  return std::all_of(values_.begin(), values_.end(), [](double v) {return std::isfinite(v);});
}

}  // namespace sparsetraj::diff
