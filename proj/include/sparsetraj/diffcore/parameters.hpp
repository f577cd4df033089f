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

#ifndef SPARSETRAJ__DIFFCORE__PARAMETERS_HPP_
#define SPARSETRAJ__DIFFCORE__PARAMETERS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sparsetraj/diffcore/array.hpp"

namespace sparsetraj::diff
{

/// A named array with a same-shaped gradient accumulator. Non-trainable
/// parameters (batch-norm running statistics) are saved in checkpoints but
/// never touched by the optimizer.
struct Parameter
{
  std::string name;
  Array value;
  Array grad;
  bool trainable = true;

  void zero_grad() {grad.fill(0.0);}
};

/// Owns parameters at stable addresses, in insertion order.
class ParameterSet
{
public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet &) = delete;
  ParameterSet & operator=(const ParameterSet &) = delete;
  ParameterSet(ParameterSet &&) = default;
  ParameterSet & operator=(ParameterSet &&) = default;

  /// Throws on duplicate names.
  Parameter & add(std::string name, Array init, bool trainable = true);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
  Parameter & add_uniform(
    std::string name, std::size_t rows, std::size_t cols, std::size_t fan_in,
    std::mt19937_64 & rng);

  Parameter * find(const std::string & name);
  const Parameter * find(const std::string & name) const;

  std::vector<Parameter *> all();
  std::vector<const Parameter *> all() const;
  std::vector<Parameter *> trainable();

  std::size_t size() const {return params_.size();}
  /// Number of trainable scalars.
  std::size_t scalar_count() const;
  void zero_grad();

private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace sparsetraj::diff

#endif  // SPARSETRAJ__DIFFCORE__PARAMETERS_HPP_
