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

#ifndef SPARSETRAJ__DIFFCORE__ADAM_HPP_
#define SPARSETRAJ__DIFFCORE__ADAM_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sparsetraj/diffcore/parameters.hpp"

namespace sparsetraj::diff
{

class NonFiniteGradient : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig
{
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Multiplied into the learning rate by end_epoch().
  double epoch_decay = 0.999;
  /// Global L2 gradient clipping; disabled when unset.
  std::optional<double> max_grad_norm;
};

/// Moment accumulators, one pair per trainable parameter in ParameterSet
/// order.
struct OptimizerState
{
  std::vector<Array> first_moment;
  std::vector<Array> second_moment;
  std::int64_t steps = 0;
  double learning_rate = 0.0;
  double decay = 1.0;
};

class Adam
{
public:
  Adam(ParameterSet & params, AdamConfig config);

  /// Applies one bias-corrected Adam update from the accumulated gradients.
  /// Throws NonFiniteGradient (naming the parameter) before touching any
  /// value if a gradient is NaN or infinite.
  void step();
  /// Epoch boundary: learning_rate *= epoch_decay.
  void end_epoch();

  double learning_rate() const {return state_.learning_rate;}
  const AdamConfig & config() const {return config_;}
  const OptimizerState & state() const {return state_;}
  OptimizerState & state() {return state_;}
  const std::vector<Parameter *> & parameters() const {return params_;}

private:
  std::vector<Parameter *> params_;
  AdamConfig config_;
  OptimizerState state_;
};

}  // namespace sparsetraj::diff

#endif  // SPARSETRAJ__DIFFCORE__ADAM_HPP_
