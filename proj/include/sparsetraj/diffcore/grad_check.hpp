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

#ifndef SPARSETRAJ__DIFFCORE__GRAD_CHECK_HPP_
#define SPARSETRAJ__DIFFCORE__GRAD_CHECK_HPP_

#include <cstddef>
#include <functional>
#include <string>

#include "sparsetraj/diffcore/graph.hpp"

namespace sparsetraj::diff
{

struct GradCheckReport
{
  /// max over entries of |analytic - numeric| / scale, where scale is the
  /// largest gradient magnitude (either route) within the same parameter.
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
  /// Failing entries left out because halving epsilon moves the numeric
  /// estimate by more than the tolerance (a kink within epsilon).
  std::size_t entries_skipped = 0;
  bool passed = false;
};

/// Builds a fresh graph, records the scalar loss and returns it.
using LossBuilder = std::function<Var (Graph &)>;

/// Compares reverse-mode gradients of every trainable parameter against
/// central differences with step `epsilon`. The graph is built in training
/// mode when `training` is set (batch norm then uses batch statistics).
GradCheckReport grad_check(
  ParameterSet & params, const LossBuilder & build, double epsilon, double tolerance,
  bool training = false);

}  // namespace sparsetraj::diff

#endif  // SPARSETRAJ__DIFFCORE__GRAD_CHECK_HPP_
