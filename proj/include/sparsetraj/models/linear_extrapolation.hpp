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
#ifndef SPARSETRAJ__MODELS__LINEAR_EXTRAPOLATION_HPP_
#define SPARSETRAJ__MODELS__LINEAR_EXTRAPOLATION_HPP_

#include <span>
#include <vector>

#include "sparsetraj/models/predictor.hpp"

namespace sparsetraj::models
{

/// Continues the mean velocity over the observed past,
/// v = (s_last - s_first) / (n - 1), for `horizon` steps.
/// past is (x, y) pairs, oldest first; returns (x, y) pairs.
std::vector<double> linear_extrapolate(std::span<const double> past, int horizon);

/// Parameter-free predictor wrapping linear_extrapolate.
class LinearExtrapolation : public Predictor
{
public:
  explicit LinearExtrapolation(const ModelSpec & spec);
  Output forward(diff::Graph & g, const SceneBatch & scenes) override;
};

}  // namespace sparsetraj::models

#endif  // SPARSETRAJ__MODELS__LINEAR_EXTRAPOLATION_HPP_
