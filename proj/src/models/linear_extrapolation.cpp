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
#include "sparsetraj/models/linear_extrapolation.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparsetraj::models
{

std::vector<double> linear_extrapolate(std::span<const double> past, int horizon)
{
  if (past.size() < 4 || past.size() % 2 != 0) {
    throw std::invalid_argument("linear_extrapolate: need at least two (x, y) samples");
  }
  if (horizon < 1) {
    throw std::invalid_argument("linear_extrapolate: horizon must be positive");
  }
  const std::size_t n = past.size() / 2;
  const double lx = past[2 * (n - 1)];
  const double ly = past[2 * (n - 1) + 1];
  const double vx = (lx - past[0]) / static_cast<double>(n - 1);
  const double vy = (ly - past[1]) / static_cast<double>(n - 1);
  std::vector<double> out(2 * static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    out[2 * static_cast<std::size_t>(t - 1)] = lx + vx * t;
    out[2 * static_cast<std::size_t>(t - 1) + 1] = ly + vy * t;
  }
  return out;
}

LinearExtrapolation::LinearExtrapolation(const ModelSpec & spec)
: Predictor(spec)
{
}

Predictor::Output LinearExtrapolation::forward(diff::Graph & g, const SceneBatch & scenes)
{
  check_scenes(scenes);
  const ModelSpec & s = spec();
  const diff::Array past = select_agents(scenes.past, scenes.batch, scenes.agents(),
      s.first_predicted_agent(), s.predicted_agents());
  diff::Array dense(past.rows(), 2 * static_cast<std::size_t>(s.horizon));
  for (std::size_t r = 0; r < past.rows(); ++r) {
    const auto row = linear_extrapolate({past.row(r), past.cols()}, s.horizon);
    std::copy(row.begin(), row.end(), dense.row(r));
  }
  return select_and_densify(g, g.input(std::move(dense)), scenes);
}

}  // namespace sparsetraj::models
