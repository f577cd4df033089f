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
#include "sparsetraj/models/scene.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sparsetraj::models
{

void SceneBatch::validate() const
{
  const std::size_t rows = batch * static_cast<std::size_t>(agents());
  if (past_len < 1 || past.rows() != rows ||
    past.cols() != 2 * static_cast<std::size_t>(past_len))
  {
    throw std::invalid_argument(
      "scene batch: past is " + past.shape_string() + ", expected [" + std::to_string(rows) +
      " x " + std::to_string(2 * past_len) + "]");
  }
  if (has_future() &&
    (future.rows() != rows || future.cols() != 2 * static_cast<std::size_t>(future_len)))
  {
    throw std::invalid_argument(
      "scene batch: future is " + future.shape_string() + ", expected [" +
      std::to_string(rows) + " x " + std::to_string(2 * future_len) + "]");
  }
  if (!past.all_finite() || (has_future() && !future.all_finite())) {
    throw std::invalid_argument("scene batch: non-finite position");
  }
}

diff::Array select_agents(
  const diff::Array & rows, std::size_t batch, int agents, int first, int count)
{
  diff::Array out(batch * static_cast<std::size_t>(count), rows.cols());
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t src = b * static_cast<std::size_t>(agents) + static_cast<std::size_t>(first);
    std::copy_n(rows.row(src), static_cast<std::size_t>(count) * rows.cols(),
      out.row(b * static_cast<std::size_t>(count)));
  }
  return out;
}

diff::Array anchor_rows(const SceneBatch & scenes, int first, int count, motion::MotionOrder order)
{
  const auto n = static_cast<std::size_t>(scenes.past_len);
  diff::Array out(scenes.batch * static_cast<std::size_t>(count), 8);
  std::vector<double> series(n);
  for (std::size_t b = 0; b < scenes.batch; ++b) {
    for (int a = 0; a < count; ++a) {
      const double * src = scenes.past.row(scenes.row(b, first + a));
      double * dst = out.row(b * static_cast<std::size_t>(count) + static_cast<std::size_t>(a));
      for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t t = 0; t < n; ++t) {
          series[t] = src[2 * t + c];
        }
        const motion::KinematicState state = motion::estimate_anchor_derivatives(series, order);
        dst[c] = state.position;
        for (std::size_t m = 0; m < 3; ++m) {
          dst[2 * (m + 1) + c] = state.derivatives[m];
        }
      }
    }
  }
  return out;
}

}  // namespace sparsetraj::models
