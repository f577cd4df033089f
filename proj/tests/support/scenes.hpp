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
#include "sparsetraj/config.hpp"
#ifndef SPARSETRAJ_TESTS__SUPPORT__SCENES_HPP_
#define SPARSETRAJ_TESTS__SUPPORT__SCENES_HPP_

#include <random>
#include <vector>

#include "sparsetraj/models/scene.hpp"

namespace scenes
{

/// Batch of random constant-acceleration agents scattered over the pitch.
inline sparsetraj::models::SceneBatch random_batch(std::size_t batch, std::mt19937_64 & rng,
  int team_size = 11, int past = 10, int future = 40, bool with_future = true)
{
  std::uniform_real_distribution<double> px(-50.0, 50.0);
  std::uniform_real_distribution<double> py(-32.0, 32.0);
  std::uniform_real_distribution<double> vel(-0.7, 0.7);
  std::uniform_real_distribution<double> acc(-0.02, 0.02);
  sparsetraj::models::SceneBatch s;
  s.batch = batch;
  s.team_size = team_size;
  s.past_len = past;
  s.future_len = future;
  const std::size_t rows = batch * static_cast<std::size_t>(s.agents());
  s.past = sparsetraj::diff::Array(rows, 2 * static_cast<std::size_t>(past));
  if (with_future) {
    s.future = sparsetraj::diff::Array(rows, 2 * static_cast<std::size_t>(future));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const double x0 = px(rng), y0 = py(rng), vx = vel(rng), vy = vel(rng);
    const double ax = acc(rng), ay = acc(rng);
    for (int t = 0; t < past + future; ++t) {
      const double x = x0 + vx * t + 0.5 * ax * t * t;
      const double y = y0 + vy * t + 0.5 * ay * t * t;
      if (t < past) {
        s.past.at(r, 2 * t) = x;
        s.past.at(r, 2 * t + 1) = y;
      } else if (with_future) {
        s.future.at(r, 2 * (t - past)) = x;
        s.future.at(r, 2 * (t - past) + 1) = y;
      }
    }
  }
  return s;
}

/// Copies scene `index` of `src` into a single-scene batch.
inline sparsetraj::models::SceneBatch slice(const sparsetraj::models::SceneBatch & src,
  std::size_t index)
{
  sparsetraj::models::SceneBatch s = src;
  s.batch = 1;
  const auto agents = static_cast<std::size_t>(src.agents());
  auto take = [&](const sparsetraj::diff::Array & a) {
      if (a.empty()) {
        return a;
      }
      sparsetraj::diff::Array out(agents, a.cols());
      for (std::size_t r = 0; r < agents; ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
          out.at(r, c) = a.at(index * agents + r, c);
        }
      }
      return out;
    };
  s.past = take(src.past);
  s.future = take(src.future);
  return s;
}

}  // namespace scenes

#endif  // SPARSETRAJ_TESTS__SUPPORT__SCENES_HPP_
