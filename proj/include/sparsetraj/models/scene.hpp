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

#ifndef SPARSETRAJ__MODELS__SCENE_HPP_
#define SPARSETRAJ__MODELS__SCENE_HPP_

#include <cstddef>
#include <vector>

#include "sparsetraj/diffcore/array.hpp"
#include "sparsetraj/motion_model.hpp"

namespace sparsetraj::models
{

/// A batch of scenes in canonical agent order: ball, attackers (by role),
/// defenders (by role). Each row of `past`/`future` is one agent of one scene
/// (scene-major), holding (x, y) pairs per step, oldest first.
struct SceneBatch
{
  std::size_t batch = 0;
  int team_size = 11;
  int past_len = 0;
  int future_len = 0;
  diff::Array past;    // [batch * agents x past_len * 2]
  diff::Array future;  // [batch * agents x future_len * 2]; empty when unknown

  int agents() const {return 1 + 2 * team_size;}
  std::size_t row(std::size_t scene, int agent) const
  {
    return scene * static_cast<std::size_t>(agents()) + static_cast<std::size_t>(agent);
  }
  bool has_future() const {return !future.empty();}

  /// Throws std::invalid_argument on inconsistent shapes or non-finite values.
  void validate() const;
};

/// Rows [first, first + count) of every scene, concatenated scene-major.
diff::Array select_agents(const diff::Array & rows, std::size_t batch, int agents, int first, int count);

/// Anchor state per selected agent as [rows x 8] in (p, v, a, j) x (x, y)
/// layout, estimated from the trailing past samples.
diff::Array anchor_rows(const SceneBatch & scenes, int first, int count, motion::MotionOrder order);

/// Model output for the predicted agents of every scene.
struct ScenePrediction
{
  std::size_t batch = 0;
  int first_agent = 0;
  int agents = 0;
  int horizon = 0;
  diff::Array dense;                  // [batch * agents x horizon * 2]
  std::vector<int> control_offsets;   // empty for dense heads
  diff::Array controls;               // [batch * agents x 2K]

  double x(std::size_t scene, int agent, int step) const
  {
    return dense.at(scene * static_cast<std::size_t>(agents) + static_cast<std::size_t>(agent),
             2 * static_cast<std::size_t>(step));
  }
  double y(std::size_t scene, int agent, int step) const
  {
    return dense.at(scene * static_cast<std::size_t>(agents) + static_cast<std::size_t>(agent),
             2 * static_cast<std::size_t>(step) + 1);
  }
};

}  // namespace sparsetraj::models

#endif  // SPARSETRAJ__MODELS__SCENE_HPP_
