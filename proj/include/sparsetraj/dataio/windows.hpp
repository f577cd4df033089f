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
#ifndef SPARSETRAJ__DATAIO__WINDOWS_HPP_
#define SPARSETRAJ__DATAIO__WINDOWS_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparsetraj/dataio/tracking.hpp"
#include "sparsetraj/models/scene.hpp"

namespace sparsetraj::data
{

struct WindowParams
{
  int length = 50;   // T, frames per window
  int past = 10;     // n, observed frames

  int future() const {return length - past;}
  /// Throws std::invalid_argument unless length > past >= 2.
  void validate() const;
};

/// One training/evaluation example. Agents are ordered ball, attackers (by
/// role), defenders (by role); `agents` carries their metadata.
struct PredictionWindow
{
  std::string match_id;
  int start_frame = 0;
  int team_size = 11;
  int past_len = 0;
  int future_len = 0;
  Team attacking = Team::home;
  std::vector<AgentInfo> agents;
  std::vector<double> past;     // agents x past_len x 2
  std::vector<double> future;   // agents x future_len x 2

  int agent_count() const {return 1 + 2 * team_size;}
  /// Full-length (past + future) trajectory of one agent, (x, y) pairs.
  std::vector<double> trajectory(int agent) const;
};

/// Maximal runs of in-play frames as [begin, end) frame indices.
std::vector<std::pair<std::size_t, std::size_t>> in_play_spans(const TrackedExample & example);

/// Window starts within a span: 0, ceil(T/2), 2 ceil(T/2), ... while the
/// window fits.
std::vector<std::size_t> window_starts(std::size_t span_length, int length);

/// Team of the outfield player nearest the ball at `frame`.
Team attacking_team(const TrackedExample & example, std::size_t frame);

std::vector<PredictionWindow> make_windows(const TrackedExample & example, const WindowParams & params);

/// Negates x and/or y across past and future.
PredictionWindow augment_flip(const PredictionWindow & window, bool flip_x, bool flip_y);

/// Packs windows into a scene batch; the future is included when requested.
models::SceneBatch to_scene_batch(std::span<const PredictionWindow> windows, bool with_future);
models::SceneBatch to_scene_batch(
  std::span<const PredictionWindow * const> windows, bool with_future);

}  // namespace sparsetraj::data

#endif  // SPARSETRAJ__DATAIO__WINDOWS_HPP_
