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
#ifndef SPARSETRAJ__DATAIO__SYNTH_HPP_
#define SPARSETRAJ__DATAIO__SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "sparsetraj/dataio/tracking.hpp"

namespace sparsetraj::data
{

/// Synthetic soccer play generator.
///
/// Every agent (ball included) integrates a bounded acceleration with
/// semi-implicit Euler and is clamped to the speed cap, so finite-difference
/// speeds and accelerations of the output never exceed the caps. Attackers
/// chase waypoints resampled at `waypoint_rate_hz`, the ball follows its
/// possessor and travels to a new attacker on pass events, and each
/// defender tracks a fixed convex combination of its nearest attacker, the
/// ball and its home position. Plays are separated by out-of-play frames
/// and grouped into matches; the simulation is continuous within a match.
struct SynthParams
{
  double pitch_length = 105.0;
  double pitch_width = 68.0;
  double max_speed = 9.0;          // m/s
  double max_accel = 6.0;          // m/s^2
  double frame_rate_hz = 10.0;
  double waypoint_rate_hz = 0.4;
  double pass_rate_hz = 0.35;
  int min_play_frames = 75;
  int max_play_frames = 150;
  int out_of_play_frames = 8;
  int plays_per_match = 25;
  int team_size = 11;
};

/// `count` plays spread over ceil(count / plays_per_match) matches with ids
/// "synth_<seed>_<index>". Deterministic in (seed, count, params).
std::vector<TrackedExample> synth_plays(std::uint64_t seed, int count, const SynthParams & params = {});

}  // namespace sparsetraj::data

#endif  // SPARSETRAJ__DATAIO__SYNTH_HPP_
