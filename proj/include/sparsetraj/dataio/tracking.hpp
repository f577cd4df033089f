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
#ifndef SPARSETRAJ__DATAIO__TRACKING_HPP_
#define SPARSETRAJ__DATAIO__TRACKING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sparsetraj::data
{

/// Malformed tracking input. what() names the source, line and frame.
class TrackingError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class Team { ball, home, away };

std::string_view to_string(Team team);
/// Throws std::invalid_argument for anything but ball/home/away.
Team parse_team(std::string_view text);

struct AgentInfo
{
  int id = 0;
  Team team = Team::ball;
  int role = 0;

  friend bool operator==(const AgentInfo &, const AgentInfo &) = default;
};

/// One match (or half) of tracking data. Agents are stored in canonical
/// order: ball, home players by role, away players by role.
struct TrackedExample
{
  std::string match_id;
  double frame_rate_hz = 10.0;
  int first_frame = 0;
  int team_size = 11;
  std::vector<AgentInfo> agents;
  std::vector<std::uint8_t> in_play;   // per frame
  std::vector<double> positions;       // frames x agents x (x, y), metres

  std::size_t frames() const {return in_play.size();}
  int agent_count() const {return 1 + 2 * team_size;}
  double x(std::size_t frame, int agent) const
  {
    return positions[(frame * static_cast<std::size_t>(agent_count()) +
             static_cast<std::size_t>(agent)) * 2];
  }
  double y(std::size_t frame, int agent) const
  {
    return positions[(frame * static_cast<std::size_t>(agent_count()) +
             static_cast<std::size_t>(agent)) * 2 + 1];
  }

  /// Throws TrackingError on inconsistent sizes, agent tables or
  /// non-finite positions.
  void validate() const;
};

inline constexpr std::string_view kTrackingHeader = "frame,agent_id,team,role,x_m,y_m,in_play";

/// Parses the tracking CSV. `source` only labels error messages.
TrackedExample read_tracking(std::istream & in, const std::string & source = "<stream>",
  int team_size = 11);

/// Loads one CSV file; the match id defaults to the file stem.
TrackedExample load_tracking(const std::filesystem::path & path, int team_size = 11);

void write_tracking(std::ostream & out, const TrackedExample & example);
void save_tracking(const std::filesystem::path & path, const TrackedExample & example);

}  // namespace sparsetraj::data

#endif  // SPARSETRAJ__DATAIO__TRACKING_HPP_
