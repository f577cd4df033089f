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
#include "sparsetraj/dataio/tracking.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace sparsetraj::data
{

std::string_view to_string(Team team)
{
  switch (team) {
    case Team::ball:
      return "ball";
    case Team::home:
      return "home";
    case Team::away:
      return "away";
  }
  return "?";
}

Team parse_team(std::string_view text)
{
  if (text == "ball") {
    return Team::ball;
  }
  if (text == "home") {
    return Team::home;
  }
  if (text == "away") {
    return Team::away;
  }
  throw std::invalid_argument("unknown team '" + std::string(text) + "'");
}

void TrackedExample::validate() const
{
  const auto agents_n = static_cast<std::size_t>(agent_count());
  if (agents.size() != agents_n) {
    throw TrackingError(match_id + ": expected " + std::to_string(agents_n) + " agents, have " +
            std::to_string(agents.size()));
  }
  if (positions.size() != frames() * agents_n * 2) {
    throw TrackingError(match_id + ": position buffer does not match frames x agents");
  }
  for (int a = 0; a < agent_count(); ++a) {
    const Team want = a == 0 ? Team::ball : (a <= team_size ? Team::home : Team::away);
    if (agents[static_cast<std::size_t>(a)].team != want) {
      throw TrackingError(match_id + ": agents are not in canonical order");
    }
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!std::isfinite(positions[i])) {
      throw TrackingError(match_id + ": non-finite position at frame " +
              std::to_string(first_frame + static_cast<int>(i / (agents_n * 2))));
    }
  }
}

namespace
{

struct Row
{
  std::size_t line;
  AgentInfo agent;
  double x;
  double y;
  bool in_play;
};

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    out.push_back(line.substr(begin, comma == std::string_view::npos ? comma : comma - begin));
    if (comma == std::string_view::npos) {
      return out;
    }
    begin = comma + 1;
  }
}

template<typename T>
bool parse_number(std::string_view text, T & out)
{
  const char * end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string where(const std::string & source, std::size_t line)
{
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

TrackedExample read_tracking(std::istream & in, const std::string & source, int team_size)
{
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!line.empty()) {
      break;
    }
  }
  if (line != kTrackingHeader) {
    throw TrackingError(where(source, lineno) + "expected header '" +
            std::string(kTrackingHeader) + "'");
  }

  std::map<int, std::vector<Row>> frames;
  int last_frame = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != 7) {
      throw TrackingError(where(source, lineno) + "expected 7 fields, got " +
              std::to_string(fields.size()));
    }
    int frame = 0;
    Row row{lineno, {}, 0.0, 0.0, false};
    int flag = 0;
    if (!parse_number(fields[0], frame)) {
      throw TrackingError(where(source, lineno) + "bad frame '" + std::string(fields[0]) + "'");
    }
    if (!parse_number(fields[1], row.agent.id)) {
      throw TrackingError(where(source, lineno) + "bad agent_id '" + std::string(fields[1]) + "'");
    }
    try {
      row.agent.team = parse_team(fields[2]);
    } catch (const std::invalid_argument & e) {
      throw TrackingError(where(source, lineno) + e.what());
    }
    if (!parse_number(fields[3], row.agent.role) || row.agent.role < 0) {
      throw TrackingError(where(source, lineno) + "bad role '" + std::string(fields[3]) + "'");
    }
    if (!parse_number(fields[4], row.x) || !parse_number(fields[5], row.y) ||
      !std::isfinite(row.x) || !std::isfinite(row.y))
    {
      throw TrackingError(where(source, lineno) + "non-finite or unparsable coordinate in frame " +
              std::to_string(frame));
    }
    if (!parse_number(fields[6], flag) || (flag != 0 && flag != 1)) {
      throw TrackingError(where(source, lineno) + "in_play must be 0 or 1");
    }
    row.in_play = flag == 1;
    if (any && frame != last_frame && frame != last_frame + 1) {
      throw TrackingError(where(source, lineno) + "frame " + std::to_string(frame) +
              " does not follow frame " + std::to_string(last_frame));
    }
    any = true;
    last_frame = frame;
    frames[frame].push_back(row);
  }
  if (frames.empty()) {
    throw TrackingError(source + ": no tracking rows");
  }

  TrackedExample ex;
  ex.team_size = team_size;
  ex.first_frame = frames.begin()->first;
  const auto agents_n = static_cast<std::size_t>(ex.agent_count());
  for (const auto & [frame, rows] : frames) {
    const std::string ctx = where(source, rows.front().line) + "frame " + std::to_string(frame) + ": ";
    std::vector<const Row *> slot(agents_n, nullptr);
    for (const Row & r : rows) {
      int index = 0;
      if (r.agent.team == Team::ball) {
        index = 0;
      } else {
        if (r.agent.role >= team_size) {
          throw TrackingError(where(source, r.line) + "role " + std::to_string(r.agent.role) +
                  " out of range for team size " + std::to_string(team_size));
        }
        index = 1 + r.agent.role + (r.agent.team == Team::away ? team_size : 0);
      }
      if (slot[static_cast<std::size_t>(index)] != nullptr) {
        throw TrackingError(where(source, r.line) + "frame " + std::to_string(frame) +
                ": duplicate " + std::string(to_string(r.agent.team)) + " role " +
                std::to_string(r.agent.role));
      }
      slot[static_cast<std::size_t>(index)] = &r;
    }
    const auto missing = std::count(slot.begin(), slot.end(), nullptr);
    if (missing != 0 || rows.size() != agents_n) {
      throw TrackingError(ctx + "expected 1 ball and " + std::to_string(team_size) +
              " players per team, got " + std::to_string(rows.size()) + " rows (" +
              std::to_string(missing) + " missing)");
    }
    const bool play = slot[0]->in_play;
    for (const Row * r : slot) {
      if (r->in_play != play) {
        throw TrackingError(where(source, r->line) + "frame " + std::to_string(frame) +
                ": in_play differs between agents");
      }
    }
    if (ex.agents.empty()) {
      for (const Row * r : slot) {
        ex.agents.push_back(r->agent);
      }
    } else {
      for (std::size_t a = 0; a < agents_n; ++a) {
        if (slot[a]->agent.id != ex.agents[a].id) {
          throw TrackingError(where(source, slot[a]->line) + "frame " + std::to_string(frame) +
                  ": agent id changed for " + std::string(to_string(slot[a]->agent.team)) +
                  " role " + std::to_string(slot[a]->agent.role));
        }
      }
    }
    ex.in_play.push_back(play ? 1 : 0);
    for (const Row * r : slot) {
      ex.positions.push_back(r->x);
      ex.positions.push_back(r->y);
    }
  }
  ex.match_id = source;
  ex.validate();
  return ex;
}

TrackedExample load_tracking(const std::filesystem::path & path, int team_size)
{
  std::ifstream in(path);
  if (!in) {
    throw TrackingError("cannot open " + path.string());
  }
  TrackedExample ex = read_tracking(in, path.string(), team_size);
  ex.match_id = path.stem().string();
  return ex;
}

void write_tracking(std::ostream & out, const TrackedExample & example)
{
  example.validate();
  out << kTrackingHeader << '\n';
  char buf[64];
  for (std::size_t f = 0; f < example.frames(); ++f) {
    for (int a = 0; a < example.agent_count(); ++a) {
      const AgentInfo & info = example.agents[static_cast<std::size_t>(a)];
      out << example.first_frame + static_cast<int>(f) << ',' << info.id << ',' <<
        to_string(info.team) << ',' << info.role << ',';
      auto r = std::to_chars(buf, buf + sizeof(buf), example.x(f, a));
      out.write(buf, r.ptr - buf);
      out << ',';
      r = std::to_chars(buf, buf + sizeof(buf), example.y(f, a));
      out.write(buf, r.ptr - buf);
      out << ',' << static_cast<int>(example.in_play[f]) << '\n';
    }
  }
}

void save_tracking(const std::filesystem::path & path, const TrackedExample & example)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw TrackingError("cannot write " + path.string());
  }
  write_tracking(out, example);
  if (!out) {
    throw TrackingError("write failed for " + path.string());
  }
}

}  // namespace sparsetraj::data
