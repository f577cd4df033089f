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
#include "sparsetraj/dataio/windows.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sparsetraj::data
{

void WindowParams::validate() const
{
  if (past < 2 || length <= past) {
    throw std::invalid_argument("window needs length > past >= 2 (length " +
            std::to_string(length) + ", past " + std::to_string(past) + ")");
  }
}

std::vector<double> PredictionWindow::trajectory(int agent) const
{
  const auto a = static_cast<std::size_t>(agent);
  const auto np = static_cast<std::size_t>(2 * past_len);
  const auto nf = static_cast<std::size_t>(2 * future_len);
  std::vector<double> out(past.begin() + static_cast<std::ptrdiff_t>(a * np),
    past.begin() + static_cast<std::ptrdiff_t>((a + 1) * np));
  out.insert(out.end(), future.begin() + static_cast<std::ptrdiff_t>(a * nf),
    future.begin() + static_cast<std::ptrdiff_t>((a + 1) * nf));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> in_play_spans(const TrackedExample & example)
{
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t f = 0;
  while (f < example.frames()) {
    if (example.in_play[f] == 0) {
      ++f;
      continue;
    }
    const std::size_t begin = f;
    while (f < example.frames() && example.in_play[f] != 0) {
      ++f;
    }
    spans.emplace_back(begin, f);
  }
  return spans;
}

std::vector<std::size_t> window_starts(std::size_t span_length, int length)
{
  if (length < 1) {
    throw std::invalid_argument("window length must be positive");
  }
  const auto t = static_cast<std::size_t>(length);
  const std::size_t step = (t + 1) / 2;
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + t <= span_length; s += step) {
    starts.push_back(s);
  }
  return starts;
}

Team attacking_team(const TrackedExample & example, std::size_t frame)
{
  double best = std::numeric_limits<double>::infinity();
  Team team = Team::home;
  const double bx = example.x(frame, 0);
  const double by = example.y(frame, 0);
  for (int a = 1; a < example.agent_count(); ++a) {
    const double dx = example.x(frame, a) - bx;
    const double dy = example.y(frame, a) - by;
    const double d = dx * dx + dy * dy;
    if (d < best) {
      best = d;
      team = example.agents[static_cast<std::size_t>(a)].team;
    }
  }
  return team;
}

std::vector<PredictionWindow> make_windows(const TrackedExample & example, const WindowParams & params)
{
  params.validate();
  const int team = example.team_size;
  std::vector<PredictionWindow> out;
  for (const auto & [begin, end] : in_play_spans(example)) {
    for (std::size_t start : window_starts(end - begin, params.length)) {
      const std::size_t first = begin + start;
      const std::size_t last_past = first + static_cast<std::size_t>(params.past) - 1;
      PredictionWindow w;
      w.match_id = example.match_id;
      w.start_frame = example.first_frame + static_cast<int>(first);
      w.team_size = team;
      w.past_len = params.past;
      w.future_len = params.future();
      w.attacking = attacking_team(example, last_past);
      const int att_base = w.attacking == Team::home ? 1 : 1 + team;
      const int def_base = w.attacking == Team::home ? 1 + team : 1;
      std::vector<int> order{0};
      for (int i = 0; i < team; ++i) {
        order.push_back(att_base + i);
      }
      for (int i = 0; i < team; ++i) {
        order.push_back(def_base + i);
      }
      for (int src : order) {
        w.agents.push_back(example.agents[static_cast<std::size_t>(src)]);
        for (int t = 0; t < params.length; ++t) {
          const std::size_t f = first + static_cast<std::size_t>(t);
          auto & dst = t < params.past ? w.past : w.future;
          dst.push_back(example.x(f, src));
          dst.push_back(example.y(f, src));
        }
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

PredictionWindow augment_flip(const PredictionWindow & window, bool flip_x, bool flip_y)
{
  PredictionWindow out = window;
  for (auto * buf : {&out.past, &out.future}) {
    for (std::size_t i = 0; i < buf->size(); i += 2) {
      if (flip_x) {
        (*buf)[i] = -(*buf)[i];
      }
      if (flip_y) {
        (*buf)[i + 1] = -(*buf)[i + 1];
      }
    }
  }
  return out;
}

models::SceneBatch to_scene_batch(
  std::span<const PredictionWindow * const> windows, bool with_future)
{
  if (windows.empty()) {
    throw std::invalid_argument("to_scene_batch: no windows");
  }
  const PredictionWindow & first = *windows.front();
  models::SceneBatch batch;
  batch.batch = windows.size();
  batch.team_size = first.team_size;
  batch.past_len = first.past_len;
  batch.future_len = with_future ? first.future_len : 0;
  const auto agents = static_cast<std::size_t>(first.agent_count());
  batch.past = diff::Array(batch.batch * agents, 2 * static_cast<std::size_t>(first.past_len));
  if (with_future) {
    batch.future = diff::Array(batch.batch * agents, 2 * static_cast<std::size_t>(first.future_len));
  }
  for (std::size_t b = 0; b < windows.size(); ++b) {
    const PredictionWindow & w = *windows[b];
    if (w.team_size != first.team_size || w.past_len != first.past_len ||
      w.future_len != first.future_len)
    {
      throw std::invalid_argument("to_scene_batch: windows have different shapes");
    }
    std::copy(w.past.begin(), w.past.end(), batch.past.row(b * agents));
    if (with_future) {
      std::copy(w.future.begin(), w.future.end(), batch.future.row(b * agents));
    }
  }
  return batch;
}

models::SceneBatch to_scene_batch(std::span<const PredictionWindow> windows, bool with_future)
{
  std::vector<const PredictionWindow *> ptrs;
  ptrs.reserve(windows.size());
  for (const auto & w : windows) {
    ptrs.push_back(&w);
  }
  return to_scene_batch(std::span<const PredictionWindow * const>(ptrs), with_future);
}

}  // namespace sparsetraj::data
