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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "sparsetraj/dataio/manifest.hpp"
#include "sparsetraj/dataio/synth.hpp"
#include "sparsetraj/dataio/tracking.hpp"
#include "sparsetraj/dataio/windows.hpp"
#include "sparsetraj/evaluation.hpp"

using namespace sparsetraj::data;

namespace
{

// Agents in canonical order; agent a at frame f sits at (a + 0.1 f, -a + 0.05 f^2).
TrackedExample make_example(const std::vector<std::uint8_t> & in_play, int team = 11)
{
  TrackedExample ex;
  ex.match_id = "m1";
  ex.team_size = team;
  ex.first_frame = 100;
  ex.agents.push_back({0, Team::ball, 0});
  for (int i = 0; i < team; ++i) {
    ex.agents.push_back({10 + i, Team::home, i});
  }
  for (int i = 0; i < team; ++i) {
    ex.agents.push_back({40 + i, Team::away, i});
  }
  ex.in_play = in_play;
  for (std::size_t f = 0; f < in_play.size(); ++f) {
    for (int a = 0; a < ex.agent_count(); ++a) {
      ex.positions.push_back(a + 0.1 * static_cast<double>(f));
      ex.positions.push_back(-a + 0.05 * static_cast<double>(f * f));
    }
  }
  return ex;
}

std::string to_csv(const TrackedExample & ex)
{
  std::ostringstream out;
  write_tracking(out, ex);
  return out.str();
}

std::string drop_line(const std::string & text, std::size_t line_index)
{
  std::istringstream in(text);
  std::string line;
  std::string out;
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    if (i != line_index) {
      out += line + "\n";
    }
  }
  return out;
}

std::string error_of(const std::string & csv)
{
  std::istringstream in(csv);
  try {
    read_tracking(in, "test.csv");
  } catch (const TrackingError & e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("tracking: minimal two-frame file")
{
  const std::string csv = to_csv(make_example({1, 1}));
  std::istringstream in(csv);
  const TrackedExample ex = read_tracking(in, "two.csv");
  CHECK(ex.frames() == 2);
  CHECK(ex.agent_count() == 23);
  CHECK(ex.first_frame == 100);
  CHECK(csv.rfind(std::string(kTrackingHeader), 0) == 0);
}

TEST_CASE("tracking: malformed input is reported with line numbers")
{
  const std::string csv = to_csv(make_example({1, 1, 1}));

  // Line 0 is the header; frame 101 occupies lines 24..46. Drop a defender.
  const std::string missing = error_of(drop_line(csv, 24 + 20));
  CHECK(missing.find("frame 101") != std::string::npos);
  CHECK(missing.find("test.csv:") != std::string::npos);

  std::string nan_csv = csv;
  const auto pos = nan_csv.find('\n', nan_csv.find('\n') + 1);
  std::string second = nan_csv.substr(pos + 1, nan_csv.find('\n', pos + 1) - pos - 1);
  std::string bad = second;
  const auto c4 = bad.find(',', bad.find(',', bad.find(',', bad.find(',') + 1) + 1) + 1);
  bad = bad.substr(0, c4 + 1) + "nan" + bad.substr(bad.find(',', c4 + 1));
  nan_csv.replace(pos + 1, second.size(), bad);
  const std::string nan_error = error_of(nan_csv);
  CHECK(nan_error.find("test.csv:3") != std::string::npos);
  CHECK(nan_error.find("frame 100") != std::string::npos);

  CHECK(error_of("frame,agent,team\n").find("expected header") != std::string::npos);
  CHECK(error_of(std::string(kTrackingHeader) + "\n1,2,3\n").find("test.csv:2") !=
    std::string::npos);

  // Frames must be contiguous integers.
  std::string gap = csv;
  std::size_t p = 0;
  while ((p = gap.find("\n102,", p)) != std::string::npos) {
    gap.replace(p, 5, "\n104,");
  }
  CHECK_FALSE(error_of(gap).empty());

  const std::string in_play_error =
    error_of(std::string(kTrackingHeader) + "\n0,0,ball,0,0,0,2\n");
  CHECK(in_play_error.find("in_play") != std::string::npos);
}

TEST_CASE("tracking: write then load preserves values exactly")
{
  TrackedExample ex = make_example({1, 1, 0, 1});
  ex.positions[5] = 1.0 / 3.0;
  ex.positions[17] = -52.499999999999993;
  std::istringstream in(to_csv(ex));
  const TrackedExample back = read_tracking(in, "rt.csv");
  CHECK(back.positions == ex.positions);
  CHECK(back.in_play == ex.in_play);
  CHECK(back.agents == ex.agents);

  const auto dir = std::filesystem::temp_directory_path() / "sparsetraj_dataio_rt";
  std::filesystem::create_directories(dir);
  save_tracking(dir / "match_a.csv", ex);
  const TrackedExample loaded = load_tracking(dir / "match_a.csv");
  CHECK(loaded.match_id == "match_a");
  CHECK(loaded.positions == ex.positions);
  std::filesystem::remove_all(dir);
}

TEST_CASE("windows: start enumeration examples")
{
  CHECK(window_starts(120, 50) == std::vector<std::size_t>{0, 25, 50});
  CHECK(window_starts(49, 50).empty());
  CHECK(window_starts(50, 50) == std::vector<std::size_t>{0});
  for (std::size_t span = 0; span < 400; span += 7) {
    for (int length : {2, 3, 10, 49, 50, 51, 240}) {
      CHECK(window_starts(span, length) ==
        oracle::brute_force_window_starts(span, static_cast<std::size_t>(length)));
    }
  }
}

TEST_CASE("windows: spans, contents and determinism")
{
  // In-play spans of 120 and 60 frames separated by 5 out-of-play frames.
  std::vector<std::uint8_t> flags(120, 1);
  flags.insert(flags.end(), 5, 0);
  flags.insert(flags.end(), 60, 1);
  const TrackedExample ex = make_example(flags);
  const auto spans = in_play_spans(ex);
  REQUIRE(spans.size() == 2);
  CHECK(spans[1].first == 125);

  const WindowParams params{50, 10};
  const auto windows = make_windows(ex, params);
  REQUIRE(windows.size() == 4);
  CHECK(windows[3].start_frame == 100 + 125);
  for (const auto & w : windows) {
    const auto first = static_cast<std::size_t>(w.start_frame - ex.first_frame);
    for (std::size_t f = first; f < first + 50; ++f) {
      CHECK(ex.in_play[f] == 1);
    }
    CHECK(w.past.size() == 23u * 10u * 2u);
    CHECK(w.future.size() == 23u * 40u * 2u);
  }
  // Ball is agent 0; its first future x is frame start + 10.
  const auto & w0 = windows[1];
  CHECK(w0.future[0] == doctest::Approx(0.1 * (25 + 10)));

  const auto again = make_windows(ex, params);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    CHECK(again[i].past == windows[i].past);
    CHECK(again[i].future == windows[i].future);
  }
  CHECK_THROWS(make_windows(ex, WindowParams{10, 10}));
}

TEST_CASE("windows: attackers are the team nearest the ball")
{
  TrackedExample ex = make_example(std::vector<std::uint8_t>(50, 1));
  // Put away role 3 on top of the ball at the last past frame.
  const std::size_t frame = 9;
  const int away3 = 1 + 11 + 3;
  ex.positions[(frame * 23 + away3) * 2] = ex.x(frame, 0);
  ex.positions[(frame * 23 + away3) * 2 + 1] = ex.y(frame, 0);
  CHECK(attacking_team(ex, frame) == Team::away);
  const auto w = make_windows(ex, WindowParams{50, 10});
  REQUIRE(w.size() == 1);
  CHECK(w[0].attacking == Team::away);
  CHECK(w[0].agents[1].team == Team::away);
  CHECK(w[0].agents[1].role == 0);
  CHECK(w[0].agents[12].team == Team::home);
}

TEST_CASE("augment_flip")
{
  const auto w = make_windows(make_example(std::vector<std::uint8_t>(50, 1)), {50, 10}).front();
  const auto twice = augment_flip(augment_flip(w, true, true), true, true);
  CHECK(twice.past == w.past);
  CHECK(twice.future == w.future);

  // Ball moves 0.1 m per frame in x: mean velocity (1, *) m/s flips to (-1, *).
  const auto fx = augment_flip(w, true, false);
  const double vx = (w.past[2 * 9] - w.past[0]) / 9.0 * 10.0;
  const double vx_f = (fx.past[2 * 9] - fx.past[0]) / 9.0 * 10.0;
  CHECK(vx == doctest::Approx(1.0));
  CHECK(vx_f == doctest::Approx(-1.0));
  CHECK(fx.past[1] == w.past[1]);
  CHECK(fx.agents == w.agents);
  CHECK(fx.attacking == w.attacking);
  CHECK(fx.start_frame == w.start_frame);

  // L2 error is invariant when scene and prediction flip together.
  std::vector<double> pred = w.future;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred[i] += 0.3 * std::sin(static_cast<double>(i));
  }
  PredictionWindow pw = w;
  pw.future = pred;
  const auto rows = [](const std::vector<double> & v) {
      return sparsetraj::diff::Array(23, 80, v);
    };
  const auto e = sparsetraj::eval::l2_error(rows(w.future), rows(pred));
  const auto ef = sparsetraj::eval::l2_error(
    rows(augment_flip(w, true, true).future), rows(augment_flip(pw, true, true).future));
  CHECK(e.mean_cm == doctest::Approx(ef.mean_cm).epsilon(1e-14));
}

TEST_CASE("scene batch layout")
{
  const auto ws = make_windows(make_example(std::vector<std::uint8_t>(75, 1)), {50, 10});
  REQUIRE(ws.size() == 2);
  const auto batch = to_scene_batch(std::span<const PredictionWindow>(ws), true);
  CHECK(batch.batch == 2);
  CHECK(batch.past.rows() == 46);
  CHECK(batch.past.cols() == 20);
  CHECK(batch.future.cols() == 80);
  CHECK(batch.past.at(batch.row(1, 5), 2 * 3 + 1) == ws[1].past[(5 * 10 + 3) * 2 + 1]);
  const auto no_future = to_scene_batch(std::span<const PredictionWindow>(ws), false);
  CHECK_FALSE(no_future.has_future());
}

TEST_CASE("synth: kinematic caps, determinism and speed band")
{
  SynthParams params;
  const auto matches = synth_plays(7, 60, params);
  REQUIRE(matches.size() == 3);
  double speed_sum = 0.0;
  std::size_t speed_n = 0;
  double max_speed = 0.0;
  double max_accel = 0.0;
  const double hz = params.frame_rate_hz;
  for (const auto & ex : matches) {
    CHECK_NOTHROW(ex.validate());
    for (int a = 0; a < ex.agent_count(); ++a) {
      for (std::size_t f = 1; f < ex.frames(); ++f) {
        const double vx = (ex.x(f, a) - ex.x(f - 1, a)) * hz;
        const double vy = (ex.y(f, a) - ex.y(f - 1, a)) * hz;
        const double speed = std::hypot(vx, vy);
        max_speed = std::max(max_speed, speed);
        if (a > 0) {
          speed_sum += speed;
          ++speed_n;
        }
        if (f >= 2) {
          const double px = (ex.x(f - 1, a) - ex.x(f - 2, a)) * hz;
          const double py = (ex.y(f - 1, a) - ex.y(f - 2, a)) * hz;
          max_accel = std::max(max_accel, std::hypot(vx - px, vy - py) * hz);
        }
      }
    }
  }
  CHECK(max_speed <= 9.0);
  CHECK(max_accel <= 6.0);
  const double mean_speed = speed_sum / static_cast<double>(speed_n);
  CHECK(mean_speed >= 1.0);
  CHECK(mean_speed <= 6.0);

  const auto again = synth_plays(7, 60, params);
  for (std::size_t m = 0; m < matches.size(); ++m) {
    CHECK(again[m].positions == matches[m].positions);
    CHECK(again[m].in_play == matches[m].in_play);
    CHECK(again[m].match_id == matches[m].match_id);
  }
  CHECK(synth_plays(8, 60, params)[0].positions != matches[0].positions);

  // Every play yields at least one window and none cross out-of-play frames.
  std::size_t windows = 0;
  for (const auto & ex : matches) {
    windows += make_windows(ex, {50, 10}).size();
  }
  CHECK(windows >= 60);
}

TEST_CASE("manifest and split policy")
{
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) {
    ids.push_back("match_" + std::to_string(i));
  }
  const auto split = split_by_match(ids);
  CHECK(std::count(split.begin(), split.end(), Split::train) == 16);
  CHECK(std::count(split.begin(), split.end(), Split::val) == 2);
  CHECK(std::count(split.begin(), split.end(), Split::test) == 2);
  CHECK(split_by_match(ids) == split);
  const auto three = split_by_match({"a", "b", "c"});
  CHECK(std::count(three.begin(), three.end(), Split::test) == 1);

  const auto dir = std::filesystem::temp_directory_path() / "sparsetraj_manifest_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "data");
  const auto ex = make_example(std::vector<std::uint8_t>(75, 1));
  save_tracking(dir / "data" / "m1.csv", ex);
  Manifest m;
  m.entries.push_back({Split::train, "data/m1.csv"});
  m.entries.push_back({Split::test, "data/m1.csv"});
  m.save(dir / "manifest.txt");
  const Manifest back = Manifest::load(dir / "manifest.txt");
  REQUIRE(back.entries.size() == 2);
  CHECK(back.paths(Split::test).size() == 1);
  CHECK(std::filesystem::exists(back.paths(Split::train).front()));
  CHECK(load_split(back, Split::train, {50, 10}).size() == 2);
  CHECK(load_split(back, Split::val, {50, 10}).empty());

  std::ofstream(dir / "bad.txt") << "holdout data/m1.csv\n";
  CHECK_THROWS(Manifest::load(dir / "bad.txt"));
  std::filesystem::remove_all(dir);
}
