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
#include "sparsetraj/dataio/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace sparsetraj::data
{
namespace
{

struct Vec
{
  double x = 0.0;
  double y = 0.0;
};

Vec operator+(Vec a, Vec b) {return {a.x + b.x, a.y + b.y};}
Vec operator-(Vec a, Vec b) {return {a.x - b.x, a.y - b.y};}
Vec operator*(double s, Vec a) {return {s * a.x, s * a.y};}
double norm(Vec a) {return std::hypot(a.x, a.y);}

Vec clamp_norm(Vec v, double cap)
{
  const double n = norm(v);
  return n > cap ? (cap / n) * v : v;
}

struct Body
{
  Vec pos;
  Vec vel;
  double cruise = 5.0;   // preferred speed towards the target
};

// Nominal 4-4-2 shape for a team attacking towards +x, origin at the centre.
constexpr std::array<Vec, 11> kShape{{
  {-46.0, 0.0},
  {-30.0, -24.0}, {-32.0, -8.0}, {-32.0, 8.0}, {-30.0, 24.0},
  {-12.0, -22.0}, {-14.0, -7.0}, {-14.0, 7.0}, {-12.0, 22.0},
  {4.0, -8.0}, {4.0, 8.0}}};

class Simulator
{
public:
  Simulator(const SynthParams & p, std::uint64_t seed)
  : p_(p), rng_(seed), dt_(1.0 / p.frame_rate_hz)
  {
    const auto n = static_cast<std::size_t>(p.team_size);
    home_.resize(n);
    away_.resize(n);
    home_anchor_.resize(n);
    away_anchor_.resize(n);
    weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      home_anchor_[i] = shape(i, +1.0);
      away_anchor_[i] = shape(i, -1.0);
      home_[i] = {home_anchor_[i] + jitter(3.0), {}, uniform(3.0, 6.5)};
      away_[i] = {away_anchor_[i] + jitter(3.0), {}, uniform(3.0, 6.5)};
    }
    ball_.pos = {0.0, 0.0};
    ball_.cruise = p.max_speed;
  }

  void restart()
  {
    attack_home_ = std::bernoulli_distribution(0.5)(rng_);
    auto & att = attackers();
    possessor_ = pick_outfield();
    receiver_ = -1;
    waypoints_.assign(att.size(), {});
    for (std::size_t i = 0; i < att.size(); ++i) {
      waypoints_[i] = new_waypoint(i);
      att[i].cruise = uniform(3.0, 7.0);
    }
    auto & def = defenders();
    for (std::size_t i = 0; i < def.size(); ++i) {
      // Convex weights over (nearest attacker, ball, home).
      std::gamma_distribution<double> gamma(2.0, 1.0);
      std::array<double, 3> w{gamma(rng_), gamma(rng_) * 0.6, gamma(rng_) * 0.8};
      const double sum = w[0] + w[1] + w[2];
      weights_[i] = {w[0] / sum, w[1] / sum, w[2] / sum};
      def[i].cruise = uniform(3.5, 7.5);
    }
  }

  void step(bool in_play)
  {
    auto & att = attackers();
    auto & def = defenders();
    const double dir = direction();
    if (in_play) {
      std::bernoulli_distribution switch_wp(p_.waypoint_rate_hz * dt_);
      for (std::size_t i = 0; i < att.size(); ++i) {
        if (switch_wp(rng_) || norm(waypoints_[i] - att[i].pos) < 1.5) {
          waypoints_[i] = new_waypoint(i);
        }
        steer(att[i], waypoints_[i]);
      }
      if (receiver_ < 0 && std::bernoulli_distribution(p_.pass_rate_hz * dt_)(rng_)) {
        receiver_ = pick_receiver();
      }
      const Body & carrier = att[static_cast<std::size_t>(receiver_ >= 0 ? receiver_ : possessor_)];
      const Vec ball_target = receiver_ >= 0 ? carrier.pos : carrier.pos + Vec{0.8 * dir, 0.0};
      steer(ball_, ball_target);
      if (receiver_ >= 0 && norm(ball_.pos - carrier.pos) < 1.5) {
        possessor_ = receiver_;
        receiver_ = -1;
      }
      for (std::size_t i = 0; i < def.size(); ++i) {
        const Vec home = anchor_defender(i);
        const Vec mark = nearest(att, def[i].pos);
        const Vec goal_side = mark + Vec{-2.0 * dir, 0.0};
        const auto & w = weights_[i];
        steer(def[i], w[0] * goal_side + w[1] * ball_.pos + w[2] * home);
      }
    } else {
      // Dead ball: everyone drifts back towards their shape.
      for (std::size_t i = 0; i < att.size(); ++i) {
        steer(att[i], anchor_attacker(i), 2.0);
      }
      for (std::size_t i = 0; i < def.size(); ++i) {
        steer(def[i], anchor_defender(i), 2.0);
      }
      steer(ball_, ball_.pos, 0.0);
    }
  }

  void record(TrackedExample & ex, bool in_play) const
  {
    ex.in_play.push_back(in_play ? 1 : 0);
    ex.positions.push_back(ball_.pos.x);
    ex.positions.push_back(ball_.pos.y);
    for (const auto * team : {&home_, &away_}) {
      for (const Body & b : *team) {
        ex.positions.push_back(b.pos.x);
        ex.positions.push_back(b.pos.y);
      }
    }
  }

  std::mt19937_64 & rng() {return rng_;}

private:
  Vec shape(std::size_t role, double facing) const
  {
    const Vec s = kShape[role % kShape.size()];
    const double spread = p_.pitch_width / 68.0;
    const double depth = p_.pitch_length / 105.0;
    return {facing * s.x * depth, facing * s.y * spread};
  }

  double uniform(double lo, double hi) {return std::uniform_real_distribution<double>(lo, hi)(rng_);}
  Vec jitter(double sd)
  {
    std::normal_distribution<double> n(0.0, sd);
    return {n(rng_), n(rng_)};
  }

  double direction() const {return attack_home_ ? 1.0 : -1.0;}
  std::vector<Body> & attackers() {return attack_home_ ? home_ : away_;}
  std::vector<Body> & defenders() {return attack_home_ ? away_ : home_;}
  Vec anchor_attacker(std::size_t i) const
  {
    const auto & a = attack_home_ ? home_anchor_ : away_anchor_;
    return a[i] + Vec{14.0 * direction(), 0.0};
  }
  Vec anchor_defender(std::size_t i) const
  {
    const auto & a = attack_home_ ? away_anchor_ : home_anchor_;
    return a[i] + Vec{6.0 * direction(), 0.0};
  }

  int pick_outfield()
  {
    return std::uniform_int_distribution<int>(1, std::max(1, p_.team_size - 1))(rng_) %
           p_.team_size;
  }

  int pick_receiver()
  {
    const auto & att = attackers();
    std::vector<double> w(att.size());
    for (std::size_t i = 0; i < att.size(); ++i) {
      const double d = norm(att[i].pos - att[static_cast<std::size_t>(possessor_)].pos);
      w[i] = static_cast<int>(i) == possessor_ ? 0.0 : std::exp(-d / 15.0);
    }
    double total = 0.0;
    for (double v : w) {
      total += v;
    }
    if (total <= 0.0) {
      return possessor_;
    }
    return static_cast<int>(std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng_));
  }

  Vec new_waypoint(std::size_t i)
  {
    const Vec base = anchor_attacker(i) + Vec{uniform(0.0, 12.0) * direction(), 0.0};
    return clamp_to_pitch(base + jitter(9.0));
  }

  Vec clamp_to_pitch(Vec v) const
  {
    const double hx = p_.pitch_length / 2.0 - 1.0;
    const double hy = p_.pitch_width / 2.0 - 1.0;
    return {std::clamp(v.x, -hx, hx), std::clamp(v.y, -hy, hy)};
  }

  static Vec nearest(const std::vector<Body> & team, Vec from)
  {
    Vec best = team.front().pos;
    double dist = norm(best - from);
    for (const Body & b : team) {
      const double d = norm(b.pos - from);
      if (d < dist) {
        dist = d;
        best = b.pos;
      }
    }
    return best;
  }

  // Accelerate towards a target at the body's cruise speed (slowing inside
  // a braking radius), within the acceleration and speed caps.
  void steer(Body & b, Vec target, double cruise_cap = -1.0)
  {
    const double cruise = std::min(p_.max_speed, cruise_cap >= 0.0 ? cruise_cap : b.cruise);
    const Vec to = target - b.pos;
    const double dist = norm(to);
    Vec desired{};
    if (dist > 1e-9) {
      const double speed = std::min(cruise, dist / 0.8);
      desired = (speed / dist) * to;
    }
    // Caps shrunk by 1e-9 so finite differences of the recorded positions
    // stay within them despite rounding.
    const Vec accel = clamp_norm((1.0 / 0.5) * (desired - b.vel), p_.max_accel * (1.0 - 1e-9));
    b.vel = clamp_norm(b.vel + dt_ * accel, p_.max_speed * (1.0 - 1e-9));
    b.pos = b.pos + dt_ * b.vel;
  }

  SynthParams p_;
  std::mt19937_64 rng_;
  double dt_;
  std::vector<Body> home_;
  std::vector<Body> away_;
  std::vector<Vec> home_anchor_;
  std::vector<Vec> away_anchor_;
  std::vector<std::array<double, 3>> weights_;
  std::vector<Vec> waypoints_;
  Body ball_;
  bool attack_home_ = true;
  int possessor_ = 1;
  int receiver_ = -1;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t index)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<TrackedExample> synth_plays(std::uint64_t seed, int count, const SynthParams & params)
{
  if (count < 0) {
    throw std::invalid_argument("synth_plays: negative count");
  }
  if (params.team_size < 1 || params.plays_per_match < 1 ||
    params.min_play_frames < 1 || params.max_play_frames < params.min_play_frames ||
    params.out_of_play_frames < 1 || params.frame_rate_hz <= 0.0)
  {
    throw std::invalid_argument("synth_plays: invalid parameters");
  }
  std::vector<TrackedExample> matches;
  int remaining = count;
  for (std::uint64_t m = 0; remaining > 0; ++m) {
    const int plays = std::min(remaining, params.plays_per_match);
    remaining -= plays;
    Simulator sim(params, mix(seed, m));
    TrackedExample ex;
    char id[64];
    std::snprintf(id, sizeof(id), "synth_%llu_%03llu", static_cast<unsigned long long>(seed),
      static_cast<unsigned long long>(m));
    ex.match_id = id;
    ex.frame_rate_hz = params.frame_rate_hz;
    ex.team_size = params.team_size;
    ex.agents.push_back({0, Team::ball, 0});
    for (int i = 0; i < params.team_size; ++i) {
      ex.agents.push_back({100 + i, Team::home, i});
    }
    for (int i = 0; i < params.team_size; ++i) {
      ex.agents.push_back({200 + i, Team::away, i});
    }
    for (int play = 0; play < plays; ++play) {
      sim.restart();
      const int length = std::uniform_int_distribution<int>(
        params.min_play_frames, params.max_play_frames)(sim.rng());
      for (int f = 0; f < length; ++f) {
        sim.step(true);
        sim.record(ex, true);
      }
      for (int f = 0; f < params.out_of_play_frames; ++f) {
        sim.step(false);
        sim.record(ex, false);
      }
    }
    ex.validate();
    matches.push_back(std::move(ex));
  }
  return matches;
}

}  // namespace sparsetraj::data
