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
#include "sparsetraj/models/granma.hpp"

namespace sparsetraj::models
{
namespace
{

constexpr std::size_t kDecoderDepth = 5;
constexpr std::size_t kEncoderDepth = 3;

}  // namespace

GranMa::GranMa(const ModelSpec & spec)
: Predictor(spec)
{
  auto & params = parameters();
  auto & rng = init_rng();
  const auto e = static_cast<std::size_t>(spec.embedding_width);
  const auto hidden = static_cast<std::size_t>(spec.decoder_hidden);
  const auto controls = static_cast<std::size_t>(2 * spec.control_count());
  const auto past = static_cast<std::size_t>(2 * spec.input_len);
  const auto context = spec.conditioned ? static_cast<std::size_t>(2 * spec.full_length()) : past;

  ball_encoder_.emplace(params, "granma.ball.enc", context, e, e, kEncoderDepth, rng);
  attackers_.emplace(TeamEncoder{
      ResidualMlp(params, "granma.att.enc", context, e, e, kEncoderDepth, rng),
      ResidualMlp(params, "granma.att.phi_e", 2 * e, e, e, kEncoderDepth, rng),
      ResidualMlp(params, "granma.att.phi_v", e, e, e, kEncoderDepth, rng)});
  defenders_.emplace(TeamEncoder{
      ResidualMlp(params, "granma.def.enc", past, e, e, kEncoderDepth, rng),
      ResidualMlp(params, "granma.def.phi_e", 2 * e, e, e, kEncoderDepth, rng),
      ResidualMlp(params, "granma.def.phi_v", e, e, e, kEncoderDepth, rng)});
  query_.emplace(params, "granma.attn.q", e, e, rng);
  // Softmax ignores a shared key offset, so the key projection has no bias.
  key_.emplace(params, "granma.attn.k", e, e, rng, false);
  value_.emplace(params, "granma.attn.v", e, e, rng);
  mix_.emplace(params, "granma.attn.out", e, e, rng);
  if (!spec.conditioned) {
    ball_decoder_.emplace(params, "granma.ball.dec", e, hidden, controls, kDecoderDepth, rng);
    attacker_decoder_.emplace(params, "granma.att.dec", e, hidden, controls, kDecoderDepth, rng);
  }
  defender_decoder_.emplace(params, "granma.def.dec", e, hidden, controls, kDecoderDepth, rng);
}

Var GranMa::encode_team(Graph & g, const TeamEncoder & team, const diff::Array & rows) const
{
  const Var nodes = team.encoder(g, g.input(rows));
  return team_graph_layer(g, nodes, static_cast<std::size_t>(spec().team_size),
           [&team](Graph & gg, Var x) {return team.edge(gg, x);},
           [&team](Graph & gg, Var x) {return team.node(gg, x);});
}

Predictor::Output GranMa::forward(Graph & g, const SceneBatch & scenes)
{
  check_scenes(scenes);
  const ModelSpec & s = spec();
  const std::size_t batch = scenes.batch;
  const auto team = static_cast<std::size_t>(s.team_size);
  const auto agents = static_cast<std::size_t>(s.agent_count());

  const Var ball = (*ball_encoder_)(g, g.input(context_rows(scenes, 0, 1)));
  const Var att = encode_team(g, *attackers_, context_rows(scenes, 1, s.team_size));
  const Var def = encode_team(g,
      *defenders_, past_rows(scenes, 1 + s.team_size, s.team_size));

  // Group-major stack -> scene-major (ball, attackers, defenders) per scene.
  const Var stacked = diff::concat_rows(g, {ball, att, def});
  std::vector<std::uint32_t> order;
  order.reserve(batch * agents);
  for (std::size_t b = 0; b < batch; ++b) {
    order.push_back(static_cast<std::uint32_t>(b));
    for (std::size_t i = 0; i < team; ++i) {
      order.push_back(static_cast<std::uint32_t>(batch + b * team + i));
    }
    for (std::size_t i = 0; i < team; ++i) {
      order.push_back(static_cast<std::uint32_t>(batch + batch * team + b * team + i));
    }
  }
  const Var x = diff::gather_rows(g, stacked, std::move(order));
  const Var attended = diff::scaled_dot_attention(g, (*query_)(g, x), (*key_)(g, x),
      (*value_)(g, x), static_cast<std::size_t>(s.heads), agents);
  const Var z = diff::add(g, (*mix_)(g, attended), x);

  auto rows_of = [&](std::size_t first, std::size_t count) {
      std::vector<std::uint32_t> idx;
      idx.reserve(batch * count);
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t i = 0; i < count; ++i) {
          idx.push_back(static_cast<std::uint32_t>(b * agents + first + i));
        }
      }
      return diff::gather_rows(g, z, std::move(idx));
    };

  const Var def_controls = (*defender_decoder_)(g, rows_of(1 + team, team));
  if (s.conditioned) {
    return densify_controls(g, from_normalized(g, def_controls, scenes, s.team_size), scenes);
  }
  const Var ball_controls = (*ball_decoder_)(g, rows_of(0, 1));
  const Var att_controls = (*attacker_decoder_)(g, rows_of(1, team));
  const Var grouped = diff::concat_rows(g, {ball_controls, att_controls, def_controls});
  std::vector<std::uint32_t> back;
  back.reserve(batch * agents);
  for (std::size_t b = 0; b < batch; ++b) {
    back.push_back(static_cast<std::uint32_t>(b));
    for (std::size_t i = 0; i < team; ++i) {
      back.push_back(static_cast<std::uint32_t>(batch + b * team + i));
    }
    for (std::size_t i = 0; i < team; ++i) {
      back.push_back(static_cast<std::uint32_t>(batch + batch * team + b * team + i));
    }
  }
  const Var disp = diff::gather_rows(g, grouped, std::move(back));
  return densify_controls(g, from_normalized(g, disp, scenes, s.agent_count()), scenes);
}

}  // namespace sparsetraj::models
