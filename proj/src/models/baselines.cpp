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
#include "sparsetraj/models/baselines.hpp"

#include <algorithm>
#include <string>

namespace sparsetraj::models
{
namespace
{

constexpr std::size_t kMlpDepth = 5;
constexpr std::size_t kSimpleGruLayers = 2;
constexpr std::size_t kEncDecLayers = 2;

std::size_t as_size(int v) {return static_cast<std::size_t>(v);}

// Frame t of every agent as one row per scene: [batch x 2 * agents].
diff::Array frame(const diff::Array & rows, std::size_t batch, std::size_t agents, std::size_t t)
{
  diff::Array out(batch, 2 * agents);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t a = 0; a < agents; ++a) {
      const double * src = rows.row(b * agents + a);
      out.at(b, 2 * a) = src[2 * t];
      out.at(b, 2 * a + 1) = src[2 * t + 1];
    }
  }
  return out;
}

}  // namespace

Var steps_to_rows(Graph & g, Var stacked, std::size_t steps, std::size_t batch, std::size_t agents)
{
  const Var pairs = diff::reshape(g, stacked, steps * batch * agents, 2);
  std::vector<std::uint32_t> index;
  index.reserve(steps * batch * agents);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t a = 0; a < agents; ++a) {
      for (std::size_t t = 0; t < steps; ++t) {
        index.push_back(static_cast<std::uint32_t>((t * batch + b) * agents + a));
      }
    }
  }
  return diff::reshape(g, diff::gather_rows(g, pairs, std::move(index)), batch * agents, 2 * steps);
}

// ---------------------------------------------------------------- mlp

MlpBaseline::MlpBaseline(const ModelSpec & spec)
: Predictor(spec)
{
  const std::size_t team = as_size(spec.team_size);
  const std::size_t in = spec.conditioned ?
    (1 + team) * as_size(2 * spec.full_length()) + team * as_size(2 * spec.input_len) :
    as_size(spec.agent_count()) * as_size(2 * spec.input_len);
  const std::size_t out = as_size(spec.predicted_agents()) * as_size(2 * spec.control_count());
  net_.emplace(parameters(), "mlp.net", in, as_size(spec.mlp_hidden), out, kMlpDepth, init_rng());
}

Predictor::Output MlpBaseline::forward(Graph & g, const SceneBatch & scenes)
{
  check_scenes(scenes);
  const ModelSpec & s = spec();
  const std::size_t lead = as_size(1 + s.team_size);
  const std::size_t team = as_size(s.team_size);
  const diff::Array ctx = context_rows(scenes, 0, s.team_size + 1);
  const diff::Array def = past_rows(scenes, s.team_size + 1, s.team_size);
  diff::Array x(scenes.batch, lead * ctx.cols() + team * def.cols());
  for (std::size_t b = 0; b < scenes.batch; ++b) {
    double * dst = x.row(b);
    for (std::size_t i = 0; i < lead; ++i) {
      dst = std::copy_n(ctx.row(b * lead + i), ctx.cols(), dst);
    }
    for (std::size_t i = 0; i < team; ++i) {
      dst = std::copy_n(def.row(b * team + i), def.cols(), dst);
    }
  }
  const Var out = (*net_)(g, g.input(std::move(x)));
  const Var disp = diff::reshape(g, out, scenes.batch * as_size(s.predicted_agents()),
      as_size(2 * s.control_count()));
  return densify_controls(g, from_normalized(g, disp, scenes, s.predicted_agents()), scenes);
}

// ---------------------------------------------------------------- simple gru

SimpleGru::SimpleGru(const ModelSpec & spec)
: Predictor(spec)
{
  const std::size_t width = 2 * as_size(spec.agent_count());
  gru_.emplace(parameters(), "sgru.gru", width, as_size(spec.gru_hidden), kSimpleGruLayers,
    init_rng());
  head_.emplace(parameters(), "sgru.head", as_size(spec.gru_hidden), width, init_rng());
}

Predictor::Output SimpleGru::forward(Graph & g, const SceneBatch & scenes)
{
  check_scenes(scenes);
  const ModelSpec & s = spec();
  const std::size_t agents = as_size(s.agent_count());
  const diff::Array past = past_rows(scenes, 0, s.agent_count());

  auto state = gru_->initial_state(g, scenes.batch);
  for (std::size_t t = 0; t < as_size(s.input_len); ++t) {
    state = gru_->step(g, g.input(frame(past, scenes.batch, agents, t)), state);
  }
  std::vector<Var> preds;
  preds.reserve(as_size(s.horizon));
  for (int h = 0; h < s.horizon; ++h) {
    const Var next = (*head_)(g, state.back());
    preds.push_back(next);
    if (h + 1 < s.horizon) {
      state = gru_->step(g, next, state);
    }
  }
  const Var dense = steps_to_rows(g, diff::concat_rows(g, preds), as_size(s.horizon),
      scenes.batch, agents);
  return select_and_densify(g, from_normalized(g, dense, scenes, s.agent_count()), scenes);
}

// ---------------------------------------------------------------- gru encoder-decoder

GruEncoderDecoder::GruEncoderDecoder(const ModelSpec & spec)
: Predictor(spec)
{
  const std::size_t width = 2 * as_size(spec.agent_count());
  const std::size_t hidden = as_size(spec.gru_hidden);
  encoder_.emplace(parameters(), "encdec.enc", width, hidden, kEncDecLayers, init_rng());
  decoder_.emplace(parameters(), "encdec.dec", width, hidden, kEncDecLayers, init_rng());
  head_.emplace(parameters(), "encdec.head", hidden, width, init_rng());
}

Predictor::Output GruEncoderDecoder::forward(Graph & g, const SceneBatch & scenes)
{
  check_scenes(scenes);
  const ModelSpec & s = spec();
  const std::size_t agents = as_size(s.agent_count());
  diff::Array past = scenes.past;
  for (double & v : past.values()) {
    v /= kPositionScale;
  }

  auto state = encoder_->initial_state(g, scenes.batch);
  Var prev{};
  for (std::size_t t = 0; t < as_size(s.input_len); ++t) {
    prev = g.input(frame(past, scenes.batch, agents, t));
    state = encoder_->step(g, prev, state);
  }
  const int k = s.control_count();
  std::vector<Var> controls;
  controls.reserve(as_size(k));
  for (int i = 0; i < k; ++i) {
    state = decoder_->step(g, prev, state);
    prev = (*head_)(g, state.back());
    controls.push_back(prev);
  }
  const Var stacked = steps_to_rows(g, diff::concat_rows(g, controls), as_size(k),
      scenes.batch, agents);
  return densify_controls(g, diff::scale(g, stacked, kPositionScale), scenes);
}

// ---------------------------------------------------------------- red-style

RedStyle::RedStyle(const ModelSpec & spec)
: Predictor(spec)
{
  const std::size_t hidden = as_size(spec.gru_hidden);
  gru_.emplace(parameters(), "red.gru", 2, hidden, 1, init_rng());
  head_.emplace(parameters(), "red.head", hidden, as_size(2 * spec.control_count()), init_rng());
}

Predictor::Output RedStyle::forward(Graph & g, const SceneBatch & scenes)
{
  check_scenes(scenes);
  const ModelSpec & s = spec();
  const std::size_t rows = scenes.batch * as_size(s.agent_count());
  const std::size_t n = as_size(s.input_len);
  // Pitch coordinates, scaled only, so no agent sees another.
  auto state = gru_->initial_state(g, rows);
  for (std::size_t t = 0; t < n; ++t) {
    diff::Array step(rows, 2);
    for (std::size_t r = 0; r < rows; ++r) {
      step.at(r, 0) = scenes.past.row(r)[2 * t] / kPositionScale;
      step.at(r, 1) = scenes.past.row(r)[2 * t + 1] / kPositionScale;
    }
    state = gru_->step(g, g.input(std::move(step)), state);
  }
  const Var out = diff::scale(g, (*head_)(g, state.back()), kPositionScale);
  return densify_controls(g, out, scenes);
}

// ---------------------------------------------------------------- autoregressive cnn

AutoregressiveCnn::AutoregressiveCnn(const ModelSpec & spec)
: Predictor(spec)
{
  const std::size_t width = 2 * as_size(spec.agent_count());
  const std::size_t channels = as_size(spec.cnn_channels);
  const std::size_t kernel = as_size(spec.cnn_kernel);
  std::size_t in = width;
  std::size_t dilation = 1;
  for (int l = 0; l < spec.cnn_layers; ++l) {
    const std::string name = "cnn.conv" + std::to_string(l);
    ConvLayer layer{
      &parameters().add_uniform(name + ".w", kernel * in, channels, kernel * in, init_rng()),
      &parameters().add_uniform(name + ".b", 1, channels, kernel * in, init_rng()),
      diff::ConvShape{as_size(spec.input_len), in, channels, kernel, dilation}};
    layers_.push_back(layer);
    in = channels;
    dilation *= 2;
  }
  head_.emplace(parameters(), "cnn.head", in, width, init_rng());
}

Predictor::Output AutoregressiveCnn::forward(Graph & g, const SceneBatch & scenes)
{
  check_scenes(scenes);
  const ModelSpec & s = spec();
  const std::size_t agents = as_size(s.agent_count());
  const std::size_t width = 2 * agents;
  const std::size_t n = as_size(s.input_len);
  const diff::Array past = past_rows(scenes, 0, s.agent_count());

  diff::Array init(scenes.batch, n * width);
  for (std::size_t t = 0; t < n; ++t) {
    const diff::Array f = frame(past, scenes.batch, agents, t);
    for (std::size_t b = 0; b < scenes.batch; ++b) {
      std::copy_n(f.row(b), width, init.row(b) + t * width);
    }
  }
  Var window = g.input(std::move(init));
  std::vector<Var> preds;
  preds.reserve(as_size(s.horizon));
  for (int h = 0; h < s.horizon; ++h) {
    Var x = window;
    for (const ConvLayer & layer : layers_) {
      x = diff::relu(g, diff::causal_conv1d(g, x, g.param(*layer.weight), g.param(*layer.bias),
        layer.shape));
    }
    const std::size_t channels = layers_.empty() ? width : layers_.back().shape.out_channels;
    const Var feat = diff::slice_cols(g, x, (n - 1) * channels, channels);
    const Var next = (*head_)(g, feat);
    preds.push_back(next);
    if (h + 1 < s.horizon) {
      window = n > 1 ?
        diff::concat_cols(g, {diff::slice_cols(g, window, width, (n - 1) * width), next}) : next;
    }
  }
  const Var dense = steps_to_rows(g, diff::concat_rows(g, preds), as_size(s.horizon),
      scenes.batch, agents);
  return select_and_densify(g, from_normalized(g, dense, scenes, s.agent_count()), scenes);
}

}  // namespace sparsetraj::models
