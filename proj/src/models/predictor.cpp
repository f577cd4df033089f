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
#include "sparsetraj/models/predictor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "sparsetraj/diffcore/ops.hpp"
#include "sparsetraj/models/baselines.hpp"
#include "sparsetraj/models/granma.hpp"
#include "sparsetraj/models/linear_extrapolation.hpp"

namespace sparsetraj::models
{

Predictor::Predictor(ModelSpec spec)
: spec_((spec.validate(), spec)),
  interp_(spec.horizon, spec.output_stride, motion::MotionOrder(spec.order)),
  rng_(spec.init_seed)
{
}

void Predictor::check_scenes(const SceneBatch & scenes) const
{
  scenes.validate();
  if (scenes.team_size != spec_.team_size) {
    throw std::invalid_argument(
      "scene has " + std::to_string(scenes.team_size) + " players per team, model expects " +
      std::to_string(spec_.team_size));
  }
  if (scenes.past_len != spec_.input_len) {
    throw std::invalid_argument(
      "scene past length " + std::to_string(scenes.past_len) + " does not match model input_len " +
      std::to_string(spec_.input_len));
  }
  if (spec_.conditioned && (!scenes.has_future() || scenes.future_len != spec_.horizon)) {
    throw std::invalid_argument(
      "conditioned model needs full ball/attacker trajectories covering horizon " +
      std::to_string(spec_.horizon));
  }
}

diff::Array Predictor::scene_origins(const SceneBatch & scenes) const
{
  diff::Array origins(scenes.batch, 2);
  const std::size_t last = 2 * static_cast<std::size_t>(scenes.past_len - 1);
  const double inv = 1.0 / static_cast<double>(scenes.agents());
  for (std::size_t b = 0; b < scenes.batch; ++b) {
    for (int a = 0; a < scenes.agents(); ++a) {
      const double * row = scenes.past.row(scenes.row(b, a));
      origins.at(b, 0) += row[last] * inv;
      origins.at(b, 1) += row[last + 1] * inv;
    }
  }
  return origins;
}

namespace
{

void normalize_rows(diff::Array & rows, const diff::Array & origins, int count, double scale)
{
  const double inv = 1.0 / scale;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const std::size_t b = r / static_cast<std::size_t>(count);
    double * row = rows.row(r);
    for (std::size_t c = 0; c < rows.cols(); c += 2) {
      row[c] = (row[c] - origins.at(b, 0)) * inv;
      row[c + 1] = (row[c + 1] - origins.at(b, 1)) * inv;
    }
  }
}

}  // namespace

diff::Array Predictor::past_rows(const SceneBatch & scenes, int first, int count) const
{
  diff::Array rows = select_agents(scenes.past, scenes.batch, scenes.agents(), first, count);
  normalize_rows(rows, scene_origins(scenes), count, kPositionScale);
  return rows;
}

diff::Array Predictor::context_rows(const SceneBatch & scenes, int first, int count) const
{
  const diff::Array past = select_agents(scenes.past, scenes.batch, scenes.agents(), first, count);
  diff::Array out = past;
  if (spec_.conditioned) {
    const diff::Array future =
      select_agents(scenes.future, scenes.batch, scenes.agents(), first, count);
    out = diff::Array(past.rows(), past.cols() + future.cols());
    for (std::size_t r = 0; r < past.rows(); ++r) {
      std::copy_n(past.row(r), past.cols(), out.row(r));
      std::copy_n(future.row(r), future.cols(), out.row(r) + past.cols());
    }
  }
  normalize_rows(out, scene_origins(scenes), count, kPositionScale);
  return out;
}

diff::Var Predictor::from_normalized(
  diff::Graph & g, diff::Var x, const SceneBatch & scenes, int count) const
{
  const diff::Array origins = scene_origins(scenes);
  const diff::Array & xv = g.value(x);
  diff::Array offset(xv.rows(), xv.cols());
  for (std::size_t r = 0; r < offset.rows(); ++r) {
    const std::size_t b = r / static_cast<std::size_t>(count);
    for (std::size_t c = 0; c < offset.cols(); c += 2) {
      offset.at(r, c) = origins.at(b, 0);
      offset.at(r, c + 1) = origins.at(b, 1);
    }
  }
  return diff::add(g, diff::scale(g, x, kPositionScale), g.input(std::move(offset)));
}

Predictor::Output Predictor::densify_controls(
  diff::Graph & g, diff::Var controls, const SceneBatch & scenes) const
{
  const diff::Array anchors = anchor_rows(scenes, spec_.first_predicted_agent(),
      spec_.predicted_agents(), motion::MotionOrder(spec_.order));
  return {diff::interpolate(g, controls, anchors, interp_), controls};
}

Predictor::Output Predictor::select_and_densify(
  diff::Graph & g, diff::Var dense, const SceneBatch & scenes) const
{
  if (spec_.output_stride == 1) {
    return {dense, std::nullopt};
  }
  const std::size_t rows = g.value(dense).rows();
  const auto horizon = static_cast<std::size_t>(spec_.horizon);
  const auto & offsets = interp_.offsets();
  std::vector<std::uint32_t> pick;
  pick.reserve(rows * offsets.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (int offset : offsets) {
      pick.push_back(static_cast<std::uint32_t>(r * horizon + static_cast<std::size_t>(offset - 1)));
    }
  }
  const diff::Var steps = diff::reshape(g, dense, rows * horizon, 2);
  const diff::Var picked = diff::gather_rows(g, steps, std::move(pick));
  const diff::Var controls = diff::reshape(g, picked, rows, 2 * offsets.size());
  return densify_controls(g, controls, scenes);
}

std::unique_ptr<Predictor> make_predictor(const ModelSpec & spec)
{
  spec.validate();
  switch (spec.kind) {
    case ModelKind::lin_ext:
      return std::make_unique<LinearExtrapolation>(spec);
    case ModelKind::mlp:
      return std::make_unique<MlpBaseline>(spec);
    case ModelKind::simple_gru:
      return std::make_unique<SimpleGru>(spec);
    case ModelKind::gru_encdec:
      return std::make_unique<GruEncoderDecoder>(spec);
    case ModelKind::red_style:
      return std::make_unique<RedStyle>(spec);
    case ModelKind::autoreg_cnn:
      return std::make_unique<AutoregressiveCnn>(spec);
    case ModelKind::granma:
      return std::make_unique<GranMa>(spec);
  }
  throw ConfigError("make_predictor: unhandled model kind");
}

ScenePrediction predict(const Predictor & model, const SceneBatch & scenes)
{
  diff::Graph g(false);
  // An eval-mode graph only reads parameters and running statistics.
  auto & mutable_model = const_cast<Predictor &>(model);
  const Predictor::Output out = mutable_model.forward(g, scenes);

  const ModelSpec & spec = model.spec();
  ScenePrediction pred;
  pred.batch = scenes.batch;
  pred.first_agent = spec.first_predicted_agent();
  pred.agents = spec.predicted_agents();
  pred.horizon = spec.horizon;
  pred.dense = g.value(out.dense);
  if (out.controls) {
    pred.controls = g.value(*out.controls);
    pred.control_offsets = model.interpolant().offsets();
  }
  return pred;
}

diff::Checkpoint make_checkpoint(const Predictor & model, const diff::Adam * optimizer)
{
  diff::Checkpoint ckpt = diff::capture(model.parameters(), optimizer);
  ckpt.metadata["model_spec"] = model.spec().to_json();
  ckpt.metadata["architecture_hash"] = diff::hex64(model.spec().architecture_hash());
  return ckpt;
}

std::unique_ptr<Predictor> load_predictor(const diff::Checkpoint & ckpt, const ModelSpec * expected)
{
  if (!ckpt.metadata.contains("model_spec")) {
    throw diff::CheckpointError("checkpoint has no embedded model spec");
  }
  ModelSpec spec;
  try {
    spec = ModelSpec::from_json(ckpt.metadata.at("model_spec"));
  } catch (const ConfigError & e) {
    throw diff::CheckpointError(std::string("checkpoint model spec invalid: ") + e.what());
  }
  if (expected != nullptr && expected->architecture_hash() != spec.architecture_hash()) {
    throw diff::CheckpointError(
      "checkpoint was trained for a different model spec (" + spec.to_json().dump() + ")");
  }
  auto model = make_predictor(spec);
  diff::restore(ckpt, model->parameters());
  return model;
}

}  // namespace sparsetraj::models
