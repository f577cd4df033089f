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
#ifndef SPARSETRAJ__MODELS__BASELINES_HPP_
#define SPARSETRAJ__MODELS__BASELINES_HPP_

#include <optional>
#include <vector>

#include "sparsetraj/models/layers.hpp"
#include "sparsetraj/models/predictor.hpp"

namespace sparsetraj::models
{

/// Flattens every agent's (normalized) history of a scene into one vector
/// and regresses all control points with a residual MLP.
class MlpBaseline : public Predictor
{
public:
  explicit MlpBaseline(const ModelSpec & spec);
  Output forward(diff::Graph & g, const SceneBatch & scenes) override;

private:
  std::optional<ResidualMlp> net_;
};

/// Two-layer GRU over scene frames; warms up on the past and then rolls out
/// one frame at a time, feeding its own predictions back. Dense output.
class SimpleGru : public Predictor
{
public:
  explicit SimpleGru(const ModelSpec & spec);
  Output forward(diff::Graph & g, const SceneBatch & scenes) override;

private:
  std::optional<GruStack> gru_;
  std::optional<Linear> head_;
};

/// GRU encoder over past frames; a GRU decoder seeded with the encoder state
/// emits one control point per step, starting from the last observed frame.
class GruEncoderDecoder : public Predictor
{
public:
  explicit GruEncoderDecoder(const ModelSpec & spec);
  Output forward(diff::Graph & g, const SceneBatch & scenes) override;

private:
  std::optional<GruStack> encoder_;
  std::optional<GruStack> decoder_;
  std::optional<Linear> head_;
};

/// Per-agent recurrent encoder with a single affine head. Agents never see
/// each other.
class RedStyle : public Predictor
{
public:
  explicit RedStyle(const ModelSpec & spec);
  Output forward(diff::Graph & g, const SceneBatch & scenes) override;

private:
  std::optional<GruStack> gru_;
  std::optional<Linear> head_;
};

/// Stack of dilated causal convolutions over a sliding window of the last
/// input_len frames; predicts one frame at a time autoregressively.
class AutoregressiveCnn : public Predictor
{
public:
  explicit AutoregressiveCnn(const ModelSpec & spec);
  Output forward(diff::Graph & g, const SceneBatch & scenes) override;

private:
  struct ConvLayer
  {
    diff::Parameter * weight;
    diff::Parameter * bias;
    diff::ConvShape shape;
  };

  std::vector<ConvLayer> layers_;
  std::optional<Linear> head_;
};

/// Reorders stacked per-step blocks [steps * batch * agents x 2] (row
/// (t * batch + b) * agents + a) into [batch * agents x 2 * steps].
diff::Var steps_to_rows(diff::Graph & g, diff::Var stacked, std::size_t steps, std::size_t batch,
  std::size_t agents);

}  // namespace sparsetraj::models

#endif  // SPARSETRAJ__MODELS__BASELINES_HPP_
