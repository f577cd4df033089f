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

#ifndef SPARSETRAJ__MODELS__GRANMA_HPP_
#define SPARSETRAJ__MODELS__GRANMA_HPP_

#include <optional>

#include "sparsetraj/models/layers.hpp"
#include "sparsetraj/models/predictor.hpp"

namespace sparsetraj::models
{

/// Graph-network + multi-head-attention predictor.
///
/// Each team's trajectories are MLP-encoded and passed through a
/// fully connected team graph layer; the ball is MLP-encoded only. All
/// agent embeddings of a scene then go through one multi-head self-attention
/// block with a residual connection, and per-group MLP decoders (shared
/// within a group, so the model stays team-order equivariant) emit control
/// points that the motion model densifies. Conditioned models read full
/// ball/attacker trajectories and decode defenders only.
class GranMa : public Predictor
{
public:
  explicit GranMa(const ModelSpec & spec);

  Output forward(diff::Graph & g, const SceneBatch & scenes) override;

private:
  struct TeamEncoder
  {
    ResidualMlp encoder;
    ResidualMlp edge;
    ResidualMlp node;
  };

  Var encode_team(Graph & g, const TeamEncoder & team, const diff::Array & rows) const;

  std::optional<ResidualMlp> ball_encoder_;
  std::optional<TeamEncoder> attackers_;
  std::optional<TeamEncoder> defenders_;
  std::optional<Linear> query_;
  std::optional<Linear> key_;
  std::optional<Linear> value_;
  std::optional<Linear> mix_;
  std::optional<ResidualMlp> ball_decoder_;
  std::optional<ResidualMlp> attacker_decoder_;
  std::optional<ResidualMlp> defender_decoder_;
};

}  // namespace sparsetraj::models

#endif  // SPARSETRAJ__MODELS__GRANMA_HPP_
