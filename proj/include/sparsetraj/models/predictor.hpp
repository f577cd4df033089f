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

#ifndef SPARSETRAJ__MODELS__PREDICTOR_HPP_
#define SPARSETRAJ__MODELS__PREDICTOR_HPP_

#include <memory>
#include <optional>
#include <random>

#include "sparsetraj/diffcore/checkpoint.hpp"
#include "sparsetraj/diffcore/graph.hpp"
#include "sparsetraj/diffcore/parameters.hpp"
#include "sparsetraj/models/model_spec.hpp"
#include "sparsetraj/models/scene.hpp"
#include "sparsetraj/motion_model.hpp"

namespace sparsetraj::models
{

/// Common base of every trajectory predictor. Subclasses register their
/// parameters in the constructor and record a forward pass on demand.
class Predictor
{
public:
  struct Output
  {
    diff::Var dense;                       // [batch * predicted x horizon * 2]
    std::optional<diff::Var> controls;     // [batch * predicted x 2K]
  };

  explicit Predictor(ModelSpec spec);
  virtual ~Predictor() = default;

  Predictor(const Predictor &) = delete;
  Predictor & operator=(const Predictor &) = delete;

  const ModelSpec & spec() const {return spec_;}
  diff::ParameterSet & parameters() {return params_;}
  const diff::ParameterSet & parameters() const {return params_;}
  const motion::LinearInterpolant & interpolant() const {return interp_;}

  /// Records the forward pass for `scenes` on `g`. Training graphs update
  /// batch-norm running statistics.
  virtual Output forward(diff::Graph & g, const SceneBatch & scenes) = 0;

protected:
  /// Checks the batch against the spec (team size, lengths, future present
  /// when conditioned). Throws std::invalid_argument.
  void check_scenes(const SceneBatch & scenes) const;

  /// Densifies model-emitted controls [rows x 2K] through the motion model.
  Output densify_controls(diff::Graph & g, diff::Var controls, const SceneBatch & scenes) const;

  /// For dense-by-construction models: keeps the control offsets of a dense
  /// output [rows x 2H] and densifies them again. Identity when stride is 1.
  Output select_and_densify(diff::Graph & g, diff::Var dense, const SceneBatch & scenes) const;

  /// Positions fed to networks are relative to the scene origin (centroid
  /// of the last observed positions) and divided by this scale.
  static constexpr double kPositionScale = 10.0;

  /// Scene origins as [batch x 2].
  diff::Array scene_origins(const SceneBatch & scenes) const;

  /// Normalized past rows of agents [first, first + count). [batch * count x past_len * 2]
  diff::Array past_rows(const SceneBatch & scenes, int first, int count) const;

  /// Normalized ball and attacker rows: full-length (past + future) for
  /// conditioned models, otherwise past only. [batch * count x len * 2]
  diff::Array context_rows(const SceneBatch & scenes, int first, int count) const;

  /// Maps normalized positions [batch * count x 2L] back to pitch metres.
  diff::Var from_normalized(
    diff::Graph & g, diff::Var x, const SceneBatch & scenes, int count) const;

  std::mt19937_64 & init_rng() {return rng_;}

private:
  ModelSpec spec_;
  diff::ParameterSet params_;
  motion::LinearInterpolant interp_;
  std::mt19937_64 rng_;
};

/// Builds the predictor for spec.kind with parameters drawn from
/// spec.init_seed.
std::unique_ptr<Predictor> make_predictor(const ModelSpec & spec);

/// Inference in eval mode (batch norm uses running statistics). Does not
/// modify the predictor; safe to call concurrently on a shared instance.
ScenePrediction predict(const Predictor & model, const SceneBatch & scenes);

/// Checkpoint with the parameters and the embedded spec.
diff::Checkpoint make_checkpoint(const Predictor & model, const diff::Adam * optimizer = nullptr);

/// Rebuilds a predictor from a checkpoint's embedded spec and parameters.
/// Throws diff::CheckpointError when `expected` is given and differs
/// architecturally from the embedded spec.
std::unique_ptr<Predictor> load_predictor(
  const diff::Checkpoint & ckpt, const ModelSpec * expected = nullptr);

}  // namespace sparsetraj::models

#endif  // SPARSETRAJ__MODELS__PREDICTOR_HPP_
