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
#ifndef SPARSETRAJ__TRAINING_HPP_
#define SPARSETRAJ__TRAINING_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sparsetraj/config.hpp"
#include "sparsetraj/dataio/windows.hpp"
#include "sparsetraj/diffcore/array.hpp"
#include "sparsetraj/diffcore/checkpoint.hpp"
#include "sparsetraj/diffcore/graph.hpp"
#include "sparsetraj/models/model_spec.hpp"
#include "sparsetraj/models/predictor.hpp"

namespace sparsetraj::train
{

/// Optimization settings. Window length and past length follow the model
/// spec (T = input_len + horizon, n = input_len).
///
/// Config file section [train]: epochs, batch_size, learning_rate,
/// lr_decay, seeds (comma separated), flip_augment, max_grad_norm
/// (0 = off), val_every.
struct TrainConfig
{
  models::ModelSpec model;
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 5e-4;
  double lr_decay = 0.999;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6};
  bool flip_augment = true;
  double max_grad_norm = 0.0;

  data::WindowParams window() const {return {model.full_length(), model.input_len};}

  /// Throws ConfigError.
  void validate() const;
  void write(ConfigFile & cfg) const;
  static TrainConfig read(const ConfigFile & cfg);
  /// Fingerprint of the full configuration.
  std::uint64_t hash() const;
};

/// Small learning rate for the recurrent/convolutional autoregressive
/// baselines (1e-6).
TrainConfig low_lr_preset(TrainConfig base);

/// Mean over trajectories and steps of (1/2) sum_{x,y} huber(d), unit
/// threshold, metres. Shapes must match.
double huber_loss(const diff::Array & target, const diff::Array & prediction);
/// Differentiable version of huber_loss as a 1x1 node.
diff::Var huber_loss(diff::Graph & g, diff::Var prediction, diff::Var target);

/// Future rows of the predicted agents: [batch * predicted x horizon * 2].
diff::Array target_rows(const models::SceneBatch & scenes, const models::ModelSpec & spec);

struct EpochMetrics
{
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_l2_cm = 0.0;
  double lr = 0.0;           // after the end-of-epoch decay
};

struct SeedResult
{
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int best_epoch = 0;
  double best_val_l2_cm = 0.0;
  std::vector<EpochMetrics> history;
  /// Best-validation state, loaded.
  std::shared_ptr<models::Predictor> model;
  std::string checkpoint_hash;   // of the final-epoch checkpoint
  std::filesystem::path best_checkpoint;
};

struct RunOptions
{
  /// Run directory; nothing is written when empty.
  std::filesystem::path out_dir;
  /// Progress lines (one per epoch); silent when unset.
  std::function<void (const std::string &)> log;
};

/// Trains one seed. Non-finite losses or gradients end the seed with
/// ok = false and a diagnostic in `error`.
SeedResult train_seed(const TrainConfig & config, std::uint64_t seed,
  const std::vector<data::PredictionWindow> & train_windows,
  const std::vector<data::PredictionWindow> & val_windows, const RunOptions & options = {});

/// Trains every configured seed. Layout under options.out_dir:
///
///   config.ini                 snapshot of the configuration
///   seed_<s>/metrics.csv       epoch,train_loss,val_loss,lr
///   seed_<s>/best.ckpt         best validation L2
///   seed_<s>/last.ckpt         final epoch, with optimizer state
///   summary.json               per-seed outcome
std::vector<SeedResult> train(const TrainConfig & config,
  const std::vector<data::PredictionWindow> & train_windows,
  const std::vector<data::PredictionWindow> & val_windows, const RunOptions & options = {});

/// Mean Huber loss and mean L2 (cm) of a model over windows, eval mode.
struct ValidationScore
{
  double loss = 0.0;
  double l2_cm = 0.0;
};
ValidationScore validate_model(const models::Predictor & model,
  const std::vector<data::PredictionWindow> & windows, std::size_t batch_size = 256);

}  // namespace sparsetraj::train

#endif  // SPARSETRAJ__TRAINING_HPP_
