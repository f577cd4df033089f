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
#include "sparsetraj/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "sparsetraj/diffcore/adam.hpp"
#include "sparsetraj/diffcore/ops.hpp"

namespace sparsetraj::train
{

void TrainConfig::validate() const
{
  model.validate();
  if (epochs < 1) {
    throw ConfigError("train.epochs must be >= 1");
  }
  if (batch_size < 2) {
    throw ConfigError("train.batch_size must be >= 2 (batch norm needs two rows)");
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("train.learning_rate must be positive");
  }
  if (!(lr_decay > 0.0) || lr_decay > 1.0) {
    throw ConfigError("train.lr_decay must be in (0, 1]");
  }
  if (seeds.empty()) {
    throw ConfigError("train.seeds must not be empty");
  }
  if (max_grad_norm < 0.0) {
    throw ConfigError("train.max_grad_norm must be >= 0");
  }
  window().validate();
}

void TrainConfig::write(ConfigFile & cfg) const
{
  model.write(cfg);
  cfg.set("train", "epochs", std::to_string(epochs));
  cfg.set("train", "batch_size", std::to_string(batch_size));
  std::ostringstream lr;
  lr.precision(17);
  lr << learning_rate;
  cfg.set("train", "learning_rate", lr.str());
  std::ostringstream decay;
  decay.precision(17);
  decay << lr_decay;
  cfg.set("train", "lr_decay", decay.str());
  std::string list;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    list += (i ? "," : "") + std::to_string(seeds[i]);
  }
  cfg.set("train", "seeds", list);
  cfg.set("train", "flip_augment", flip_augment ? "true" : "false");
  std::ostringstream clip;
  clip.precision(17);
  clip << max_grad_norm;
  cfg.set("train", "max_grad_norm", clip.str());
}

TrainConfig TrainConfig::read(const ConfigFile & cfg)
{
  TrainConfig c;
  c.model = models::ModelSpec::read(cfg);
  const auto & s = cfg.section("train");
  c.epochs = static_cast<int>(config::get_int(s, "epochs", c.epochs));
  c.batch_size = static_cast<int>(config::get_int(s, "batch_size", c.batch_size));
  c.learning_rate = config::get_double(s, "learning_rate", c.learning_rate);
  c.lr_decay = config::get_double(s, "lr_decay", c.lr_decay);
  c.flip_augment = config::get_bool(s, "flip_augment", c.flip_augment);
  c.max_grad_norm = config::get_double(s, "max_grad_norm", c.max_grad_norm);
  const std::string list = config::get_string(s, "seeds", "");
  if (!list.empty()) {
    c.seeds.clear();
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        c.seeds.push_back(std::stoull(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
          throw std::invalid_argument(item);
        }
      } catch (const std::exception &) {
        throw ConfigError("train.seeds: bad seed '" + item + "'");
      }
    }
  }
  c.validate();
  return c;
}

std::uint64_t TrainConfig::hash() const
{
  ConfigFile cfg;
  write(cfg);
  return diff::fnv1a64(cfg.dump());
}

TrainConfig low_lr_preset(TrainConfig base)
{
  base.learning_rate = 1e-6;
  return base;
}

double huber_loss(const diff::Array & target, const diff::Array & prediction)
{
  if (!target.same_shape(prediction)) {
    throw diff::ShapeError("huber_loss: target " + target.shape_string() + " vs prediction " +
            prediction.shape_string());
  }
  if (target.size() == 0) {
    throw diff::ShapeError("huber_loss: empty input");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = std::abs(prediction.values()[i] - target.values()[i]);
    total += d < 1.0 ? 0.5 * d * d : d - 0.5;
  }
  // (1/2) sum over the two coordinates, averaged over points.
  return 0.5 * total / (static_cast<double>(target.size()) / 2.0);
}

diff::Var huber_loss(diff::Graph & g, diff::Var prediction, diff::Var target)
{
  return diff::mean_reduce(g, diff::huber_elementwise(g, prediction, target));
}

diff::Array target_rows(const models::SceneBatch & scenes, const models::ModelSpec & spec)
{
  if (!scenes.has_future()) {
    throw std::invalid_argument("target_rows: scenes carry no future");
  }
  return models::select_agents(scenes.future, scenes.batch, scenes.agents(),
           spec.first_predicted_agent(), spec.predicted_agents());
}

namespace
{

double mean_l2_cm(const diff::Array & target, const diff::Array & pred)
{
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < target.size(); i += 2) {
    total += std::hypot(pred.values()[i] - target.values()[i],
        pred.values()[i + 1] - target.values()[i + 1]);
    ++count;
  }
  return count ? 100.0 * total / static_cast<double>(count) : 0.0;
}

void write_metrics(const std::filesystem::path & path, const std::vector<EpochMetrics> & history)
{
  std::ofstream out(path);
  out.precision(10);
  out << "epoch,train_loss,val_loss,lr\n";
  for (const auto & m : history) {
    out << m.epoch << ',' << m.train_loss << ',' << m.val_loss << ',' << m.lr << '\n';
  }
}

}  // namespace

ValidationScore validate_model(const models::Predictor & model,
  const std::vector<data::PredictionWindow> & windows, std::size_t batch_size)
{
  ValidationScore score;
  if (windows.empty()) {
    return score;
  }
  double loss = 0.0;
  double l2 = 0.0;
  std::size_t weight = 0;
  for (std::size_t begin = 0; begin < windows.size(); begin += batch_size) {
    const std::size_t n = std::min(batch_size, windows.size() - begin);
    const auto scenes = data::to_scene_batch(
      std::span<const data::PredictionWindow>(windows.data() + begin, n), true);
    const auto pred = models::predict(model, scenes);
    const auto target = target_rows(scenes, model.spec());
    loss += huber_loss(target, pred.dense) * static_cast<double>(n);
    l2 += mean_l2_cm(target, pred.dense) * static_cast<double>(n);
    weight += n;
  }
  score.loss = loss / static_cast<double>(weight);
  score.l2_cm = l2 / static_cast<double>(weight);
  return score;
}

SeedResult train_seed(const TrainConfig & config, std::uint64_t seed,
  const std::vector<data::PredictionWindow> & train_windows,
  const std::vector<data::PredictionWindow> & val_windows, const RunOptions & options)
{
  config.validate();
  SeedResult result;
  result.seed = seed;
  if (train_windows.size() < 2) {
    result.error = "need at least two training windows";
    return result;
  }
  const auto log = [&](const std::string & line) {
      if (options.log) {
        options.log(line);
      }
    };

  models::ModelSpec spec = config.model;
  spec.init_seed = seed;
  std::unique_ptr<models::Predictor> model = models::make_predictor(spec);
  diff::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  adam_cfg.epoch_decay = config.lr_decay;
  if (config.max_grad_norm > 0.0) {
    adam_cfg.max_grad_norm = config.max_grad_norm;
  }
  diff::Adam adam(model->parameters(), adam_cfg);
  std::mt19937_64 rng(seed ^ 0x5eed5eedULL);

  std::filesystem::path seed_dir;
  if (!options.out_dir.empty()) {
    seed_dir = options.out_dir / ("seed_" + std::to_string(seed));
    std::filesystem::create_directories(seed_dir);
  }

  const bool has_params = !model->parameters().trainable().empty();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  std::vector<std::size_t> order(train_windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::optional<diff::Checkpoint> best;
  double best_l2 = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t n = std::min(batch, order.size() - begin);
      if (n < 2) {
        continue;
      }
      std::vector<data::PredictionWindow> flipped;
      std::vector<const data::PredictionWindow *> picked;
      flipped.reserve(n);
      picked.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto & w = train_windows[order[begin + i]];
        if (config.flip_augment) {
          const bool fx = std::bernoulli_distribution(0.5)(rng);
          const bool fy = std::bernoulli_distribution(0.5)(rng);
          flipped.push_back(data::augment_flip(w, fx, fy));
          picked.push_back(&flipped.back());
        } else {
          picked.push_back(&w);
        }
      }
      const auto scenes = data::to_scene_batch(
        std::span<const data::PredictionWindow * const>(picked), true);
      diff::Graph g(true);
      const auto out = model->forward(g, scenes);
      const diff::Var loss = huber_loss(g, out.dense, g.input(target_rows(scenes, spec)));
      const double value = g.value(loss)[0];
      if (!std::isfinite(value)) {
        result.error = "non-finite training loss at epoch " + std::to_string(epoch) +
          ", batch " + std::to_string(batches);
        log("seed " + std::to_string(seed) + ": " + result.error);
        result.history.push_back({epoch, value, NAN, NAN, adam.learning_rate()});
        if (!seed_dir.empty()) {
          write_metrics(seed_dir / "metrics.csv", result.history);
        }
        return result;
      }
      loss_sum += value;
      ++batches;
      if (has_params) {
        model->parameters().zero_grad();
        g.backward(loss);
        try {
          adam.step();
        } catch (const diff::NonFiniteGradient & e) {
          result.error = std::string(e.what()) + " at epoch " + std::to_string(epoch);
          log("seed " + std::to_string(seed) + ": " + result.error);
          if (!seed_dir.empty()) {
            write_metrics(seed_dir / "metrics.csv", result.history);
          }
          return result;
        }
      }
    }
    adam.end_epoch();
    EpochMetrics m;
    m.epoch = epoch;
    m.lr = adam.learning_rate();
    m.train_loss = batches ? loss_sum / static_cast<double>(batches) : 0.0;
    const ValidationScore val = validate_model(*model, val_windows.empty() ? train_windows : val_windows);
    m.val_loss = val.loss;
    m.val_l2_cm = val.l2_cm;
    result.history.push_back(m);
    if (!std::isfinite(val.l2_cm)) {
      result.error = "non-finite validation error at epoch " + std::to_string(epoch);
      log("seed " + std::to_string(seed) + ": " + result.error);
      break;
    }
    if (val.l2_cm < best_l2 || !best) {
      best_l2 = val.l2_cm;
      result.best_epoch = epoch;
      best = models::make_checkpoint(*model);
      best->metadata["seed"] = seed;
      best->metadata["epoch"] = epoch;
      best->metadata["config_hash"] = diff::hex64(config.hash());
    }
    std::ostringstream line;
    line.precision(5);
    line << "seed " << seed << " epoch " << epoch << " train_loss " << m.train_loss <<
      " val_loss " << m.val_loss << " val_l2_cm " << m.val_l2_cm << " lr " << m.lr;
    log(line.str());
  }

  diff::Checkpoint last = models::make_checkpoint(*model, &adam);
  last.metadata["seed"] = seed;
  last.metadata["epoch"] = result.history.empty() ? 0 : result.history.back().epoch;
  last.metadata["config_hash"] = diff::hex64(config.hash());
  result.checkpoint_hash = diff::hex64(diff::fnv1a64(diff::serialize(last)));
  result.best_val_l2_cm = best_l2;
  if (best) {
    result.model = models::load_predictor(*best);
  }
  if (!seed_dir.empty()) {
    write_metrics(seed_dir / "metrics.csv", result.history);
    diff::save_checkpoint(seed_dir / "last.ckpt", last);
    if (best) {
      result.best_checkpoint = seed_dir / "best.ckpt";
      diff::save_checkpoint(result.best_checkpoint, *best);
    }
  }
  result.ok = result.error.empty() && best.has_value();
  return result;
}

std::vector<SeedResult> train(const TrainConfig & config,
  const std::vector<data::PredictionWindow> & train_windows,
  const std::vector<data::PredictionWindow> & val_windows, const RunOptions & options)
{
  config.validate();
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    ConfigFile cfg;
    config.write(cfg);
    std::ofstream(options.out_dir / "config.ini") << cfg.dump();
  }
  std::vector<SeedResult> results;
  for (std::uint64_t seed : config.seeds) {
    try {
      results.push_back(train_seed(config, seed, train_windows, val_windows, options));
    } catch (const std::exception & e) {
      SeedResult failed;
      failed.seed = seed;
      failed.error = e.what();
      results.push_back(std::move(failed));
    }
  }
  if (!options.out_dir.empty()) {
    nlohmann::json summary;
    summary["config_hash"] = diff::hex64(config.hash());
    summary["train_windows"] = train_windows.size();
    summary["val_windows"] = val_windows.size();
    summary["seeds"] = nlohmann::json::array();
    for (const auto & r : results) {
      nlohmann::json s;
      s["seed"] = r.seed;
      s["ok"] = r.ok;
      s["error"] = r.error;
      s["best_epoch"] = r.best_epoch;
      s["best_val_l2_cm"] = r.ok ? nlohmann::json(r.best_val_l2_cm) : nlohmann::json(nullptr);
      s["final_checkpoint_hash"] = r.checkpoint_hash;
      s["best_checkpoint"] = r.best_checkpoint.empty() ? "" :
        std::filesystem::relative(r.best_checkpoint, options.out_dir).generic_string();
      summary["seeds"].push_back(s);
    }
    std::ofstream(options.out_dir / "summary.json") << summary.dump(2) << '\n';
  }
  return results;
}

}  // namespace sparsetraj::train
