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

// Acceptance run: one PASS/FAIL line per criterion on stdout and in
// acceptance_report.txt (working directory), progress on stderr. Exit status
// 1 when any criterion fails.
//
//   acceptance [--only name[,name...]] [--report path]
//
// Names: interpolation, gradients, equivariance, oracles, windowing, trends,
// baselines. "trends" covers the three training experiments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "../support/primitive_checks.hpp"
#include "../support/scenes.hpp"
#include "sparsetraj/dataio/manifest.hpp"
#include "sparsetraj/dataio/synth.hpp"
#include "sparsetraj/dataio/windows.hpp"
#include "sparsetraj/diffcore/grad_check.hpp"
#include "sparsetraj/evaluation.hpp"
#include "sparsetraj/models/predictor.hpp"
#include "sparsetraj/motion_model.hpp"
#include "sparsetraj/training.hpp"

using namespace sparsetraj;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;
std::ofstream report_file;

void emit(const std::string & line)
{
  std::printf("%s\n", line.c_str());
  std::fflush(stdout);
  if (report_file.is_open()) {
    report_file << line << std::endl;
  }
}

void report(bool ok, const std::string & name, const std::string & detail)
{
  emit(std::string(ok ? "PASS" : "FAIL") + "  " + name + ": " + detail);
  if (!ok) {
    ++failures;
  }
}

std::string fmt(const char * format, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

void progress(const std::string & line)
{
  std::cerr << "# " << line << std::endl;
}

motion::KinematicState exact_anchor(const oracle::Taylor & p)
{
  motion::KinematicState a;
  a.position = p.c[0];
  a.derivatives = {p.c[1], p.c[2], p.c[3]};
  return a;
}

int max_segments(int order)
{
  return order <= 2 ? 40 : order == 3 ? 8 : 5;
}

void interpolation_oracle()
{
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  bool endpoints = true;
  int segments_checked = 0;
  for (int order = 1; order <= 3; ++order) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto p = oracle::Taylor::random(order, rng);
      const int duration = 1 + static_cast<int>(rng() % 60);
      motion::SparseTrack track;
      track.anchor = exact_anchor(p);
      track.stride = duration;
      track.controls.push_back({duration, p(duration)});
      const auto dense = motion::densify(track, motion::MotionOrder(order));
      for (int t = 1; t <= duration; ++t) {
        worst = std::max(worst, std::abs(dense[t - 1] - p(t)) / std::max(1.0, std::abs(p(t))));
      }
      endpoints = endpoints && dense.back() == p(duration);
      ++segments_checked;

      // Same polynomial through a chain of segments with carried derivatives.
      const int stride = 1 + static_cast<int>(rng() % 10);
      const int segments = 1 + static_cast<int>(rng() % max_segments(order));
      const int horizon = segments * stride;
      motion::SparseTrack chain;
      chain.anchor = exact_anchor(p);
      chain.stride = stride;
      for (int off : motion::control_offsets(horizon, stride)) {
        chain.controls.push_back({off, p(off)});
      }
      const auto chained = motion::densify(chain, motion::MotionOrder(order));
      for (int t = 1; t <= horizon; ++t) {
        worst = std::max(worst, std::abs(chained[t - 1] - p(t)) / std::max(1.0, std::abs(p(t))));
      }
      for (const auto & c : chain.controls) {
        endpoints = endpoints && chained[c.offset - 1] == c.position;
      }
    }
  }
  const double elapsed = seconds_since(start);
  report(worst <= 1e-9 && endpoints && elapsed < 10.0, "interpolation oracle",
    fmt("%d segments + chains for orders 1-3, max relative error %.3g (<= 1e-9), "
    "endpoints %s, %.2f s (< 10 s)", segments_checked, worst, endpoints ? "exact" : "NOT exact",
    elapsed));
}

diff::GradCheckReport granma_grad_check(bool conditioned, int order, std::mt19937_64 & rng)
{
  models::ModelSpec spec;
  spec.embedding_width = 8;
  spec.decoder_hidden = 8;
  spec.heads = 4;
  spec.output_stride = 4;
  spec.order = order;
  spec.conditioned = conditioned;
  spec.init_seed = rng();
  auto model = models::make_predictor(spec);
  const auto scenes = scenes::random_batch(8, rng);
  const auto target = train::target_rows(scenes, spec);
  return diff::grad_check(model->parameters(),
           [&](diff::Graph & g) {
             const auto out = model->forward(g, scenes);
             return train::huber_loss(g, out.dense, g.input(target));
           },
           1e-6, 1e-3, true);
}

void gradient_contract()
{
  const auto start = Clock::now();
  const auto primitives = primitive_checks::run_all(primitive_checks::kShapesPerPrimitive);
  double worst_primitive = 0.0;
  std::string worst_name;
  for (const auto & r : primitives) {
    if (r.worst_relative_error >= worst_primitive) {
      worst_primitive = r.worst_relative_error;
      worst_name = r.primitive;
    }
  }
  std::mt19937_64 rng(202);
  double worst_model = 0.0;
  std::size_t entries = 0;
  std::size_t skipped = 0;
  for (bool conditioned : {false, true}) {
    for (int order : {2, 3}) {
      const auto r = granma_grad_check(conditioned, order, rng);
      worst_model = std::max(worst_model, r.max_relative_error);
      entries += r.entries_checked;
      skipped += r.entries_skipped;
    }
  }
  const double elapsed = seconds_since(start);
  report(worst_primitive <= primitive_checks::kTolerance && worst_model <= 1e-3 &&
    elapsed < 300.0, "gradient contract",
    fmt("%zu primitives x %d shapes, worst %.3g (%s, <= 1e-4); toy GraN-MA through densify "
    "(stride 4, orders 2/3, standard/conditioned, training mode, %zu entries, %zu at kinks "
    "skipped) worst %.3g (<= 1e-3); %.1f s (< 300 s)", primitives.size(),
    primitive_checks::kShapesPerPrimitive, worst_primitive, worst_name.c_str(), entries, skipped,
    worst_model, elapsed));
}

diff::Array permute_agents(const diff::Array & rows, const std::vector<int> & perm)
{
  if (rows.empty()) {
    return rows;
  }
  diff::Array out(rows.rows(), rows.cols());
  for (std::size_t a = 0; a < perm.size(); ++a) {
    std::copy_n(rows.row(static_cast<std::size_t>(perm[a])), rows.cols(), out.row(a));
  }
  return out;
}

void equivariance()
{
  const auto start = Clock::now();
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (bool conditioned : {false, true}) {
    models::ModelSpec spec;
    spec.output_stride = 4;
    spec.conditioned = conditioned;
    spec.init_seed = 17;
    auto model = models::make_predictor(spec);
    for (int scene = 0; scene < 50; ++scene) {
      const auto s = scenes::random_batch(1, rng);
      std::vector<int> perm(23);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin() + 12, perm.end(), rng);
      auto permuted = s;
      permuted.past = permute_agents(s.past, perm);
      permuted.future = permute_agents(s.future, perm);
      const auto a = models::predict(*model, s);
      const auto b = models::predict(*model, permuted);
      for (int agent = 0; agent < a.agents; ++agent) {
        const int source = perm[static_cast<std::size_t>(a.first_agent + agent)] - a.first_agent;
        for (int t = 0; t < spec.horizon; ++t) {
          worst = std::max(worst, std::abs(b.x(0, agent, t) - a.x(0, source, t)));
          worst = std::max(worst, std::abs(b.y(0, agent, t) - a.y(0, source, t)));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  report(worst <= 1e-5 && elapsed < 60.0, "equivariance",
    fmt("50 scenes x {standard, conditioned} GraN-MA (E=128, stride 4), defender permutation, "
    "max discrepancy %.3g m (<= 1e-5), %.2f s (< 60 s)", worst, elapsed));
}

void loss_metric_oracles()
{
  const double h1 = train::huber_loss(diff::Array(1, 2, {0.0, 0.0}), diff::Array(1, 2, {0.5, 0.0}));
  const double h2 = train::huber_loss(diff::Array(1, 2, {0.0, 0.0}), diff::Array(1, 2, {3.0, 4.0}));
  const double l1 = eval::l2_error(diff::Array(1, 2, {0.0, 0.0}), diff::Array(1, 2, {3.0, 4.0})).mean_cm;
  const double l2 = eval::l2_error(diff::Array(2, 2, {0.0, 0.0, 0.0, 0.0}),
      diff::Array(2, 2, {1.0, 0.0, 0.0, 3.0})).mean_cm;

  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst_curve = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 30;
    const std::size_t steps = 1 + rng() % 40;
    diff::Array target(rows, 2 * steps);
    diff::Array pred(rows, 2 * steps);
    for (std::size_t i = 0; i < target.size(); ++i) {
      target[i] = u(rng);
      pred[i] = u(rng);
    }
    const auto err = eval::l2_error(target, pred);
    const auto curve = eval::cumulative_curve(err.per_step_cm);
    worst_curve = std::max(worst_curve, std::abs(curve.back() - err.mean_cm) /
        std::max(1.0, err.mean_cm));
  }
  const bool ok = h1 == 0.0625 && h2 == 3.0 && l1 == 500.0 && l2 == 200.0 && worst_curve <= 1e-9;
  report(ok, "loss/metric oracles",
    fmt("huber(0.5,0)=%.17g huber(3,4)=%.17g L2(3,4)=%.17g cm mean{100,300}=%.17g cm; "
    "cumulative endpoint vs mean worst %.3g (<= 1e-9)", h1, h2, l1, l2, worst_curve));
}

void windowing_oracle()
{
  const auto starts = data::window_starts(120, 50);
  const auto brute = oracle::brute_force_window_starts(120, 50);

  data::TrackedExample ex;
  ex.match_id = "span";
  ex.agents.push_back({0, data::Team::ball, 0});
  for (int i = 0; i < 11; ++i) {
    ex.agents.push_back({1 + i, data::Team::home, i});
  }
  for (int i = 0; i < 11; ++i) {
    ex.agents.push_back({20 + i, data::Team::away, i});
  }
  ex.in_play.assign(120, 1);
  ex.positions.assign(120 * 23 * 2, 0.0);
  std::vector<std::size_t> made;
  for (const auto & w : data::make_windows(ex, {50, 10})) {
    made.push_back(static_cast<std::size_t>(w.start_frame));
  }
  const std::vector<std::size_t> expect{0, 25, 50};
  std::ostringstream got;
  for (std::size_t s : starts) {
    got << (got.tellp() > 0 ? "," : "") << s;
  }
  report(starts == expect && brute == expect && made == expect, "windowing oracle",
    "span 120, T 50: starts {" + got.str() + "}, brute force and make_windows agree");
}

struct Dataset
{
  std::vector<data::PredictionWindow> train;
  std::vector<data::PredictionWindow> val;
  std::vector<data::PredictionWindow> test;
};

Dataset synthetic_dataset()
{
  const auto plays = data::synth_plays(7, 2000);
  std::vector<std::string> ids;
  for (const auto & p : plays) {
    ids.push_back(p.match_id);
  }
  const auto splits = data::split_by_match(ids);
  Dataset d;
  for (std::size_t i = 0; i < plays.size(); ++i) {
    auto & dst = splits[i] == data::Split::train ? d.train :
      splits[i] == data::Split::val ? d.val : d.test;
    for (auto & w : data::make_windows(plays[i], {50, 10})) {
      dst.push_back(std::move(w));
    }
  }
  return d;
}

train::TrainConfig toy_config()
{
  train::TrainConfig c;
  c.model.kind = models::ModelKind::granma;
  c.model.embedding_width = 32;
  c.model.decoder_hidden = 32;
  c.epochs = 20;
  c.batch_size = 16;
  c.seeds = {0, 1, 2};
  return c;
}

struct Trained
{
  std::vector<std::shared_ptr<models::Predictor>> models;
  std::vector<std::uint64_t> seeds;
  double seconds = 0.0;
  bool ok = true;
  std::string error;

  std::vector<const models::Predictor *> ptrs() const
  {
    std::vector<const models::Predictor *> out;
    for (const auto & m : models) {
      out.push_back(m.get());
    }
    return out;
  }
};

Trained train_toy(const std::string & label, const train::TrainConfig & config, const Dataset & d)
{
  const auto start = Clock::now();
  train::RunOptions opts;
  opts.log = [&](const std::string & line) {progress(label + " " + line);};
  Trained t;
  for (const auto & r : train::train(config, d.train, d.val, opts)) {
    if (!r.ok) {
      t.ok = false;
      t.error += "seed " + std::to_string(r.seed) + ": " + r.error + "; ";
      continue;
    }
    t.models.push_back(r.model);
    t.seeds.push_back(r.seed);
  }
  t.seconds = seconds_since(start);
  progress(label + fmt(" trained in %.0f s", t.seconds));
  return t;
}

void trends()
{
  const auto data_start = Clock::now();
  const Dataset d = synthetic_dataset();
  const double data_seconds = seconds_since(data_start);
  progress(fmt("dataset: %zu train / %zu val / %zu test windows in %.1f s", d.train.size(),
    d.val.size(), d.test.size(), data_seconds));

  // Trend 1: sparsity sweep of one trained model.
  const train::TrainConfig standard_cfg = toy_config();
  const Trained standard = train_toy("standard", standard_cfg, d);
  {
    const auto start = Clock::now();
    const std::vector<int> strides{1, 2, 4, 10, 20, 40};
    std::vector<double> means;
    if (standard.ok) {
      for (int stride : strides) {
        eval::EvalOptions o;
        o.eval_stride = stride;
        means.push_back(eval::eval_model(standard.ptrs(), standard.seeds, d.test, o).mean_cm);
      }
    }
    const double elapsed = data_seconds + standard.seconds + seconds_since(start);
    bool monotone = !means.empty();
    std::ostringstream detail;
    for (std::size_t i = 0; i < means.size(); ++i) {
      detail << "s" << strides[i] << "=" << fmt("%.1f", means[i]) << " ";
      if (i > 0 && means[i] > means[i - 1] * 1.02) {
        monotone = false;
      }
    }
    const double drop = means.empty() ? 0.0 : 1.0 - means.back() / means.front();
    report(standard.ok && monotone && drop >= 0.05 && elapsed < 1200.0, "trend 1 (sparsity)",
      (standard.ok ? "" : "training failed: " + standard.error + " ") + detail.str() +
      fmt("cm; adjacent within 2%%: %s; stride 40 below stride 1 by %.1f%% (>= 5%%); %.0f s "
      "(< 1200 s)", monotone ? "yes" : "no", 100.0 * drop, elapsed));
  }

  // Trend 2: full-trajectory conditioning, scored on the defenders.
  {
    train::TrainConfig cfg = toy_config();
    cfg.model.conditioned = true;
    const Trained cond = train_toy("conditioned", cfg, d);
    const auto start = Clock::now();
    double cond_mean = 0.0, std_def = 0.0, std_all = 0.0;
    const bool ok = cond.ok && standard.ok;
    if (ok) {
      eval::EvalOptions o;
      o.defenders_only = true;
      cond_mean = eval::eval_model(cond.ptrs(), cond.seeds, d.test, o).mean_cm;
      std_def = eval::eval_model(standard.ptrs(), standard.seeds, d.test, o).mean_cm;
      std_all = eval::eval_model(standard.ptrs(), standard.seeds, d.test, {}).mean_cm;
    }
    const double elapsed = data_seconds + standard.seconds + cond.seconds + seconds_since(start);
    report(ok && cond_mean <= std_def && elapsed < 1800.0, "trend 2 (conditioning)",
      (ok ? "" : "training failed: " + cond.error + standard.error + " ") +
      fmt("defender mean L2 over 3 seeds: conditioned %.1f cm vs standard %.1f cm "
      "(standard on all agents %.1f cm); %.0f s (< 1800 s)", cond_mean, std_def, std_all,
      elapsed));
  }

  // Trend 3: motion order at a 2.0 s train stride.
  {
    double mean[2] = {0.0, 0.0};
    bool ok = true;
    std::string error;
    double elapsed = data_seconds;
    for (int i = 0; i < 2; ++i) {
      train::TrainConfig cfg = toy_config();
      cfg.model.output_stride = 20;
      cfg.model.order = 2 + i;
      const Trained t = train_toy(fmt("order%d", cfg.model.order), cfg, d);
      const auto start = Clock::now();
      if (t.ok) {
        mean[i] = eval::eval_model(t.ptrs(), t.seeds, d.test, {}).mean_cm;
      } else {
        ok = false;
        error += t.error;
      }
      elapsed += t.seconds + seconds_since(start);
    }
    report(ok && mean[0] <= mean[1], "trend 3 (motion order)",
      (ok ? "" : "training failed: " + error + " ") +
      fmt("train stride 2.0 s, mean L2 over 3 seeds: order 2 %.1f cm vs order 3 %.1f cm; %.0f s",
      mean[0], mean[1], elapsed));
  }
}

void baselines()
{
  // Dyadic velocities and integer positions keep every value exact.
  models::SceneBatch s;
  s.batch = 1;
  s.past_len = 10;
  s.future_len = 40;
  s.past = diff::Array(23, 20);
  s.future = diff::Array(23, 80);
  std::mt19937_64 rng(505);
  for (std::size_t r = 0; r < 23; ++r) {
    const double x0 = static_cast<double>(static_cast<int>(rng() % 60) - 30);
    const double y0 = static_cast<double>(static_cast<int>(rng() % 40) - 20);
    const double vx = static_cast<double>(static_cast<int>(rng() % 13) - 6) / 8.0;
    const double vy = static_cast<double>(static_cast<int>(rng() % 13) - 6) / 8.0;
    for (int t = 0; t < 50; ++t) {
      auto & dst = t < 10 ? s.past : s.future;
      const std::size_t col = 2 * static_cast<std::size_t>(t < 10 ? t : t - 10);
      dst.at(r, col) = x0 + vx * t;
      dst.at(r, col + 1) = y0 + vy * t;
    }
  }
  models::ModelSpec lin;
  lin.kind = models::ModelKind::lin_ext;
  auto model = models::make_predictor(lin);
  const auto pred = models::predict(*model, s);
  const double lin_error = eval::l2_error(s.future, pred.dense).mean_cm;

  // Overfit eight windows with full-batch steps.
  const auto start = Clock::now();
  std::vector<data::PredictionWindow> windows;
  for (const auto & p : data::synth_plays(3, 8)) {
    for (auto & w : data::make_windows(p, {50, 10})) {
      windows.push_back(std::move(w));
    }
  }
  if (windows.size() < 8) {
    throw std::runtime_error("overfit: fewer than 8 windows");
  }
  windows.resize(8);
  train::TrainConfig c;
  c.model.embedding_width = 32;
  c.model.decoder_hidden = 128;
  c.epochs = 1000;
  c.batch_size = 8;
  c.learning_rate = 1e-3;
  c.lr_decay = 1.0;
  c.flip_augment = false;
  c.seeds = {0};
  const auto r = train::train_seed(c, 0, windows, windows);
  const double final_loss = r.ok ? r.history.back().train_loss : INFINITY;
  const double elapsed = seconds_since(start);
  report(lin_error == 0.0 && final_loss < 1e-3, "baselines",
    fmt("lin_ext on constant velocity: mean L2 %.17g cm (exactly 0); toy GraN-MA on 8 "
    "windows after %d epochs: train loss %.3g (< 1e-3), %.0f s%s", lin_error, c.epochs,
    final_loss, elapsed, r.ok ? "" : (" training failed: " + r.error).c_str()));
}

}  // namespace

int main(int argc, char ** argv)
{
  std::set<std::string> only;
  std::string report_path = "acceptance_report.txt";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--report") {
      report_path = argv[i + 1];
    }
    if (std::string(argv[i]) == "--only") {
      std::stringstream ss(argv[i + 1]);
      for (std::string name; std::getline(ss, name, ',');) {
        only.insert(name);
      }
    }
  }
  report_file.open(report_path);
  auto wanted = [&](const char * name) {return only.empty() || only.count(name) > 0;};
  try {
    if (wanted("interpolation")) {
      interpolation_oracle();
    }
    if (wanted("gradients")) {
      gradient_contract();
    }
    if (wanted("equivariance")) {
      equivariance();
    }
    if (wanted("oracles")) {
      loss_metric_oracles();
    }
    if (wanted("windowing")) {
      windowing_oracle();
    }
    if (wanted("baselines")) {
      baselines();
    }
    if (wanted("trends")) {
      trends();
    }
  } catch (const std::exception & e) {
    report(false, "acceptance run", std::string("aborted: ") + e.what());
  }
  emit(std::string(failures == 0 ? "ALL PASS" : "FAILURES") + ": " + std::to_string(failures) +
    " criteria failed");
  return failures == 0 ? 0 : 1;
}
