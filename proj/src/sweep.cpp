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
#include "sparsetraj/sweep.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

namespace sparsetraj::sweep
{

std::vector<std::string> preset_names()
{
  return {"sparsity", "order", "horizon", "conditioned", "eval_sparsity"};
}

namespace
{

std::string seconds(int steps)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1fs", steps / 10.0);
  return buf;
}

}  // namespace

Plan make_plan(const std::string & preset, const train::TrainConfig & base)
{
  Plan plan;
  plan.name = preset;
  if (preset == "sparsity") {
    for (int stride : {1, 4, 10, 20, 40}) {
      Cell c{"stride_" + seconds(stride), base};
      c.config.model.output_stride = stride;
      plan.cells.push_back(c);
    }
  } else if (preset == "order") {
    for (int order : {1, 2, 3, 4}) {
      Cell c{"order_" + std::to_string(order), base};
      c.config.model.output_stride = 20;
      c.config.model.order = order;
      c.eval_order = order;
      plan.cells.push_back(c);
    }
  } else if (preset == "horizon") {
    for (int stride : {1, 20, 60, 240}) {
      Cell c{"h24s_stride_" + seconds(stride), base};
      c.config.epochs = 2 * base.epochs;
      c.config.model.horizon = 240;
      c.config.model.output_stride = stride;
      plan.cells.push_back(c);
    }
  } else if (preset == "conditioned") {
    for (auto kind : {models::ModelKind::mlp, models::ModelKind::granma}) {
      for (bool cond : {false, true}) {
        Cell c{std::string(models::to_string(kind)) + (cond ? "_conditioned" : "_standard"), base};
        c.config.model.kind = kind;
        c.config.model.conditioned = cond;
        plan.cells.push_back(c);
      }
    }
  } else if (preset == "eval_sparsity") {
    Cell c{"dense", base};
    c.config.model.output_stride = 1;
    c.eval_strides = {1, 2, 4, 10, 20, 40};
    plan.cells.push_back(c);
  } else {
    throw std::invalid_argument("unknown sweep preset '" + preset + "'");
  }
  return plan;
}

std::vector<CellOutcome> run(const Plan & plan, const data::Manifest & manifest,
  const std::filesystem::path & out_dir, const std::function<void (const std::string &)> & log)
{
  const auto say = [&](const std::string & s) {
      if (log) {
        log(s);
      }
    };
  struct Windows
  {
    std::vector<data::PredictionWindow> train;
    std::vector<data::PredictionWindow> val;
    std::vector<data::PredictionWindow> test;
  };
  std::map<std::pair<int, int>, Windows> cache;
  std::vector<CellOutcome> outcomes;
  for (const Cell & cell : plan.cells) {
    CellOutcome outcome;
    outcome.name = cell.name;
    try {
      cell.config.validate();
      const auto wp = cell.config.window();
      auto & w = cache[{wp.length, wp.past}];
      if (w.train.empty()) {
        const int team = cell.config.model.team_size;
        w.train = data::load_split(manifest, data::Split::train, wp, team);
        w.val = data::load_split(manifest, data::Split::val, wp, team);
        w.test = data::load_split(manifest, data::Split::test, wp, team);
      }
      if (w.test.empty()) {
        throw std::runtime_error("no test windows for window length " + std::to_string(wp.length));
      }
      say("cell " + cell.name + ": " + std::to_string(w.train.size()) + " train windows");
      train::RunOptions opts;
      if (!out_dir.empty()) {
        opts.out_dir = out_dir / cell.name;
      }
      opts.log = log;
      const auto results = train::train(cell.config, w.train, w.val, opts);
      std::vector<const models::Predictor *> trained;
      std::vector<std::uint64_t> seeds;
      for (const auto & r : results) {
        if (r.ok) {
          trained.push_back(r.model.get());
          seeds.push_back(r.seed);
        } else {
          outcome.error += "seed " + std::to_string(r.seed) + ": " + r.error + "; ";
        }
      }
      if (trained.empty()) {
        throw std::runtime_error("every seed failed: " + outcome.error);
      }
      for (int stride : cell.eval_strides) {
        eval::EvalOptions eo;
        eo.eval_stride = stride;
        eo.order = cell.eval_order;
        outcome.reports.push_back(eval::eval_model(trained, seeds, w.test, eo));
      }
      outcome.ok = true;
    } catch (const std::exception & e) {
      outcome.ok = false;
      outcome.error += e.what();
      say("cell " + cell.name + " failed: " + outcome.error);
    }
    outcomes.push_back(std::move(outcome));
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::vector<eval::EvalReport> all;
    nlohmann::json status = nlohmann::json::array();
    for (const auto & o : outcomes) {
      status.push_back({{"cell", o.name}, {"ok", o.ok}, {"error", o.error}});
      for (std::size_t i = 0; i < o.reports.size(); ++i) {
        all.push_back(o.reports[i]);
        std::ofstream curve(out_dir / (o.name + "_eval" + std::to_string(i) + "_curve.csv"));
        eval::write_curve_csv(curve, o.reports[i]);
      }
    }
    std::ofstream report(out_dir / "report.csv");
    eval::write_report_csv(report, all);
    std::ofstream(out_dir / "curves.svg") << eval::curve_svg(all, "sweep: " + plan.name);
    std::ofstream(out_dir / "cells.json") << status.dump(2) << '\n';
  }
  return outcomes;
}

}  // namespace sparsetraj::sweep
