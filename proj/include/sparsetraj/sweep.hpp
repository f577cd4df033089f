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
#ifndef SPARSETRAJ__SWEEP_HPP_
#define SPARSETRAJ__SWEEP_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sparsetraj/dataio/manifest.hpp"
#include "sparsetraj/evaluation.hpp"
#include "sparsetraj/training.hpp"

namespace sparsetraj::sweep
{

struct Cell
{
  std::string name;
  train::TrainConfig config;
  std::vector<int> eval_strides{1};
  int eval_order = 2;
};

struct Plan
{
  std::string name;
  std::vector<Cell> cells;
};

/// Experiment grids built on `base`:
///
///   sparsity       train strides 1, 4, 10, 20, 40 steps (0.1 .. 4.0 s)
///   order          motion orders 1..4 at a 2.0 s train stride
///   horizon        24 s horizon, strides 1, 20, 60, 240 steps, twice the epochs
///   conditioned    {mlp, granma} x {standard, conditioned}
///   eval_sparsity  one dense model scored at eval strides 1, 2, 4, 10, 20, 40
///
/// Throws std::invalid_argument for an unknown name.
Plan make_plan(const std::string & preset, const train::TrainConfig & base);
std::vector<std::string> preset_names();

struct CellOutcome
{
  std::string name;
  bool ok = false;
  std::string error;
  std::vector<eval::EvalReport> reports;
};

/// Runs every cell in isolation: a failing cell is recorded and the sweep
/// moves on. Writes per-cell run directories, report.csv, curves and
/// curves.svg under out_dir when it is non-empty.
std::vector<CellOutcome> run(const Plan & plan, const data::Manifest & manifest,
  const std::filesystem::path & out_dir, const std::function<void (const std::string &)> & log = {});

}  // namespace sparsetraj::sweep

#endif  // SPARSETRAJ__SWEEP_HPP_
