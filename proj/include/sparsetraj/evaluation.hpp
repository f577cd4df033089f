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
#ifndef SPARSETRAJ__EVALUATION_HPP_
#define SPARSETRAJ__EVALUATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsetraj/dataio/windows.hpp"
#include "sparsetraj/diffcore/array.hpp"
#include "sparsetraj/models/predictor.hpp"

namespace sparsetraj::eval
{

/// Euclidean error per (row, step) of [rows x 2H] arrays, averaged per step
/// over rows and overall. Centimetres.
struct L2Error
{
  std::vector<double> per_step_cm;
  double mean_cm = 0.0;
};

L2Error l2_error(const diff::Array & target, const diff::Array & prediction);

/// Running mean of per-step errors: c_t = mean(e_1..e_t).
std::vector<double> cumulative_curve(const std::vector<double> & per_step);

/// Keeps every stride-th step of each dense row and densifies again from
/// the row's past (anchor derivatives from backward differences).
/// dense is [rows x 2H], past is [rows x 2n]. stride 1 returns dense.
diff::Array resparsify(const diff::Array & dense, const diff::Array & past, int stride,
  motion::MotionOrder order);

struct EvalOptions
{
  int eval_stride = 1;
  int order = 2;
  double frame_rate_hz = 10.0;
  std::size_t batch_size = 256;
  /// Score only the defending team, also for models that predict everyone.
  bool defenders_only = false;
};

struct SeedEval
{
  std::uint64_t seed = 0;
  std::vector<double> per_step_cm;
  double mean_cm = 0.0;
};

struct EvalReport
{
  std::string model;
  double train_stride_s = 0.0;
  double eval_stride_s = 0.0;
  int order = 2;
  bool conditioned = false;
  bool defenders_only = false;
  double frame_rate_hz = 10.0;
  std::size_t windows = 0;
  std::vector<SeedEval> seeds;
  std::vector<double> per_step_cm;     // mean over seeds
  std::vector<double> cumulative_cm;
  double mean_cm = 0.0;                // mean of per-seed means
  double std_cm = 0.0;                 // sample std over seeds (0 for one seed)
};

/// Scores one model on windows: predict densely, apply the eval stride,
/// measure L2 against the predicted agents' futures.
SeedEval eval_predictor(const models::Predictor & model,
  const std::vector<data::PredictionWindow> & windows, const EvalOptions & options);

/// Aggregates one trained model per seed. All models must share a spec
/// apart from init_seed. Throws std::invalid_argument otherwise.
EvalReport eval_model(const std::vector<const models::Predictor *> & models,
  const std::vector<std::uint64_t> & seeds, const std::vector<data::PredictionWindow> & windows,
  const EvalOptions & options);

inline constexpr const char * kReportHeader =
  "model,train_stride_s,eval_stride_s,order,conditioned,seed,mean_l2_cm";
inline constexpr const char * kCurveHeader = "t_s,cumulative_l2_cm";

/// One row per seed of every report.
void write_report_csv(std::ostream & out, const std::vector<EvalReport> & reports);
void write_curve_csv(std::ostream & out, const EvalReport & report);
/// Cumulative-error curves of several reports as a standalone SVG.
std::string curve_svg(const std::vector<EvalReport> & reports, const std::string & title);

}  // namespace sparsetraj::eval

#endif  // SPARSETRAJ__EVALUATION_HPP_
