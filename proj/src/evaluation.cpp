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
#include "sparsetraj/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "sparsetraj/diffcore/ops.hpp"
#include "sparsetraj/training.hpp"

namespace sparsetraj::eval
{

L2Error l2_error(const diff::Array & target, const diff::Array & prediction)
{
  if (!target.same_shape(prediction) || target.cols() % 2 != 0 || target.empty()) {
    throw diff::ShapeError("l2_error: target " + target.shape_string() + " vs prediction " +
            prediction.shape_string());
  }
  const std::size_t steps = target.cols() / 2;
  L2Error out;
  out.per_step_cm.assign(steps, 0.0);
  for (std::size_t r = 0; r < target.rows(); ++r) {
    const double * t = target.row(r);
    const double * p = prediction.row(r);
    for (std::size_t s = 0; s < steps; ++s) {
      out.per_step_cm[s] += std::hypot(p[2 * s] - t[2 * s], p[2 * s + 1] - t[2 * s + 1]);
    }
  }
  double total = 0.0;
  for (double & e : out.per_step_cm) {
    e = 100.0 * e / static_cast<double>(target.rows());
    total += e;
  }
  out.mean_cm = total / static_cast<double>(steps);
  return out;
}

std::vector<double> cumulative_curve(const std::vector<double> & per_step)
{
  std::vector<double> out(per_step.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < per_step.size(); ++i) {
    sum += per_step[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

diff::Array resparsify(const diff::Array & dense, const diff::Array & past, int stride,
  motion::MotionOrder order)
{
  if (stride < 1) {
    throw std::invalid_argument("eval stride must be >= 1");
  }
  if (dense.rows() != past.rows()) {
    throw diff::ShapeError("resparsify: dense " + dense.shape_string() + " vs past " +
            past.shape_string());
  }
  if (stride == 1) {
    return dense;
  }
  const int horizon = static_cast<int>(dense.cols() / 2);
  const motion::LinearInterpolant interp(horizon, stride, order);
  const auto & offsets = interp.offsets();
  const std::size_t n = past.cols() / 2;
  diff::Array out(dense.rows(), dense.cols());
  std::vector<double> history(n);
  std::vector<double> controls(offsets.size());
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    for (int c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        history[i] = past.at(r, 2 * i + static_cast<std::size_t>(c));
      }
      const auto anchor = motion::estimate_anchor_derivatives(history, order);
      for (std::size_t k = 0; k < offsets.size(); ++k) {
        controls[k] = dense.at(r, 2 * static_cast<std::size_t>(offsets[k] - 1) +
            static_cast<std::size_t>(c));
      }
      const auto path = interp.apply(controls, anchor);
      for (std::size_t t = 0; t < path.size(); ++t) {
        out.at(r, 2 * t + static_cast<std::size_t>(c)) = path[t];
      }
    }
  }
  return out;
}

SeedEval eval_predictor(const models::Predictor & model,
  const std::vector<data::PredictionWindow> & windows, const EvalOptions & options)
{
  if (windows.empty()) {
    throw std::invalid_argument("eval: no windows");
  }
  const auto & spec = model.spec();
  const motion::MotionOrder order(options.order);
  SeedEval result;
  result.seed = spec.init_seed;
  result.per_step_cm.assign(static_cast<std::size_t>(spec.horizon), 0.0);
  std::size_t rows = 0;
  for (std::size_t begin = 0; begin < windows.size(); begin += options.batch_size) {
    const std::size_t n = std::min(options.batch_size, windows.size() - begin);
    const auto scenes = data::to_scene_batch(
      std::span<const data::PredictionWindow>(windows.data() + begin, n), true);
    const auto pred = models::predict(model, scenes);
    auto target = train::target_rows(scenes, spec);
    auto dense = pred.dense;
    int first = spec.first_predicted_agent();
    int count = spec.predicted_agents();
    if (options.defenders_only && first == 0) {
      first = 1 + scenes.team_size;
      count = scenes.team_size;
      target = models::select_agents(target, scenes.batch, scenes.agents(), first, count);
      dense = models::select_agents(dense, scenes.batch, scenes.agents(), first, count);
    }
    const auto past = models::select_agents(scenes.past, scenes.batch, scenes.agents(),
        first, count);
    const auto scored = resparsify(dense, past, options.eval_stride, order);
    const auto err = l2_error(target, scored);
    for (std::size_t s = 0; s < err.per_step_cm.size(); ++s) {
      result.per_step_cm[s] += err.per_step_cm[s] * static_cast<double>(target.rows());
    }
    rows += target.rows();
  }
  double total = 0.0;
  for (double & e : result.per_step_cm) {
    e /= static_cast<double>(rows);
    total += e;
  }
  result.mean_cm = total / static_cast<double>(result.per_step_cm.size());
  return result;
}

EvalReport eval_model(const std::vector<const models::Predictor *> & models,
  const std::vector<std::uint64_t> & seeds, const std::vector<data::PredictionWindow> & windows,
  const EvalOptions & options)
{
  if (models.empty() || models.size() != seeds.size()) {
    throw std::invalid_argument("eval_model: need one model per seed");
  }
  const auto & spec = models.front()->spec();
  for (const auto * m : models) {
    if (m->spec().architecture_hash() != spec.architecture_hash()) {
      throw std::invalid_argument("eval_model: checkpoints come from different model specs");
    }
  }
  EvalReport report;
  report.model = std::string(models::to_string(spec.kind));
  report.frame_rate_hz = options.frame_rate_hz;
  report.train_stride_s = spec.output_stride / options.frame_rate_hz;
  report.eval_stride_s = options.eval_stride / options.frame_rate_hz;
  report.order = options.order;
  report.conditioned = spec.conditioned;
  report.defenders_only = options.defenders_only || spec.conditioned;
  report.windows = windows.size();
  report.per_step_cm.assign(static_cast<std::size_t>(spec.horizon), 0.0);
  for (std::size_t i = 0; i < models.size(); ++i) {
    SeedEval s = eval_predictor(*models[i], windows, options);
    s.seed = seeds[i];
    for (std::size_t t = 0; t < s.per_step_cm.size(); ++t) {
      report.per_step_cm[t] += s.per_step_cm[t] / static_cast<double>(models.size());
    }
    report.mean_cm += s.mean_cm / static_cast<double>(models.size());
    report.seeds.push_back(std::move(s));
  }
  if (report.seeds.size() > 1) {
    double var = 0.0;
    for (const auto & s : report.seeds) {
      var += (s.mean_cm - report.mean_cm) * (s.mean_cm - report.mean_cm);
    }
    report.std_cm = std::sqrt(var / static_cast<double>(report.seeds.size() - 1));
  }
  report.cumulative_cm = cumulative_curve(report.per_step_cm);
  return report;
}

void write_report_csv(std::ostream & out, const std::vector<EvalReport> & reports)
{
  out << kReportHeader << '\n';
  for (const auto & r : reports) {
    for (const auto & s : r.seeds) {
      out << r.model << ',' << r.train_stride_s << ',' << r.eval_stride_s << ',' << r.order <<
        ',' << (r.conditioned ? 1 : 0) << ',' << s.seed << ',' << std::setprecision(10) <<
        s.mean_cm << std::setprecision(6) << '\n';
    }
  }
}

void write_curve_csv(std::ostream & out, const EvalReport & report)
{
  out << kCurveHeader << '\n';
  for (std::size_t t = 0; t < report.cumulative_cm.size(); ++t) {
    out << static_cast<double>(t + 1) / report.frame_rate_hz << ',' << std::setprecision(10) <<
      report.cumulative_cm[t] << std::setprecision(6) << '\n';
  }
}

std::string curve_svg(const std::vector<EvalReport> & reports, const std::string & title)
{
  constexpr double w = 640.0;
  constexpr double h = 400.0;
  constexpr double left = 60.0;
  constexpr double right = 160.0;
  constexpr double top = 40.0;
  constexpr double bottom = 50.0;
  double t_max = 0.0;
  double y_max = 1e-9;
  for (const auto & r : reports) {
    t_max = std::max(t_max, static_cast<double>(r.cumulative_cm.size()) / r.frame_rate_hz);
    for (double v : r.cumulative_cm) {
      y_max = std::max(y_max, v);
    }
  }
  y_max *= 1.05;
  const auto px = [&](double t) {return left + (w - left - right) * (t_max > 0 ? t / t_max : 0);};
  const auto py = [&](double v) {return h - bottom - (h - top - bottom) * v / y_max;};
  static const char * colors[] = {"#1b6ca8", "#d1495b", "#edae49", "#00798c", "#66a182",
    "#8d6a9f", "#30343f", "#c17c74"};

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h <<
    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << px(t_max) << "\" y2=\"" <<
    py(0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left << "\" y2=\"" << top <<
    "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = t_max * i / 4.0;
    const double v = y_max * i / 4.0;
    svg << "<text x=\"" << px(t) << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\">" <<
      t << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" <<
      std::setprecision(0) << v << std::setprecision(2) << "</text>\n";
  }
  svg << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 12 <<
    "\" text-anchor=\"middle\">time (s)</text>\n";
  svg << "<text x=\"16\" y=\"" << h / 2 << "\" transform=\"rotate(-90 16 " << h / 2 <<
    ")\" text-anchor=\"middle\">cumulative L2 (cm)</text>\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto & r = reports[i];
    const char * color = colors[i % (sizeof(colors) / sizeof(colors[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t t = 0; t < r.cumulative_cm.size(); ++t) {
      svg << px(static_cast<double>(t + 1) / r.frame_rate_hz) << ',' << py(r.cumulative_cm[t]) << ' ';
    }
    svg << "\"/>\n";
    const double ly = top + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << w - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << w - right + 30 <<
      "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << w - right + 36 << "\" y=\"" << ly + 4 << "\">" << r.model << " s=" <<
      r.train_stride_s << "/" << r.eval_stride_s << (r.conditioned ? " cond" : "") << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sparsetraj::eval
