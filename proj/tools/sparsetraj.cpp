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
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsetraj/dataio/manifest.hpp"
#include "sparsetraj/dataio/synth.hpp"
#include "sparsetraj/evaluation.hpp"
#include "sparsetraj/kernels/allocator.hpp"
#include "sparsetraj/kernels/kernels.hpp"
#include "sparsetraj/service.hpp"
#include "sparsetraj/sweep.hpp"
#include "sparsetraj/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sparsetraj;

namespace
{

struct CliError : std::runtime_error
{
  CliError(std::string kind, const std::string & message)
  : std::runtime_error(message), kind(std::move(kind)) {}
  std::string kind;
};

void log_line(const std::string & line)
{
  std::cerr << line << std::endl;
}

train::TrainConfig load_config(const fs::path & path)
{
  if (!fs::exists(path)) {
    throw CliError("missing_file", "config not found: " + path.string());
  }
  return train::TrainConfig::read(ConfigFile::load(path));
}

data::Manifest load_manifest(const fs::path & path)
{
  if (!fs::exists(path)) {
    throw CliError("missing_file", "manifest not found: " + path.string());
  }
  return data::Manifest::load(path);
}

std::vector<std::uint64_t> parse_seeds(const std::string & text)
{
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      seeds.push_back(std::stoull(item));
    } catch (const std::exception &) {
      throw CliError("bad_flag", "bad seed '" + item + "'");
    }
  }
  return seeds;
}

json points(const double * xy, std::size_t count)
{
  json out = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({xy[2 * i], xy[2 * i + 1]});
  }
  return out;
}

// [[x, y], ...] per agent into one [agents x 2L] array.
diff::Array read_agents(const json & agents, const std::string & field)
{
  if (!agents.is_array() || agents.empty()) {
    throw CliError("bad_input", field + " must be a non-empty array of trajectories");
  }
  const std::size_t len = agents[0].size();
  diff::Array out(agents.size(), 2 * len);
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (agents[a].size() != len) {
      throw CliError("bad_input", field + ": trajectories differ in length");
    }
    for (std::size_t t = 0; t < len; ++t) {
      out.at(a, 2 * t) = agents[a][t].at(0).get<double>();
      out.at(a, 2 * t + 1) = agents[a][t].at(1).get<double>();
    }
  }
  return out;
}

std::vector<std::shared_ptr<models::Predictor>> load_checkpoints(
  const std::vector<std::string> & checkpoints, const std::string & run_dir,
  const models::ModelSpec * expected = nullptr)
{
  std::vector<fs::path> paths(checkpoints.begin(), checkpoints.end());
  if (!run_dir.empty()) {
    for (const auto & entry : fs::directory_iterator(run_dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "best.ckpt")) {
        paths.push_back(entry.path() / "best.ckpt");
      }
    }
    std::sort(paths.begin(), paths.end());
  }
  if (paths.empty()) {
    throw CliError("missing_file", "no checkpoints given (use --checkpoint or --run)");
  }
  std::vector<std::shared_ptr<models::Predictor>> out;
  for (const auto & p : paths) {
    if (!fs::exists(p)) {
      throw CliError("missing_file", "checkpoint not found: " + p.string());
    }
    out.push_back(models::load_predictor(diff::load_checkpoint(p), expected));
  }
  return out;
}

int run_synth(std::uint64_t seed, int count, data::SynthParams params, const fs::path & out)
{
  const auto matches = data::synth_plays(seed, count, params);
  fs::create_directories(out);
  std::vector<std::string> ids;
  for (const auto & m : matches) {
    ids.push_back(m.match_id);
  }
  const auto splits = data::split_by_match(ids);
  data::Manifest manifest;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const fs::path file = out / (matches[i].match_id + ".csv");
    data::save_tracking(file, matches[i]);
    manifest.entries.push_back({splits[i], file});
  }
  manifest.save(out / "manifest.txt");
  json summary = {{"matches", matches.size()}, {"plays", count},
    {"manifest", (out / "manifest.txt").string()}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

int run_train(const fs::path & config_path, const fs::path & manifest_path, const fs::path & out,
  const std::string & seeds, int epochs, bool low_lr, double max_grad_norm)
{
  auto config = load_config(config_path);
  if (!seeds.empty()) {
    config.seeds = parse_seeds(seeds);
  }
  if (epochs > 0) {
    config.epochs = epochs;
  }
  if (low_lr) {
    config = train::low_lr_preset(config);
  }
  if (max_grad_norm > 0.0) {
    config.max_grad_norm = max_grad_norm;
  }
  config.validate();
  const auto manifest = load_manifest(manifest_path);
  const auto wp = config.window();
  const auto train_w = data::load_split(manifest, data::Split::train, wp, config.model.team_size);
  const auto val_w = data::load_split(manifest, data::Split::val, wp, config.model.team_size);
  if (train_w.empty()) {
    throw CliError("empty_dataset", "no training windows in " + manifest_path.string());
  }
  train::RunOptions opts{out, log_line};
  const auto results = train::train(config, train_w, val_w, opts);
  json summary = json::array();
  bool any_ok = false;
  for (const auto & r : results) {
    any_ok = any_ok || r.ok;
    summary.push_back({{"seed", r.seed}, {"ok", r.ok}, {"error", r.error},
        {"best_val_l2_cm", r.best_val_l2_cm}, {"best_epoch", r.best_epoch}});
  }
  std::cout << summary.dump() << std::endl;
  return any_ok ? 0 : 1;
}

int run_eval(const std::vector<std::string> & checkpoints, const std::string & run_dir,
  const std::string & config_path, const fs::path & manifest_path, const std::string & split,
  const std::vector<int> & strides, int order, bool defenders_only, const std::string & report_path, const std::string & curve_path,
  const std::string & svg_path, const std::string & dump_path)
{
  std::optional<models::ModelSpec> expected;
  if (!config_path.empty()) {
    expected = load_config(config_path).model;
  }
  const auto models_loaded = load_checkpoints(checkpoints, run_dir,
      expected ? &*expected : nullptr);
  const auto & spec = models_loaded.front()->spec();
  const auto manifest = load_manifest(manifest_path);
  const auto windows = data::load_split(manifest, data::parse_split(split),
      {spec.full_length(), spec.input_len}, spec.team_size);
  if (windows.empty()) {
    throw CliError("empty_dataset", "no " + split + " windows");
  }
  std::vector<const models::Predictor *> ptrs;
  std::vector<std::uint64_t> seeds;
  for (const auto & m : models_loaded) {
    ptrs.push_back(m.get());
    seeds.push_back(m->spec().init_seed);
  }
  std::vector<eval::EvalReport> reports;
  for (int stride : strides) {
    if (stride < 1 || stride > spec.horizon) {
      throw CliError("bad_flag", "eval stride must be in [1, horizon]");
    }
    eval::EvalOptions opts;
    opts.eval_stride = stride;
    opts.order = order;
    opts.defenders_only = defenders_only;
    reports.push_back(eval::eval_model(ptrs, seeds, windows, opts));
  }
  std::ostringstream csv;
  eval::write_report_csv(csv, reports);
  if (report_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream(report_path) << csv.str();
  }
  if (!curve_path.empty()) {
    std::ofstream out(curve_path);
    eval::write_curve_csv(out, reports.front());
  }
  if (!svg_path.empty()) {
    std::ofstream(svg_path) << eval::curve_svg(reports, "cumulative L2");
  }
  if (!dump_path.empty()) {
    json dump = {{"frame_rate_hz", 10.0}, {"units", "m"}, {"windows", json::array()}};
    const std::size_t n = std::min<std::size_t>(windows.size(), 256);
    const auto scenes = data::to_scene_batch(std::span(windows.data(), n), true);
    const auto pred = models::predict(*ptrs.front(), scenes);
    const auto past = models::select_agents(scenes.past, scenes.batch, scenes.agents(),
        spec.first_predicted_agent(), spec.predicted_agents());
    const auto truth = train::target_rows(scenes, spec);
    const auto per = static_cast<std::size_t>(spec.predicted_agents());
    for (std::size_t b = 0; b < n; ++b) {
      json w = {{"past", json::array()}, {"prediction", json::array()}, {"truth", json::array()}};
      for (std::size_t a = 0; a < per; ++a) {
        const std::size_t r = b * per + a;
        w["past"].push_back(points(past.row(r), past.cols() / 2));
        w["prediction"].push_back(points(pred.dense.row(r), pred.dense.cols() / 2));
        w["truth"].push_back(points(truth.row(r), truth.cols() / 2));
      }
      dump["windows"].push_back(std::move(w));
    }
    std::ofstream(dump_path) << dump.dump() << '\n';
  }
  json summary = json::array();
  for (const auto & r : reports) {
    summary.push_back({{"eval_stride_s", r.eval_stride_s}, {"mean_l2_cm", r.mean_cm},
        {"std_l2_cm", r.std_cm}, {"controls", motion::control_count(spec.horizon,
          static_cast<int>(std::lround(r.eval_stride_s * 10.0)))}});
  }
  std::cerr << summary.dump() << std::endl;
  return 0;
}

int run_sweep(const std::string & preset, const fs::path & config_path, const fs::path & manifest_path,
  const fs::path & out)
{
  const auto config = load_config(config_path);
  const auto manifest = load_manifest(manifest_path);
  const auto plan = sweep::make_plan(preset, config);
  const auto outcomes = sweep::run(plan, manifest, out, log_line);
  json summary = json::array();
  for (const auto & o : outcomes) {
    json cell = {{"cell", o.name}, {"ok", o.ok}, {"error", o.error}, {"reports", json::array()}};
    for (const auto & r : o.reports) {
      cell["reports"].push_back({{"eval_stride_s", r.eval_stride_s}, {"mean_l2_cm", r.mean_cm},
          {"std_l2_cm", r.std_cm}});
    }
    summary.push_back(cell);
  }
  std::cout << summary.dump() << std::endl;
  return 0;
}

int run_sparsify(const fs::path & input, int stride, int order, const fs::path & out)
{
  std::ifstream in(input);
  if (!in) {
    throw CliError("missing_file", "cannot open " + input.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw CliError("bad_input", std::string("dense prediction file is not JSON: ") + e.what());
  }
  if (!doc.contains("windows") || !doc["windows"].is_array()) {
    throw CliError("bad_input", "dense prediction file needs a 'windows' array");
  }
  json result = doc;
  result["stride"] = stride;
  result["order"] = order;
  double before = 0.0;
  double after = 0.0;
  double shift = 0.0;
  std::size_t scored = 0;
  std::size_t total_windows = 0;
  for (auto & w : result["windows"]) {
    const auto past = read_agents(w.at("past"), "past");
    const auto dense = read_agents(w.at("prediction"), "prediction");
    const auto horizon = static_cast<int>(dense.cols() / 2);
    if (stride < 1 || stride > horizon) {
      throw CliError("bad_flag", "stride must be in [1, horizon]");
    }
    const auto resparse = eval::resparsify(dense, past, stride, motion::MotionOrder(order));
    shift += eval::l2_error(dense, resparse).mean_cm;
    ++total_windows;
    json pred = json::array();
    for (std::size_t a = 0; a < resparse.rows(); ++a) {
      pred.push_back(points(resparse.row(a), resparse.cols() / 2));
    }
    w["prediction"] = pred;
    w["controls"] = motion::control_offsets(horizon, stride);
    if (w.contains("truth")) {
      const auto truth = read_agents(w["truth"], "truth");
      before += eval::l2_error(truth, dense).mean_cm;
      after += eval::l2_error(truth, resparse).mean_cm;
      ++scored;
    }
  }
  std::ofstream(out) << result.dump() << '\n';
  json report = {{"windows", total_windows}, {"stride", stride}, {"order", order},
    {"mean_shift_cm", total_windows ? shift / static_cast<double>(total_windows) : 0.0}};
  if (scored > 0) {
    report["l2_dense_cm"] = before / static_cast<double>(scored);
    report["l2_sparsified_cm"] = after / static_cast<double>(scored);
    report["l2_delta_cm"] = (after - before) / static_cast<double>(scored);
  }
  std::cout << report.dump() << std::endl;
  return 0;
}

service::HttpServer * g_server = nullptr;

void handle_signal(int)
{
  if (g_server != nullptr) {
    g_server->stop();
  }
}

int run_serve(const std::vector<std::string> & checkpoints, const std::string & bind)
{
  if (checkpoints.empty()) {
    throw CliError("bad_flag", "serve needs at least one --checkpoint [id=]path");
  }
  service::Service svc;
  for (const auto & item : checkpoints) {
    const auto eq = item.find('=');
    const std::string id = eq == std::string::npos ?
      (checkpoints.size() == 1 ? "default" : fs::path(item).stem().string()) : item.substr(0, eq);
    const fs::path path = eq == std::string::npos ? fs::path(item) : fs::path(item.substr(eq + 1));
    if (!fs::exists(path)) {
      throw CliError("missing_file", "checkpoint not found: " + path.string());
    }
    svc.set_model(id, models::load_predictor(diff::load_checkpoint(path)));
  }
  const auto address = bind.empty() ? service::bind_address_from_env() :
    service::parse_bind_address(bind);
  service::HttpServer server(svc);
  const int port = server.bind(address);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cout << json{{"listening", address.host + ":" + std::to_string(port)}, {"port", port},
    {"models", svc.model_ids()}}.dump() << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  sparsetraj::kernels::tune_allocator();
  CLI::App app{"Sparse trajectory prediction toolkit"};
  app.require_subcommand(1);

  auto * synth = app.add_subcommand("synth", "Generate a synthetic tracking dataset");
  std::uint64_t seed = 0;
  int count = 0;
  data::SynthParams synth_params;
  std::string out;
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--count", count, "Number of plays")->required()->check(CLI::PositiveNumber);
  synth->add_option("--plays-per-match", synth_params.plays_per_match, "Plays per match file")
  ->check(CLI::PositiveNumber);
  synth->add_option("--min-play-frames", synth_params.min_play_frames, "Shortest play in frames")
  ->check(CLI::PositiveNumber);
  synth->add_option("--max-play-frames", synth_params.max_play_frames, "Longest play in frames")
  ->check(CLI::PositiveNumber);
  synth->add_option("--out", out, "Output directory")->required();

  auto * trn = app.add_subcommand("train", "Train a model on a dataset manifest");
  std::string config;
  std::string manifest;
  std::string seeds;
  int epochs = 0;
  bool low_lr = false;
  double max_grad_norm = 0.0;
  trn->add_option("--config", config, "Config file ([model] and [train])")->required();
  trn->add_option("--manifest", manifest, "Dataset manifest")->required();
  trn->add_option("--out", out, "Run directory")->required();
  trn->add_option("--seeds", seeds, "Comma separated seeds (overrides config)");
  trn->add_option("--epochs", epochs, "Epochs (overrides config)");
  trn->add_flag("--low-lr", low_lr, "Use the 1e-6 learning rate preset");
  trn->add_option("--max-grad-norm", max_grad_norm, "Clip gradients to this global norm");

  auto * ev = app.add_subcommand("eval", "Evaluate trained checkpoints");
  std::vector<std::string> checkpoints;
  std::string run_dir;
  std::string split = "test";
  std::vector<int> strides{1};
  int order = 2;
  std::string report;
  std::string curve;
  std::string svg;
  std::string dump;
  ev->add_option("--checkpoint", checkpoints, "Checkpoint file (repeatable, one per seed)");
  ev->add_option("--run", run_dir, "Run directory from train (uses seed_*/best.ckpt)");
  std::string eval_config;
  ev->add_option("--config", eval_config, "Config whose [model] the checkpoints must match");
  ev->add_option("--manifest", manifest, "Dataset manifest")->required();
  ev->add_option("--split", split, "train, val or test");
  ev->add_option("--eval-stride", strides, "Evaluation stride(s) in steps")->expected(1, -1);
  ev->add_option("--order", order, "Motion order for re-densification")->check(CLI::Range(1, 4));
  bool defenders_only = false;
  ev->add_flag("--defenders-only", defenders_only, "Score only the defending team");
  ev->add_option("--out", report, "Report CSV (stdout when omitted)");
  ev->add_option("--curve", curve, "Cumulative curve CSV of the first stride");
  ev->add_option("--svg", svg, "Cumulative curves plot");
  ev->add_option("--dump-predictions", dump, "Dense prediction file for sparsify");

  auto * sw = app.add_subcommand("sweep", "Run an experiment grid");
  std::string preset;
  sw->add_option("--preset", preset, "Grid name")->required()->check(
    CLI::IsMember(sweep::preset_names()));
  sw->add_option("--config", config, "Base config file")->required();
  sw->add_option("--manifest", manifest, "Dataset manifest")->required();
  sw->add_option("--out", out, "Output directory")->required();

  auto * sp = app.add_subcommand("sparsify", "Sparsify and re-densify a dense prediction file");
  std::string input;
  int stride = 1;
  sp->add_option("--input", input, "Dense prediction JSON")->required();
  sp->add_option("--stride", stride, "Stride in steps")->required()->check(CLI::PositiveNumber);
  sp->add_option("--order", order, "Motion order")->check(CLI::Range(1, 4));
  sp->add_option("--out", out, "Output JSON")->required();

  auto * sv = app.add_subcommand("serve", "Serve the HTTP prediction API");
  std::string bind;
  sv->add_option("--checkpoint", checkpoints, "[id=]checkpoint (repeatable)")->required();
  sv->add_option("--bind", bind, "host:port (default: $SPARSETRAJ_BIND or 127.0.0.1:8080)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << std::endl;
    return 2;
  }

  try {
    if (*synth) {
      return run_synth(seed, count, synth_params, out);
    }
    if (*trn) {
      return run_train(config, manifest, out, seeds, epochs, low_lr, max_grad_norm);
    }
    if (*ev) {
      return run_eval(checkpoints, run_dir, eval_config, manifest, split, strides, order,
        defenders_only, report, curve, svg, dump);
    }
    if (*sw) {
      return run_sweep(preset, config, manifest, out);
    }
    if (*sp) {
      return run_sparsify(input, stride, order, out);
    }
    if (*sv) {
      return run_serve(checkpoints, bind);
    }
  } catch (const CliError & e) {
    std::cerr << json{{"error", {{"kind", e.kind}, {"message", e.what()}}}}.dump() << std::endl;
    return 1;
  } catch (const diff::CheckpointError & e) {
    std::cerr << json{{"error", {{"kind", "checkpoint"}, {"message", e.what()}}}}.dump() << std::endl;
    return 1;
  } catch (const ConfigError & e) {
    std::cerr << json{{"error", {{"kind", "config"}, {"message", e.what()}}}}.dump() << std::endl;
    return 1;
  } catch (const std::exception & e) {
    std::cerr << json{{"error", {{"kind", "failure"}, {"message", e.what()}}}}.dump() << std::endl;
    return 1;
  }
  return 0;
}
