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
#ifndef SPARSETRAJ__SERVICE_HPP_
#define SPARSETRAJ__SERVICE_HPP_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sparsetraj/models/predictor.hpp"

namespace sparsetraj::service
{

inline constexpr double kFrameRateHz = 10.0;
inline constexpr double kPitchHalfLength = 52.5;
inline constexpr double kPitchHalfWidth = 34.0;
inline constexpr double kPitchSlack = 10.0;

struct HttpResponse
{
  int status = 200;
  std::string body;
};

/// Request handling for the prediction API, independent of any socket.
///
///   POST /v1/predict              standard prediction (past-only inputs)
///   POST /v1/predict_conditioned  defender prediction from full ball and
///                                 attacker trajectories plus defender pasts
///   GET  /v1/models               loaded models and their specs
///
/// Request body:
///
///   {"model_id": "default",        optional when one model is loaded
///    "units": "m",                 optional, must be "m"
///    "frame_rate_hz": 10,          optional, must match the model
///    "horizon": 40,                optional, <= trained horizon
///    "ball": [[x, y], ...],
///    "attackers": [[[x, y], ...] x team_size],
///    "defenders": [[[x, y], ...] x team_size]}
///
/// Ball and attackers carry input_len points for /v1/predict and
/// input_len + horizon (trained) for /v1/predict_conditioned; defenders
/// always carry input_len points. Responses list agents in the order ball,
/// attackers, defenders (defenders only when conditioned), each with its
/// dense trajectory [step][x, y] and the control points behind it.
///
/// Status codes: 400 malformed body or field, 404 unknown model id, 422
/// request incompatible with the model spec, 500 unexpected failure (no
/// details leaked). Errors are {"error": {"code", "message", "field"}}.
class Service
{
public:
  /// Adds or atomically replaces a model.
  void set_model(const std::string & id, std::shared_ptr<const models::Predictor> model);
  std::vector<std::string> model_ids() const;

  HttpResponse predict(std::string_view body, bool conditioned) const;
  HttpResponse list_models() const;

private:
  std::shared_ptr<const models::Predictor> find(const std::string & id, std::string & resolved) const;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const models::Predictor>> models_;
};

struct BindAddress
{
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Parses "host:port" (or ":port" / "port"). Throws std::invalid_argument.
BindAddress parse_bind_address(std::string_view text);
/// SPARSETRAJ_BIND from the environment, or the default.
BindAddress bind_address_from_env();

/// HTTP front end over a Service.
class HttpServer
{
public:
  explicit HttpServer(const Service & service);
  ~HttpServer();

  HttpServer(const HttpServer &) = delete;
  HttpServer & operator=(const HttpServer &) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  /// Throws std::runtime_error on failure.
  int bind(const BindAddress & address);
  /// Serves until stop(); blocks.
  void listen();
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sparsetraj::service

#endif  // SPARSETRAJ__SERVICE_HPP_
