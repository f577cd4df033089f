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
#include "sparsetraj/service.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "sparsetraj/diffcore/checkpoint.hpp"

namespace sparsetraj::service
{

using nlohmann::json;

namespace
{

struct RequestError
{
  int status;
  std::string code;
  std::string message;
  std::string field;
};

HttpResponse error_response(const RequestError & e)
{
  json body = {{"error", {{"code", e.code}, {"message", e.message}}}};
  if (!e.field.empty()) {
    body["error"]["field"] = e.field;
  }
  return {e.status, body.dump()};
}

[[noreturn]] void bad(const std::string & field, const std::string & message)
{
  throw RequestError{400, "invalid_field", message, field};
}

[[noreturn]] void incompatible(const std::string & field, const std::string & message)
{
  throw RequestError{422, "incompatible_with_model", message, field};
}

// [[x, y], ...] with finite coordinates inside the pitch plus slack.
std::vector<double> parse_track(const json & value, const std::string & field)
{
  if (!value.is_array() || value.empty()) {
    bad(field, field + " must be a non-empty array of [x, y] points");
  }
  std::vector<double> out;
  out.reserve(2 * value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    const json & p = value[i];
    const std::string where = field + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      bad(where, where + " must be [x, y] with numeric coordinates");
    }
    const double x = p[0].get<double>();
    const double y = p[1].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y)) {
      bad(where, where + " has a non-finite coordinate");
    }
    if (std::abs(x) > kPitchHalfLength + kPitchSlack || std::abs(y) > kPitchHalfWidth + kPitchSlack) {
      bad(where, where + " lies outside the pitch (pitch-centred metres)");
    }
    out.push_back(x);
    out.push_back(y);
  }
  return out;
}

std::vector<std::vector<double>> parse_team(const json & body, const std::string & field, int team_size)
{
  if (!body.contains(field)) {
    bad(field, "missing field " + field);
  }
  const json & v = body.at(field);
  if (!v.is_array()) {
    bad(field, field + " must be an array of trajectories");
  }
  if (v.size() != static_cast<std::size_t>(team_size)) {
    bad(field, field + " must hold exactly " + std::to_string(team_size) + " trajectories, got " +
      std::to_string(v.size()));
  }
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_track(v[i], field + "[" + std::to_string(i) + "]"));
    if (out.back().size() != out.front().size()) {
      bad(field, "all " + field + " trajectories must have the same length");
    }
  }
  return out;
}

json point(double x, double y) {return json::array({x, y});}

}  // namespace

void Service::set_model(const std::string & id, std::shared_ptr<const models::Predictor> model)
{
  if (!model) {
    throw std::invalid_argument("set_model: null model");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  models_[id] = std::move(model);
}

std::vector<std::string> Service::model_ids() const
{
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> ids;
  for (const auto & [id, m] : models_) {
    ids.push_back(id);
  }
  return ids;
}

std::shared_ptr<const models::Predictor> Service::find(const std::string & id, std::string & resolved) const
{
  std::lock_guard<std::mutex> lock(mutex_);
  if (id.empty()) {
    if (models_.size() == 1) {
      resolved = models_.begin()->first;
      return models_.begin()->second;
    }
    throw RequestError{400, "invalid_field", models_.empty() ? "no model loaded" :
              "model_id is required when several models are loaded", "model_id"};
  }
  const auto it = models_.find(id);
  if (it == models_.end()) {
    throw RequestError{404, "unknown_model", "no model with id '" + id + "'", "model_id"};
  }
  resolved = id;
  return it->second;
}

HttpResponse Service::list_models() const
{
  json out = {{"models", json::array()}};
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto & [id, m] : models_) {
    out["models"].push_back({{"id", id}, {"frame_rate_hz", kFrameRateHz}, {"units", "m"},
        {"spec", m->spec().to_json()},
        {"architecture_hash", diff::hex64(m->spec().architecture_hash())}});
  }
  return {200, out.dump()};
}

HttpResponse Service::predict(std::string_view body_text, bool conditioned) const
{
  try {
    json body;
    try {
      body = json::parse(body_text);
    } catch (const json::parse_error & e) {
      throw RequestError{400, "malformed_json", std::string("body is not valid JSON: ") + e.what(), ""};
    }
    if (!body.is_object()) {
      bad("", "body must be a JSON object");
    }
    std::string id;
    if (body.contains("model_id")) {
      if (!body["model_id"].is_string()) {
        bad("model_id", "model_id must be a string");
      }
      id = body["model_id"].get<std::string>();
    }
    std::string resolved;
    const auto model = find(id, resolved);
    const models::ModelSpec & spec = model->spec();

    if (body.contains("units") && body["units"] != "m") {
      bad("units", "units must be \"m\"");
    }
    if (body.contains("frame_rate_hz")) {
      if (!body["frame_rate_hz"].is_number()) {
        bad("frame_rate_hz", "frame_rate_hz must be a number");
      }
      if (std::abs(body["frame_rate_hz"].get<double>() - kFrameRateHz) > 1e-9) {
        incompatible("frame_rate_hz", "model runs at " + std::to_string(static_cast<int>(kFrameRateHz)) + " Hz");
      }
    }
    int horizon = spec.horizon;
    if (body.contains("horizon")) {
      if (!body["horizon"].is_number_integer() || body["horizon"].get<long long>() < 1) {
        bad("horizon", "horizon must be a positive integer number of steps");
      }
      const long long h = body["horizon"].get<long long>();
      if (h > spec.horizon) {
        incompatible("horizon", "requested horizon " + std::to_string(h) +
          " exceeds the trained horizon " + std::to_string(spec.horizon));
      }
      horizon = static_cast<int>(h);
    }
    if (spec.conditioned != conditioned) {
      incompatible("model_id", conditioned ?
        "model '" + resolved + "' is not a conditioned model; use /v1/predict" :
        "model '" + resolved + "' is conditioned; use /v1/predict_conditioned");
    }

    if (!body.contains("ball")) {
      bad("ball", "missing field ball");
    }
    const auto ball = parse_track(body["ball"], "ball");
    const auto attackers = parse_team(body, "attackers", spec.team_size);
    const auto defenders = parse_team(body, "defenders", spec.team_size);
    const std::size_t n = static_cast<std::size_t>(spec.input_len);
    const std::size_t lead_len = conditioned ? static_cast<std::size_t>(spec.full_length()) : n;
    if (ball.size() != 2 * lead_len) {
      incompatible("ball", "ball needs " + std::to_string(lead_len) + " points, got " +
        std::to_string(ball.size() / 2));
    }
    if (attackers.front().size() != 2 * lead_len) {
      incompatible("attackers", "attacker trajectories need " + std::to_string(lead_len) +
        " points, got " + std::to_string(attackers.front().size() / 2));
    }
    if (defenders.front().size() != 2 * n) {
      incompatible("defenders", "defender pasts need " + std::to_string(n) + " points, got " +
        std::to_string(defenders.front().size() / 2));
    }

    models::SceneBatch scenes;
    scenes.batch = 1;
    scenes.team_size = spec.team_size;
    scenes.past_len = spec.input_len;
    const auto agents = static_cast<std::size_t>(spec.agent_count());
    scenes.past = diff::Array(agents, 2 * n);
    if (conditioned) {
      scenes.future_len = spec.horizon;
      scenes.future = diff::Array(agents, 2 * static_cast<std::size_t>(spec.horizon));
    }
    auto place = [&](std::size_t row, const std::vector<double> & track) {
        std::copy_n(track.begin(), 2 * n, scenes.past.row(row));
        if (conditioned && row <= static_cast<std::size_t>(spec.team_size)) {
          std::copy(track.begin() + static_cast<std::ptrdiff_t>(2 * n), track.end(), scenes.future.row(row));
        }
      };
    place(0, ball);
    for (std::size_t i = 0; i < attackers.size(); ++i) {
      place(1 + i, attackers[i]);
    }
    for (std::size_t i = 0; i < defenders.size(); ++i) {
      place(1 + attackers.size() + i, defenders[i]);
    }

    const models::ScenePrediction pred = models::predict(*model, scenes);
    json out;
    out["model_id"] = resolved;
    out["units"] = "m";
    out["frame_rate_hz"] = kFrameRateHz;
    out["horizon"] = horizon;
    out["conditioned"] = conditioned;
    out["agents"] = json::array();
    for (int a = 0; a < pred.agents; ++a) {
      const int global = pred.first_agent + a;
      json agent;
      agent["group"] = global == 0 ? "ball" : (global <= spec.team_size ? "attacker" : "defender");
      agent["index"] = global == 0 ? 0 : (global - 1) % spec.team_size;
      agent["trajectory"] = json::array();
      for (int t = 0; t < horizon; ++t) {
        agent["trajectory"].push_back(point(pred.x(0, a, t), pred.y(0, a, t)));
      }
      agent["controls"] = json::array();
      for (std::size_t k = 0; k < pred.control_offsets.size(); ++k) {
        if (pred.control_offsets[k] > horizon) {
          break;
        }
        const double * row = pred.controls.row(static_cast<std::size_t>(a));
        agent["controls"].push_back({{"offset", pred.control_offsets[k]},
            {"position", point(row[2 * k], row[2 * k + 1])}});
      }
      out["agents"].push_back(std::move(agent));
    }
    return {200, out.dump()};
  } catch (const RequestError & e) {
    return error_response(e);
  } catch (const std::invalid_argument & e) {
    return error_response({422, "incompatible_with_model", e.what(), ""});
  } catch (const std::exception &) {
    return error_response({500, "internal", "internal error", ""});
  }
}

BindAddress parse_bind_address(std::string_view text)
{
  BindAddress addr;
  const auto colon = text.rfind(':');
  std::string_view port = text;
  if (colon != std::string_view::npos) {
    if (colon > 0) {
      addr.host = std::string(text.substr(0, colon));
    }
    port = text.substr(colon + 1);
  }
  if (port.empty()) {
    throw std::invalid_argument("bind address needs a port: '" + std::string(text) + "'");
  }
  int value = 0;
  for (char c : port) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("bad port in bind address '" + std::string(text) + "'");
    }
    value = value * 10 + (c - '0');
    if (value > 65535) {
      throw std::invalid_argument("port out of range in '" + std::string(text) + "'");
    }
  }
  addr.port = value;
  return addr;
}

BindAddress bind_address_from_env()
{
  const char * env = std::getenv("SPARSETRAJ_BIND");
  return env != nullptr && *env != '\0' ? parse_bind_address(env) : BindAddress{};
}

struct HttpServer::Impl
{
  httplib::Server server;
};

HttpServer::HttpServer(const Service & service)
: impl_(std::make_unique<Impl>())
{
  auto reply = [](httplib::Response & res, const HttpResponse & r) {
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
  impl_->server.Post("/v1/predict", [&service, reply](const httplib::Request & req, httplib::Response & res) {
      reply(res, service.predict(req.body, false));
    });
  impl_->server.Post("/v1/predict_conditioned",
    [&service, reply](const httplib::Request & req, httplib::Response & res) {
      reply(res, service.predict(req.body, true));
    });
  impl_->server.Get("/v1/models", [&service, reply](const httplib::Request &, httplib::Response & res) {
      reply(res, service.list_models());
    });
  impl_->server.set_exception_handler(
    [reply](const httplib::Request &, httplib::Response & res, std::exception_ptr) {
      reply(res, error_response({500, "internal", "internal error", ""}));
    });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const BindAddress & address)
{
  if (address.port == 0) {
    const int port = impl_->server.bind_to_any_port(address.host);
    if (port < 0) {
      throw std::runtime_error("cannot bind " + address.host);
    }
    return port;
  }
  if (!impl_->server.bind_to_port(address.host, address.port)) {
    throw std::runtime_error("cannot bind " + address.host + ":" + std::to_string(address.port));
  }
  return address.port;
}

void HttpServer::listen()
{
  impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
  impl_->server.stop();
}

void HttpServer::wait_until_ready() const
{
  impl_->server.wait_until_ready();
}

}  // namespace sparsetraj::service
