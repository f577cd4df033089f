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
#include "sparsetraj/config.hpp"
#include <doctest.h>

#include <cstdlib>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "../support/scenes.hpp"
#include "sparsetraj/models/predictor.hpp"
#include "sparsetraj/service.hpp"

using namespace sparsetraj;
using nlohmann::json;

namespace
{

models::ModelSpec small_granma(bool conditioned)
{
  models::ModelSpec s;
  s.kind = models::ModelKind::granma;
  s.embedding_width = 16;
  s.decoder_hidden = 16;
  s.output_stride = 4;
  s.conditioned = conditioned;
  s.init_seed = 2;
  return s;
}

json track(const diff::Array & past, const diff::Array & future, std::size_t row)
{
  json out = json::array();
  for (std::size_t c = 0; c < past.cols(); c += 2) {
    out.push_back({past.at(row, c), past.at(row, c + 1)});
  }
  if (!future.empty()) {
    for (std::size_t c = 0; c < future.cols(); c += 2) {
      out.push_back({future.at(row, c), future.at(row, c + 1)});
    }
  }
  return out;
}

// Request body for a single-scene batch; ball and attackers carry the future
// when `conditioned`.
json request_for(const models::SceneBatch & scene, bool conditioned)
{
  const diff::Array none;
  const diff::Array & lead = conditioned ? scene.future : none;
  json body;
  body["units"] = "m";
  body["frame_rate_hz"] = 10;
  body["ball"] = track(scene.past, lead, 0);
  body["attackers"] = json::array();
  body["defenders"] = json::array();
  for (int i = 0; i < scene.team_size; ++i) {
    body["attackers"].push_back(track(scene.past, lead, 1 + static_cast<std::size_t>(i)));
    body["defenders"].push_back(track(scene.past, none, 1 + static_cast<std::size_t>(scene.team_size + i)));
  }
  return body;
}

models::SceneBatch one_scene(std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  auto s = scenes::random_batch(1, rng);
  // Keep every agent on the pitch.
  for (std::size_t i = 0; i < s.past.size(); ++i) {
    s.past[i] *= 0.5;
  }
  for (std::size_t i = 0; i < s.future.size(); ++i) {
    s.future[i] *= 0.5;
  }
  return s;
}

struct Fixture
{
  service::Service svc;
  std::shared_ptr<models::Predictor> standard = models::make_predictor(small_granma(false));
  std::shared_ptr<models::Predictor> conditioned = models::make_predictor(small_granma(true));

  Fixture()
  {
    svc.set_model("std", standard);
    svc.set_model("cond", conditioned);
  }
};

json error_of(const service::HttpResponse & r)
{
  return json::parse(r.body).at("error");
}

}  // namespace

TEST_CASE("conditioned request returns 11 defender futures equal to predict")
{
  Fixture f;
  const auto scene = one_scene(1);
  json body = request_for(scene, true);
  body["model_id"] = "cond";
  const auto r = f.svc.predict(body.dump(), true);
  REQUIRE(r.status == 200);
  const json out = json::parse(r.body);
  CHECK(out["units"] == "m");
  CHECK(out["frame_rate_hz"] == 10.0);
  CHECK(out["horizon"] == 40);
  CHECK(out["conditioned"] == true);
  REQUIRE(out["agents"].size() == 11);
  const auto pred = models::predict(*f.conditioned, scene);
  for (int a = 0; a < 11; ++a) {
    const json & agent = out["agents"][static_cast<std::size_t>(a)];
    CHECK(agent["group"] == "defender");
    CHECK(agent["index"] == a);
    REQUIRE(agent["trajectory"].size() == 40);
    for (int t = 0; t < 40; ++t) {
      CHECK(agent["trajectory"][static_cast<std::size_t>(t)][0].get<double>() == pred.x(0, a, t));
      CHECK(agent["trajectory"][static_cast<std::size_t>(t)][1].get<double>() == pred.y(0, a, t));
    }
    REQUIRE(agent["controls"].size() == 10);
    CHECK(agent["controls"][9]["offset"] == 40);
  }
}

TEST_CASE("standard request returns all 23 agents equal to predict")
{
  Fixture f;
  const auto scene = one_scene(2);
  json body = request_for(scene, false);
  body["model_id"] = "std";
  const auto r = f.svc.predict(body.dump(), false);
  REQUIRE(r.status == 200);
  const json out = json::parse(r.body);
  REQUIRE(out["agents"].size() == 23);
  CHECK(out["agents"][0]["group"] == "ball");
  CHECK(out["agents"][1]["group"] == "attacker");
  CHECK(out["agents"][12]["group"] == "defender");
  auto past_only = scene;
  past_only.future = diff::Array();
  const auto pred = models::predict(*f.standard, past_only);
  for (int a = 0; a < 23; ++a) {
    for (int t = 0; t < 40; ++t) {
      CHECK(out["agents"][static_cast<std::size_t>(a)]["trajectory"][static_cast<std::size_t>(t)][0]
        .get<double>() == pred.x(0, a, t));
    }
  }
}

TEST_CASE("identical requests give identical bodies")
{
  Fixture f;
  json body = request_for(one_scene(3), true);
  body["model_id"] = "cond";
  const auto a = f.svc.predict(body.dump(), true);
  const auto b = f.svc.predict(body.dump(), true);
  CHECK(a.status == 200);
  CHECK(a.body == b.body);
}

TEST_CASE("shorter horizons truncate, longer ones are rejected")
{
  Fixture f;
  json body = request_for(one_scene(4), true);
  body["model_id"] = "cond";
  const json full = json::parse(f.svc.predict(body.dump(), true).body);
  body["horizon"] = 10;
  const auto r = f.svc.predict(body.dump(), true);
  REQUIRE(r.status == 200);
  const json out = json::parse(r.body);
  CHECK(out["horizon"] == 10);
  for (std::size_t a = 0; a < 11; ++a) {
    REQUIRE(out["agents"][a]["trajectory"].size() == 10);
    CHECK(out["agents"][a]["controls"].size() == 2);
    for (std::size_t t = 0; t < 10; ++t) {
      CHECK(out["agents"][a]["trajectory"][t] == full["agents"][a]["trajectory"][t]);
    }
  }
  body["horizon"] = 41;
  const auto too_long = f.svc.predict(body.dump(), true);
  CHECK(too_long.status == 422);
  CHECK(error_of(too_long)["field"] == "horizon");
  body["horizon"] = 0;
  CHECK(f.svc.predict(body.dump(), true).status == 400);
}

TEST_CASE("malformed requests are rejected with field-level messages")
{
  Fixture f;
  const json good = [] {
      json b = request_for(one_scene(5), true);
      b["model_id"] = "cond";
      return b;
    }();

  SUBCASE("10 attackers")
  {
    json b = good;
    b["attackers"].erase(b["attackers"].size() - 1);
    const auto r = f.svc.predict(b.dump(), true);
    CHECK(r.status == 400);
    const json e = error_of(r);
    CHECK(e["field"] == "attackers");
    CHECK(e["message"].get<std::string>().find("11") != std::string::npos);
  }
  SUBCASE("not JSON")
  {
    const auto r = f.svc.predict("{\"ball\": [", true);
    CHECK(r.status == 400);
    CHECK(error_of(r)["code"] == "malformed_json");
  }
  SUBCASE("not an object")
  {
    CHECK(f.svc.predict("[1, 2]", true).status == 400);
  }
  SUBCASE("bad point")
  {
    json b = good;
    b["ball"][3] = {1.0};
    const auto r = f.svc.predict(b.dump(), true);
    CHECK(r.status == 400);
    CHECK(error_of(r)["field"] == "ball[3]");
  }
  SUBCASE("off the pitch")
  {
    json b = good;
    b["defenders"][2][0] = {80.0, 0.0};
    const auto r = f.svc.predict(b.dump(), true);
    CHECK(r.status == 400);
    CHECK(error_of(r)["field"] == "defenders[2][0]");
  }
  SUBCASE("missing defenders")
  {
    json b = good;
    b.erase("defenders");
    CHECK(error_of(f.svc.predict(b.dump(), true))["field"] == "defenders");
  }
  SUBCASE("wrong units")
  {
    json b = good;
    b["units"] = "ft";
    CHECK(f.svc.predict(b.dump(), true).status == 400);
  }
  SUBCASE("wrong frame rate")
  {
    json b = good;
    b["frame_rate_hz"] = 25;
    CHECK(f.svc.predict(b.dump(), true).status == 422);
  }
  SUBCASE("past-only ball on the conditioned endpoint")
  {
    json b = request_for(one_scene(5), false);
    b["model_id"] = "cond";
    const auto r = f.svc.predict(b.dump(), true);
    CHECK(r.status == 422);
    CHECK(error_of(r)["field"] == "ball");
  }
  SUBCASE("endpoint does not match the model")
  {
    json b = good;
    b["model_id"] = "std";
    CHECK(f.svc.predict(b.dump(), true).status == 422);
  }
  SUBCASE("unknown model")
  {
    json b = good;
    b["model_id"] = "nope";
    const auto r = f.svc.predict(b.dump(), true);
    CHECK(r.status == 404);
    CHECK(error_of(r)["code"] == "unknown_model");
  }
  SUBCASE("model id required with several models")
  {
    json b = good;
    b.erase("model_id");
    CHECK(f.svc.predict(b.dump(), true).status == 400);
  }
}

TEST_CASE("model listing and replacement")
{
  Fixture f;
  const json list = json::parse(f.svc.list_models().body);
  REQUIRE(list["models"].size() == 2);
  CHECK(list["models"][0]["id"] == "cond");
  CHECK(list["models"][0]["spec"]["conditioned"] == true);
  CHECK(list["models"][1]["id"] == "std");

  json body = request_for(one_scene(6), true);
  body["model_id"] = "cond";
  const auto before = f.svc.predict(body.dump(), true);
  auto reseeded = small_granma(true);
  reseeded.init_seed = 9;
  f.svc.set_model("cond", models::make_predictor(reseeded));
  const auto after = f.svc.predict(body.dump(), true);
  CHECK(after.status == 200);
  CHECK(after.body != before.body);
  CHECK(f.svc.model_ids() == std::vector<std::string>{"cond", "std"});

  service::Service single;
  single.set_model("only", f.conditioned);
  body.erase("model_id");
  CHECK(single.predict(body.dump(), true).status == 200);
  CHECK_THROWS(single.set_model("null", nullptr));
}

TEST_CASE("concurrent requests match serialized ones")
{
  Fixture f;
  std::vector<std::string> bodies;
  std::vector<std::string> expected;
  for (std::uint64_t s = 0; s < 6; ++s) {
    json b = request_for(one_scene(10 + s), true);
    b["model_id"] = "cond";
    bodies.push_back(b.dump());
    expected.push_back(f.svc.predict(bodies.back(), true).body);
  }
  std::vector<std::vector<std::string>> got(4);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < got.size(); ++t) {
    threads.emplace_back([&, t] {
        for (int rep = 0; rep < 3; ++rep) {
          for (const auto & b : bodies) {
            got[t].push_back(f.svc.predict(b, true).body);
          }
        }
      });
  }
  for (auto & th : threads) {
    th.join();
  }
  for (const auto & list : got) {
    REQUIRE(list.size() == 3 * bodies.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(list[i] == expected[i % bodies.size()]);
    }
  }
}

TEST_CASE("HTTP server serves the same bodies as the service")
{
  Fixture f;
  service::HttpServer server(f.svc);
  const int port = server.bind({"127.0.0.1", 0});
  REQUIRE(port > 0);
  std::thread loop([&server] {server.listen();});
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  json body = request_for(one_scene(20), true);
  body["model_id"] = "cond";
  const auto direct = f.svc.predict(body.dump(), true);
  const auto res = client.Post("/v1/predict_conditioned", body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == direct.body);
  CHECK(res->get_header_value("Content-Type") == "application/json");

  json std_body = request_for(one_scene(21), false);
  std_body["model_id"] = "std";
  const auto std_res = client.Post("/v1/predict", std_body.dump(), "application/json");
  REQUIRE(std_res);
  CHECK(std_res->status == 200);
  CHECK(json::parse(std_res->body)["agents"].size() == 23);

  const auto models = client.Get("/v1/models");
  REQUIRE(models);
  CHECK(models->status == 200);
  CHECK(models->body == f.svc.list_models().body);

  body["attackers"].erase(0);
  const auto bad = client.Post("/v1/predict_conditioned", body.dump(), "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  body = request_for(one_scene(20), true);
  body["model_id"] = "missing";
  const auto missing = client.Post("/v1/predict_conditioned", body.dump(), "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  loop.join();
}

TEST_CASE("bind address parsing")
{
  auto a = service::parse_bind_address("0.0.0.0:9000");
  CHECK(a.host == "0.0.0.0");
  CHECK(a.port == 9000);
  a = service::parse_bind_address(":8081");
  CHECK(a.host == "127.0.0.1");
  CHECK(a.port == 8081);
  a = service::parse_bind_address("8082");
  CHECK(a.port == 8082);
  CHECK_THROWS_AS(service::parse_bind_address("localhost:"), std::invalid_argument);
  CHECK_THROWS_AS(service::parse_bind_address("localhost:http"), std::invalid_argument);
  CHECK_THROWS_AS(service::parse_bind_address("localhost:70000"), std::invalid_argument);

  ::setenv("SPARSETRAJ_BIND", "10.1.2.3:7000", 1);
  a = service::bind_address_from_env();
  CHECK(a.host == "10.1.2.3");
  CHECK(a.port == 7000);
  ::unsetenv("SPARSETRAJ_BIND");
  a = service::bind_address_from_env();
  CHECK(a.host == "127.0.0.1");
  CHECK(a.port == 8080);
}
