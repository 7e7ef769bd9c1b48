#pragma once

// HTTP+JSON front end for the play service.
//
//   POST /sessions                    {game, agent, rounds, talk, seed?, seat?}
//   POST /sessions/{id}/messages      {acts: [{id, plan?}, ...]}
//   POST /sessions/{id}/action        {action: 0|1}
//   GET  /sessions/{id}/state
//   GET  /sessions/{id}/transcript
//   GET  /catalog
//   GET  /agents
//   GET  /games
//
// `game` is either a game document or the name of a built-in game. Errors are
// {"error": {"code": <ErrorCode name>, "message": ...}}.

#include <string>

#include "httplib.h"
#include "json.hpp"

#include "cooplab/baselines.hpp"
#include "cooplab/error.hpp"
#include "cooplab/play_service.hpp"
#include "cooplab/signaling.hpp"

namespace cooplab {

inline int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::WrongPhase: return 409;
    case ErrorCode::AgentFailure:
    case ErrorCode::IoError: return 500;
    default: return 400;
  }
}

inline nlohmann::json error_body(ErrorCode c, const std::string& message) {
  return {{"error", {{"code", to_string(c)}, {"message", message}}}};
}

inline SessionConfig session_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
  SessionConfig cfg;
  try {
    if (!j.contains("game")) throw Error(ErrorCode::InvalidGame, "missing 'game'");
    cfg.game = j.at("game").is_string() ? games::by_name(j.at("game").get<std::string>()) : j.at("game").get<Game>();
    if (!j.contains("agent") || !j.at("agent").is_string()) throw Error(ErrorCode::UnknownAgent, "missing 'agent'");
    cfg.agent = j.at("agent").get<std::string>();
    cfg.rounds = j.value("rounds", 10);
    cfg.talk = j.value("talk", false);
    if (j.contains("seed") && !j.at("seed").is_null()) cfg.seed = j.at("seed").get<std::uint64_t>();
    std::string seat = j.value("seat", std::string("row"));
    if (seat != "row" && seat != "col") throw Error(ErrorCode::BadRequest, "seat must be 'row' or 'col'");
    cfg.human = seat == "row" ? Player::Row : Player::Col;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadRequest, e.what());
  }
  return cfg;
}

inline std::vector<SpeechAct> acts_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("acts") || !j.at("acts").is_array()) {
    throw Error(ErrorCode::InvalidAct, "body must be {\"acts\": [...]}");
  }
  std::vector<SpeechAct> out;
  try {
    for (const auto& a : j.at("acts")) out.push_back(a.get<SpeechAct>());
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidAct, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidAct, e.what());
  }
  return out;
}

inline nlohmann::json agents_json() {
  auto out = nlohmann::json::array();
  for (const auto& info : baseline_registry()) out.push_back({{"name", info.name}, {"description", info.description}});
  return out;
}

inline void install_routes(httplib::Server& server, SessionStore& store) {
  auto reply = [](httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  auto guarded = [reply](auto handler) {
    return [handler, reply](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        reply(res, error_body(e.code(), e.what()), http_status(e.code()));
      } catch (const std::exception& e) {
        reply(res, error_body(ErrorCode::BadRequest, e.what()), 400);
      }
    };
  };
  auto body_of = [](const httplib::Request& req) {
    auto j = nlohmann::json::parse(req.body.empty() ? std::string("{}") : req.body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::BadRequest, "request body is not valid JSON");
    return j;
  };

  server.Post("/sessions", guarded([&store, reply, body_of](const httplib::Request& req, httplib::Response& res) {
                reply(res, store.create(session_config_from_json(body_of(req))), 201);
              }));
  server.Post(R"(/sessions/([0-9a-f]+)/messages)",
              guarded([&store, reply, body_of](const httplib::Request& req, httplib::Response& res) {
                auto acts = acts_from_json(body_of(req));
                auto incoming = store.submit_messages(req.matches[1], acts);
                reply(res, {{"incoming", incoming}, {"state", store.state(req.matches[1])}});
              }));
  server.Post(R"(/sessions/([0-9a-f]+)/action)",
              guarded([&store, reply, body_of](const httplib::Request& req, httplib::Response& res) {
                auto j = body_of(req);
                if (!j.contains("action") || !j.at("action").is_number_integer()) {
                  throw Error(ErrorCode::InvalidAction, "body must be {\"action\": 0|1}");
                }
                reply(res, store.submit_action(req.matches[1], j.at("action").get<int>()));
              }));
  server.Get(R"(/sessions/([0-9a-f]+)/state)", guarded([&store, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, store.state(req.matches[1]));
             }));
  server.Get(R"(/sessions/([0-9a-f]+)/transcript)",
             guarded([&store, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, nlohmann::json(store.client_transcript(req.matches[1])));
             }));
  server.Get("/catalog", [reply](const httplib::Request&, httplib::Response& res) { reply(res, catalog_json()); });
  server.Get("/agents", [reply](const httplib::Request&, httplib::Response& res) { reply(res, agents_json()); });
  server.Get("/games", [reply](const httplib::Request&, httplib::Response& res) {
    auto out = nlohmann::json::object();
    for (const auto& n : games::names()) out[n] = games::by_name(n);
    reply(res, out);
  });
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
}

}  // namespace cooplab
