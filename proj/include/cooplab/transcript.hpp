#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cooplab/agent.hpp"
#include "cooplab/error.hpp"
#include "cooplab/game.hpp"
#include "cooplab/signaling.hpp"

namespace cooplab {

struct RoundRecord {
  int round = 0;
  JointAction joint;
  PayoffPair payoffs{};
  std::vector<SpeechAct> messages_a;  // sent by the row player
  std::vector<SpeechAct> messages_b;  // sent by the column player

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct Transcript {
  Game game;
  std::string agent_a;
  std::string agent_b;
  int rounds = 0;
  bool talk = false;
  std::uint64_t seed = 0;
  int trial = 0;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<RoundRecord> records;

  double mean_payoff(Player p, int from_round = 1, int to_round = -1) const {
    if (to_round < 0) to_round = static_cast<int>(records.size());
    double sum = 0;
    int n = 0;
    for (const auto& r : records) {
      if (r.round < from_round || r.round > to_round) continue;
      sum += r.payoffs[index(p)];
      ++n;
    }
    return n == 0 ? 0.0 : sum / n;
  }

  std::vector<JointAction> actions() const {
    std::vector<JointAction> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.joint);
    return out;
  }
};

inline void to_json(nlohmann::json& j, const RoundRecord& r) {
  j = {{"round", r.round}, {"joint", r.joint}, {"payoffs", r.payoffs}, {"messages_a", r.messages_a},
       {"messages_b", r.messages_b}};
}

inline void from_json(const nlohmann::json& j, RoundRecord& r) {
  try {
    r.round = j.at("round").get<int>();
    r.joint = j.at("joint").get<JointAction>();
    r.payoffs = j.at("payoffs").get<PayoffPair>();
    r.messages_a = j.value("messages_a", std::vector<SpeechAct>{});
    r.messages_b = j.value("messages_b", std::vector<SpeechAct>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedPayload, std::string("bad round record: ") + e.what());
  }
}

inline void to_json(nlohmann::json& j, const Transcript& t) {
  j = {{"game", t.game},
       {"agent_a", t.agent_a},
       {"agent_b", t.agent_b},
       {"rounds", t.rounds},
       {"talk", t.talk},
       {"seed", t.seed},
       {"trial", t.trial},
       {"catalog_version", kCatalogVersion},
       {"metadata", t.metadata},
       {"records", t.records}};
}

inline void from_json(const nlohmann::json& j, Transcript& t) {
  try {
    t.game = j.at("game").get<Game>();
    t.agent_a = j.value("agent_a", std::string{});
    t.agent_b = j.value("agent_b", std::string{});
    t.rounds = j.at("rounds").get<int>();
    t.talk = j.value("talk", false);
    t.seed = j.value("seed", std::uint64_t{0});
    t.trial = j.value("trial", 0);
    t.metadata = j.value("metadata", nlohmann::json::object());
    t.records = j.at("records").get<std::vector<RoundRecord>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedPayload, std::string("bad transcript: ") + e.what());
  }
}

// Plays one match. `a` is the row player and `b` the column player. Per round:
// messages are collected from both sides before either hears the other, then
// actions are collected, then the outcome is revealed to both.
inline Transcript play_match(const Game& g, Agent& a, Agent& b, int rounds, bool talk) {
  if (rounds < 1) throw Error(ErrorCode::InvalidGame, "rounds must be at least 1");
  Transcript t;
  t.game = g;
  t.rounds = rounds;
  t.talk = talk;
  t.records.reserve(static_cast<std::size_t>(rounds));
  for (int r = 1; r <= rounds; ++r) {
    try {
      RoundRecord rec;
      rec.round = r;
      if (talk) {
        rec.messages_a = limit_acts(a.speak(r));
        rec.messages_b = limit_acts(b.speak(r));
        for (const auto& act : rec.messages_a) validate(act);
        for (const auto& act : rec.messages_b) validate(act);
        a.hear(r, rec.messages_b);
        b.hear(r, rec.messages_a);
      }
      Action ra = a.act(r);
      Action cb = b.act(r);
      rec.joint = {ra, cb};
      rec.payoffs = g.payoffs(rec.joint);
      Outcome o{r, rec.joint, rec.payoffs};
      a.observe(o);
      b.observe(o);
      t.records.push_back(std::move(rec));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::AgentFailure) throw;
      throw Error(ErrorCode::AgentFailure, "round " + std::to_string(r) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::AgentFailure, "round " + std::to_string(r) + ": " + e.what());
    }
  }
  return t;
}

}  // namespace cooplab
