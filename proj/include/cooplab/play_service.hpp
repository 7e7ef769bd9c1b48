#pragma once

// Sessions in which a human client plays a repeated game against a registry
// agent. The client sees the game, the round and its own history; it never
// sees which agent it is playing.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "cooplab/agent.hpp"
#include "cooplab/baselines.hpp"
#include "cooplab/error.hpp"
#include "cooplab/game.hpp"
#include "cooplab/rng.hpp"
#include "cooplab/signaling.hpp"
#include "cooplab/tournament.hpp"
#include "cooplab/transcript.hpp"

namespace cooplab {

enum class SessionPhase : std::uint8_t { AwaitingMessages, AwaitingAction, RoundComplete, Finished };

inline std::string_view to_string(SessionPhase p) {
  switch (p) {
    case SessionPhase::AwaitingMessages: return "AwaitingMessages";
    case SessionPhase::AwaitingAction: return "AwaitingAction";
    case SessionPhase::RoundComplete: return "RoundComplete";
    case SessionPhase::Finished: return "Finished";
  }
  return "?";
}

struct SessionConfig {
  Game game;
  std::string agent;
  int rounds = 10;
  bool talk = false;
  std::optional<std::uint64_t> seed;
  Player human = Player::Row;
};

inline constexpr std::string_view kHiddenPartner = "partner";
inline constexpr std::string_view kHumanName = "human";

// One human-versus-agent game.
class Session {
 public:
  Session(std::string id, SessionConfig cfg) : id_(std::move(id)), cfg_(std::move(cfg)) {
    if (cfg_.rounds < 1) throw Error(ErrorCode::InvalidGame, "rounds must be at least 1");
    if (!find_baseline(cfg_.agent)) {
      throw Error(ErrorCode::UnknownAgent, "unknown agent '" + cfg_.agent + "'");
    }
    if (!cfg_.seed) throw Error(ErrorCode::BadRequest, "session needs a seed");
    seed_ = *cfg_.seed;
    BaselineSpec spec{cfg_.agent, {}, 0, std::nullopt};
    spec.seed = agent_seed(seed_, spec, agent_seat());
    agent_ = instantiate_baseline(spec, cfg_.game, other(cfg_.human), cfg_.talk);
    transcript_.game = cfg_.game;
    transcript_.rounds = cfg_.rounds;
    transcript_.talk = cfg_.talk;
    transcript_.seed = seed_;
    const std::string agent_name = cfg_.agent;
    transcript_.agent_a = cfg_.human == Player::Row ? std::string(kHumanName) : agent_name;
    transcript_.agent_b = cfg_.human == Player::Row ? agent_name : std::string(kHumanName);
    transcript_.metadata = {{"session", id_},
                            {"human_seat", cfg_.human == Player::Row ? "row" : "col"},
                            {"agent", baseline_metadata(spec)},
                            {"version", kArtifactVersion},
                            {"catalog_version", kCatalogVersion}};
    phase_ = cfg_.talk ? SessionPhase::AwaitingMessages : SessionPhase::AwaitingAction;
    touch();
  }

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return cfg_; }
  SessionPhase phase() const { return phase_; }
  int current_round() const { return round_; }
  std::uint64_t seed() const { return seed_; }
  std::mutex& mutex() { return mutex_; }
  std::chrono::steady_clock::time_point last_touched() const { return touched_; }

  // The agent's acts for this round are fixed before it hears the human's.
  std::vector<SpeechAct> submit_messages(const std::vector<SpeechAct>& acts) {
    touch();
    if (!cfg_.talk) throw Error(ErrorCode::TalkDisabled, "this session has no cheap talk");
    if (phase_ != SessionPhase::AwaitingMessages) {
      throw Error(ErrorCode::WrongPhase, "messages are not expected in phase " + std::string(to_string(phase_)));
    }
    if (acts.size() > kMaxActsPerRound) throw Error(ErrorCode::InvalidAct, "at most 3 acts per round");
    for (const auto& a : acts) {
      try {
        validate(a);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidAct, e.what());
      }
    }
    auto agent_acts = limit_acts(agent_->speak(round_));
    agent_->hear(round_, acts);
    pending_.round = round_;
    human_messages(pending_) = acts;
    agent_messages(pending_) = agent_acts;
    phase_ = SessionPhase::AwaitingAction;
    return agent_acts;
  }

  nlohmann::json submit_action(int action) {
    touch();
    if (phase_ != SessionPhase::AwaitingAction &&
        !(phase_ == SessionPhase::AwaitingMessages && !cfg_.talk)) {
      throw Error(ErrorCode::WrongPhase, "an action is not expected in phase " + std::string(to_string(phase_)));
    }
    if (action != 0 && action != 1) throw Error(ErrorCode::InvalidAction, "action must be 0 or 1");
    Action mine = action_from_int(action);
    Action theirs = agent_->act(round_);
    RoundRecord rec = pending_;
    rec.round = round_;
    rec.joint = JointAction::make(cfg_.human, mine, theirs);
    rec.payoffs = cfg_.game.payoffs(rec.joint);
    agent_->observe({round_, rec.joint, rec.payoffs});
    totals_[0] += rec.payoffs[index(cfg_.human)];
    totals_[1] += rec.payoffs[index(other(cfg_.human))];
    transcript_.records.push_back(rec);
    pending_ = {};
    phase_ = SessionPhase::RoundComplete;
    auto out = round_view(rec);
    if (round_ == cfg_.rounds) {
      phase_ = SessionPhase::Finished;
    } else {
      ++round_;
      phase_ = cfg_.talk ? SessionPhase::AwaitingMessages : SessionPhase::AwaitingAction;
    }
    out["phase"] = to_string(phase_);
    out["totals"] = totals_json();
    return out;
  }

  nlohmann::json view() const {
    nlohmann::json v{{"session", id_},
                     {"game", cfg_.game},
                     {"seat", cfg_.human == Player::Row ? "row" : "col"},
                     {"rounds", cfg_.rounds},
                     {"talk", cfg_.talk},
                     {"phase", to_string(phase_)},
                     {"round", round_},
                     {"totals", totals_json()}};
    v["menu"] = cfg_.talk ? catalog_json() : nlohmann::json(nullptr);
    if (phase_ == SessionPhase::AwaitingAction && cfg_.talk) v["incoming"] = agent_messages(pending_);
    auto history = nlohmann::json::array();
    for (const auto& r : transcript_.records) history.push_back(round_view(r));
    v["history"] = history;
    return v;
  }

  // What the client may download: the agent's name is replaced.
  Transcript client_transcript() const {
    Transcript t = transcript_;
    (cfg_.human == Player::Row ? t.agent_b : t.agent_a) = std::string(kHiddenPartner);
    t.metadata = {{"session", id_},
                  {"human_seat", cfg_.human == Player::Row ? "row" : "col"},
                  {"catalog_version", kCatalogVersion}};
    return t;
  }

  const Transcript& stored_transcript() const { return transcript_; }

 private:
  int agent_seat() const { return cfg_.human == Player::Row ? 2 : 1; }
  std::vector<SpeechAct>& human_messages(RoundRecord& r) const {
    return cfg_.human == Player::Row ? r.messages_a : r.messages_b;
  }
  std::vector<SpeechAct>& agent_messages(RoundRecord& r) const {
    return cfg_.human == Player::Row ? r.messages_b : r.messages_a;
  }
  const std::vector<SpeechAct>& agent_messages(const RoundRecord& r) const {
    return cfg_.human == Player::Row ? r.messages_b : r.messages_a;
  }
  const std::vector<SpeechAct>& human_messages(const RoundRecord& r) const {
    return cfg_.human == Player::Row ? r.messages_a : r.messages_b;
  }

  nlohmann::json round_view(const RoundRecord& r) const {
    const Player h = cfg_.human;
    return {{"round", r.round},
            {"joint", r.joint},
            {"own_action", index(r.joint.of(h))},
            {"partner_action", index(r.joint.of(other(h)))},
            {"own_payoff", r.payoffs[index(h)]},
            {"partner_payoff", r.payoffs[index(other(h))]},
            {"sent", human_messages(r)},
            {"incoming", agent_messages(r)}};
  }

  nlohmann::json totals_json() const { return {{"own", totals_[0]}, {"partner", totals_[1]}}; }
  void touch() { touched_ = std::chrono::steady_clock::now(); }

  std::string id_;
  SessionConfig cfg_;
  std::uint64_t seed_ = 0;
  AgentPtr agent_;
  Transcript transcript_;
  RoundRecord pending_;
  SessionPhase phase_ = SessionPhase::AwaitingMessages;
  int round_ = 1;
  std::array<double, 2> totals_{};
  std::mutex mutex_;
  std::chrono::steady_clock::time_point touched_;
};

// Owns the live sessions. Each call locks the store only long enough to find
// the session, then holds that session's own lock.
class SessionStore {
 public:
  struct Options {
    std::chrono::seconds idle_timeout{3600};
    std::optional<std::filesystem::path> transcript_dir;
  };

  SessionStore() = default;
  explicit SessionStore(Options opts) : opts_(std::move(opts)) {}

  nlohmann::json create(SessionConfig cfg) {
    expire_idle();
    std::string id;
    {
      std::lock_guard lock(mutex_);
      if (!cfg.seed) cfg.seed = entropy_();
      id = make_id();
    }
    auto s = std::make_shared<Session>(id, std::move(cfg));
    std::lock_guard lock(mutex_);
    sessions_[id] = s;
    return s->view();
  }

  std::vector<SpeechAct> submit_messages(const std::string& id, const std::vector<SpeechAct>& acts) {
    auto s = get(id);
    std::lock_guard lock(s->mutex());
    return s->submit_messages(acts);
  }

  nlohmann::json submit_action(const std::string& id, int action) {
    auto s = get(id);
    std::lock_guard lock(s->mutex());
    auto out = s->submit_action(action);
    if (s->phase() == SessionPhase::Finished) persist(*s);
    return out;
  }

  nlohmann::json state(const std::string& id) {
    auto s = get(id);
    std::lock_guard lock(s->mutex());
    return s->view();
  }

  Transcript client_transcript(const std::string& id) {
    auto s = get(id);
    std::lock_guard lock(s->mutex());
    return s->client_transcript();
  }

  Transcript stored_transcript(const std::string& id) {
    auto s = get(id);
    std::lock_guard lock(s->mutex());
    return s->stored_transcript();
  }

  // Drops sessions idle past the timeout, saving what they played.
  std::size_t expire_idle(std::chrono::steady_clock::time_point now = std::chrono::steady_clock::now()) {
    std::vector<std::shared_ptr<Session>> expired;
    {
      std::lock_guard lock(mutex_);
      for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (now - it->second->last_touched() > opts_.idle_timeout) {
          expired.push_back(it->second);
          it = sessions_.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (auto& s : expired) {
      std::lock_guard lock(s->mutex());
      if (s->phase() != SessionPhase::Finished) persist(*s);
    }
    return expired.size();
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  std::shared_ptr<Session> get(const std::string& id) {
    expire_idle();
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
    return it->second;
  }

  std::string make_id() {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(entropy_()));
    return buf;
  }

  void persist(const Session& s) {
    if (!opts_.transcript_dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*opts_.transcript_dir, ec);
    nlohmann::json j = s.stored_transcript();
    write_file(*opts_.transcript_dir / (s.id() + ".json"), j.dump(2) + "\n");
  }

  Options opts_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 entropy_{std::random_device{}()};
};

// Rebuilds the agent's side of a stored session from its seed and the human's
// moves. Returns the agent's actions, which match the transcript when the
// agent is deterministic given (seed, history).
inline std::vector<Action> replay_agent(const Transcript& t, const std::string& agent, Player human) {
  BaselineSpec spec{agent, {}, 0, std::nullopt};
  spec.seed = agent_seed(t.seed, spec, human == Player::Row ? 2 : 1);
  auto a = instantiate_baseline(spec, t.game, other(human), t.talk);
  std::vector<Action> out;
  for (const auto& r : t.records) {
    if (t.talk) {
      a->speak(r.round);
      a->hear(r.round, human == Player::Row ? r.messages_a : r.messages_b);
    }
    out.push_back(a->act(r.round));
    a->observe({r.round, r.joint, r.payoffs});
  }
  return out;
}

}  // namespace cooplab
