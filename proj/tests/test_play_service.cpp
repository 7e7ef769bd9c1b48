#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <thread>

#include "httplib.h"

#include "cooplab/analysis.hpp"
#include "cooplab/http_service.hpp"
#include "cooplab/play_service.hpp"

using namespace cooplab;
namespace fs = std::filesystem;

namespace {

SessionConfig config(const std::string& agent, bool talk, int rounds = 5) {
  SessionConfig c;
  c.game = games::prisoners_dilemma();
  c.agent = agent;
  c.rounds = rounds;
  c.talk = talk;
  c.seed = 77;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::BadRequest;
}

class HttpFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    install_routes(server_, store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  std::pair<int, nlohmann::json> post(const std::string& path, const nlohmann::json& body) {
    auto res = client_->Post(path, body.dump(), "application/json");
    if (!res) return {0, nullptr};
    return {res->status, nlohmann::json::parse(res->body)};
  }
  std::pair<int, nlohmann::json> get(const std::string& path) {
    auto res = client_->Get(path);
    if (!res) return {0, nullptr};
    return {res->status, nlohmann::json::parse(res->body)};
  }

  SessionStore store_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST(Session, MenuHasNineteenActsAndHidesAgent) {
  Session s("abc", config("ssharp", true));
  auto v = s.view();
  EXPECT_EQ(v["menu"]["acts"].size(), 19u);
  EXPECT_EQ(v["menu"]["categories"].size(), 5u);
  EXPECT_EQ(v.dump().find("ssharp"), std::string::npos);
  EXPECT_EQ(v["phase"], "AwaitingMessages");
  Session quiet("abd", config("ssharp", false));
  EXPECT_TRUE(quiet.view()["menu"].is_null());
}

TEST(Session, ConstructionErrors) {
  auto c = config("ssharp", true);
  c.rounds = 0;
  EXPECT_EQ(code_of([&] { Session("x", c); }), ErrorCode::InvalidGame);
  EXPECT_EQ(code_of([&] { Session("x", config("who", true)); }), ErrorCode::UnknownAgent);
  c = config("ssharp", true);
  c.seed.reset();
  EXPECT_EQ(code_of([&] { Session("x", c); }), ErrorCode::BadRequest);
}

TEST(Session, PhaseAndPayloadErrors) {
  Session s("abc", config("ssharp", true));
  EXPECT_EQ(code_of([&] { s.submit_action(0); }), ErrorCode::WrongPhase);
  EXPECT_EQ(code_of([&] { s.submit_messages({{19, std::nullopt}}); }), ErrorCode::InvalidAct);
  std::vector<SpeechAct> four(4, plain_act(acts::kThanks));
  EXPECT_EQ(code_of([&] { s.submit_messages(four); }), ErrorCode::InvalidAct);
  s.submit_messages({});
  EXPECT_EQ(code_of([&] { s.submit_messages({}); }), ErrorCode::WrongPhase);
  EXPECT_EQ(code_of([&] { s.submit_action(2); }), ErrorCode::InvalidAction);

  Session quiet("abd", config("ssharp", false));
  EXPECT_EQ(code_of([&] { quiet.submit_messages({}); }), ErrorCode::TalkDisabled);
}

TEST(Session, RoundsAdvanceToFinished) {
  Session s("abc", config("gtft", false, 3));
  for (int r = 1; r <= 3; ++r) {
    EXPECT_EQ(s.current_round(), r);
    auto out = s.submit_action(0);
    EXPECT_EQ(out["round"], r);
  }
  EXPECT_EQ(s.phase(), SessionPhase::Finished);
  EXPECT_EQ(code_of([&] { s.submit_action(0); }), ErrorCode::WrongPhase);
  auto v = s.view();
  EXPECT_EQ(v["history"].size(), 3u);
  EXPECT_DOUBLE_EQ(v["totals"]["own"].get<double>(), 9.0);
}

TEST(Session, HumanInColumnSeat) {
  auto c = config("bully", false, 2);
  c.game = games::chicken();
  c.human = Player::Col;
  Session s("abc", c);
  auto out = s.submit_action(0);
  EXPECT_EQ(out["partner_action"], 1);
  EXPECT_DOUBLE_EQ(out["own_payoff"].get<double>(), 2.0);
  EXPECT_EQ(s.stored_transcript().agent_a, "bully");
  EXPECT_EQ(s.client_transcript().agent_a, "partner");
  EXPECT_EQ(s.client_transcript().agent_b, "human");
}

TEST(Session, ReplayReproducesAgentActions) {
  Session s("abc", config("ssharp", true, 12));
  for (int r = 1; r <= 12; ++r) {
    s.submit_messages(r == 1 ? std::vector<SpeechAct>{propose(JointPlan::stationary({Action::First, Action::First}))}
                             : std::vector<SpeechAct>{});
    s.submit_action(r % 4 == 0 ? 1 : 0);
  }
  const auto& t = s.stored_transcript();
  auto replay = replay_agent(t, "ssharp", Player::Row);
  ASSERT_EQ(replay.size(), 12u);
  for (std::size_t i = 0; i < replay.size(); ++i) EXPECT_EQ(replay[i], t.records[i].joint.col);
}

TEST(Store, OmittedSeedIsRecordedAndUnknownSessionRejected) {
  SessionStore store;
  auto c = config("spp", false);
  c.seed.reset();
  auto v = store.create(c);
  std::string id = v["session"];
  EXPECT_EQ(store.size(), 1u);
  store.submit_action(id, 0);
  auto t = store.stored_transcript(id);
  auto replay = replay_agent(t, "spp", Player::Row);
  EXPECT_EQ(replay[0], t.records[0].joint.col);
  EXPECT_EQ(code_of([&] { store.state("feed"); }), ErrorCode::UnknownSession);
}

TEST(Store, ExpiredSessionsPersistPartialTranscripts) {
  auto dir = fs::temp_directory_path() / ("cooplab_sessions_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  SessionStore::Options opts;
  opts.idle_timeout = std::chrono::seconds(5);
  opts.transcript_dir = dir;
  SessionStore store(opts);
  std::string id = store.create(config("wsls", false))["session"];
  store.submit_action(id, 1);
  EXPECT_EQ(store.expire_idle(std::chrono::steady_clock::now() + std::chrono::seconds(10)), 1u);
  EXPECT_EQ(store.size(), 0u);
  auto saved = nlohmann::json::parse(read_file(dir / (id + ".json"))).get<Transcript>();
  EXPECT_EQ(saved.records.size(), 1u);
  EXPECT_EQ(saved.agent_b, "wsls");
  fs::remove_all(dir);
}

TEST(HttpMapping, StatusCodes) {
  EXPECT_EQ(http_status(ErrorCode::UnknownSession), 404);
  EXPECT_EQ(http_status(ErrorCode::WrongPhase), 409);
  EXPECT_EQ(http_status(ErrorCode::InvalidAct), 400);
  EXPECT_EQ(http_status(ErrorCode::AgentFailure), 500);
}

TEST_F(HttpFixture, CatalogAgentsAndGames) {
  auto [s1, catalog] = get("/catalog");
  EXPECT_EQ(s1, 200);
  EXPECT_EQ(catalog, catalog_json());
  auto [s2, agents] = get("/agents");
  EXPECT_EQ(s2, 200);
  EXPECT_EQ(agents.size(), baseline_registry().size());
  auto [s3, gs] = get("/games");
  EXPECT_EQ(s3, 200);
  EXPECT_TRUE(gs.contains("chicken"));
}

TEST_F(HttpFixture, FullTalkSession) {
  auto [status, created] = post("/sessions", {{"game", "prisoners_dilemma"}, {"agent", "ssharp"}, {"rounds", 4},
                                              {"talk", true}, {"seed", 5}});
  ASSERT_EQ(status, 201);
  std::string id = created["session"];
  EXPECT_EQ(created.dump().find("ssharp"), std::string::npos);

  auto [bad_status, bad] = post("/sessions/" + id + "/messages", {{"acts", {{{"id", 19}}}}});
  EXPECT_EQ(bad_status, 400);
  EXPECT_EQ(bad["error"]["code"], "InvalidAct");
  auto [early_status, early] = post("/sessions/" + id + "/action", {{"action", 0}});
  EXPECT_EQ(early_status, 409);

  for (int r = 1; r <= 4; ++r) {
    auto [ms, m] = post("/sessions/" + id + "/messages", {{"acts", nlohmann::json::array()}});
    ASSERT_EQ(ms, 200);
    EXPECT_EQ(m["state"]["phase"], "AwaitingAction");
    auto [as, a] = post("/sessions/" + id + "/action", {{"action", 0}});
    ASSERT_EQ(as, 200);
    EXPECT_EQ(a["round"], r);
  }
  auto [ss, state] = get("/sessions/" + id + "/state");
  EXPECT_EQ(state["phase"], "Finished");
  auto [ts, tj] = get("/sessions/" + id + "/transcript");
  ASSERT_EQ(ts, 200);
  auto t = tj.get<Transcript>();
  EXPECT_EQ(t.agent_b, "partner");
  EXPECT_EQ(t.records.size(), 4u);
  EXPECT_NO_THROW(cooperation_stats({t}));
  EXPECT_NO_THROW(analyze_fidelity(t));

  auto [ns, missing] = get("/sessions/00ff/state");
  EXPECT_EQ(ns, 404);
}

TEST_F(HttpFixture, BadCreateRequests) {
  EXPECT_EQ(post("/sessions", {{"game", "nope"}, {"agent", "spp"}}).first, 400);
  EXPECT_EQ(post("/sessions", {{"game", "chicken"}, {"agent", "nope"}}).first, 400);
  EXPECT_EQ(post("/sessions", {{"game", "chicken"}, {"agent", "spp"}, {"seat", "middle"}}).first, 400);
  auto res = client_->Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}
