#include <gtest/gtest.h>

#include "cooplab/baselines.hpp"
#include "cooplab/meta.hpp"
#include "cooplab/transcript.hpp"

using namespace cooplab;

namespace {
constexpr JointAction kCC{Action::First, Action::First};

std::vector<JointAction> trace(const Game& g, const std::string& name, std::uint64_t seed, bool talk, int rounds) {
  BaselineSpec a{name, {}, seed, std::nullopt};
  BaselineSpec b{name, {}, seed + 1000, std::nullopt};
  auto pa = instantiate_baseline(a, g, Player::Row, talk);
  auto pb = instantiate_baseline(b, g, Player::Col, talk);
  return play_match(g, *pa, *pb, rounds, talk).actions();
}
}  // namespace

TEST(Aspiration, WorkedExample) {
  EXPECT_NEAR(update_aspiration(1.0, 0.95, 5, 3.0, 0, 10), 1.4524381250, 1e-9);
}

TEST(Aspiration, IsConvexCombinationAndClamped) {
  for (double a : {0.0, 1.5, 4.0}) {
    for (double r : {0.0, 2.0, 5.0}) {
      double n = update_aspiration(a, 0.99, 10, r, 0, 5);
      EXPECT_GE(n, std::min(a, r) - 1e-12);
      EXPECT_LE(n, std::max(a, r) + 1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(update_aspiration(1.0, 0.5, 1, 10.0, 0, 4), 4.0);
  AspirationState s{1.0, 0.95, 5, 12.0};
  auto n = update_aspiration(s, 3.0, 0, 10);
  EXPECT_NEAR(n.alpha, 1.4524381250, 1e-9);
  EXPECT_EQ(n.epoch_reward_sum, 0);
}

TEST(Aspiration, InitialValueIsOwnBargainingPayoff) {
  MetaConfig c;
  EXPECT_DOUBLE_EQ(initial_aspiration(games::prisoners_dilemma(), Player::Row, c), 3.0);
  c.start = AspirationStart::MaxPayoff;
  EXPECT_DOUBLE_EQ(initial_aspiration(games::prisoners_dilemma(), Player::Row, c), 4.0);
  c.alpha0 = 99;
  EXPECT_DOUBLE_EQ(initial_aspiration(games::prisoners_dilemma(), Player::Row, c), 4.0);
}

TEST(Pruning, KeepsExpertsAtOrAboveAspiration) {
  std::vector<double> pot = {1.0, 3.0, 2.5, 3.0};
  EXPECT_EQ(prune_by_aspiration(pot, 2.5), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(prune_by_aspiration(pot, 2.6, std::nullopt, 0.1), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Pruning, FallsBackToArgmaxPreferringCurrent) {
  std::vector<double> pot = {1.0, 3.0, 2.5, 3.0};
  EXPECT_EQ(prune_by_aspiration(pot, 4.0), (std::vector<std::size_t>{1}));
  EXPECT_EQ(prune_by_aspiration(pot, 4.0, 3), (std::vector<std::size_t>{3}));
  EXPECT_EQ(prune_by_aspiration(pot, 4.0, 2), (std::vector<std::size_t>{1}));
  EXPECT_TRUE(prune_by_aspiration(std::vector<double>{}, 1.0).empty());
}

TEST(Pruning, IntersectionFallsBackToAspiringSet) {
  EXPECT_EQ(intersect_or_fallback({0, 2, 4}, {2, 3}), (std::vector<std::size_t>{2}));
  EXPECT_EQ(intersect_or_fallback({0, 4}, {2, 3}), (std::vector<std::size_t>{0, 4}));
}

TEST(Pruning, CongruenceWithProposal) {
  ExpertSet set(games::prisoners_dilemma(), Player::Row);
  auto all = prune_by_congruence(set, std::nullopt);
  EXPECT_EQ(all.size(), set.size());
  auto cc = prune_by_congruence(set, JointPlan::stationary(kCC));
  EXPECT_NE(std::find(cc.begin(), cc.end(), 0u), cc.end());
  for (auto i : cc) EXPECT_NE(set[i].kind(), ExpertKind::Maximin);
}

TEST(Selection, KeepsSatisfiedCurrentExpert) {
  Rng rng(3);
  std::vector<std::size_t> cand = {0, 2, 5};
  EXPECT_EQ(select_expert(cand, 2, 3.0, 2.9, rng), 2u);
  EXPECT_EQ(select_expert(std::vector<std::size_t>{4}, 2, 0.0, 2.9, rng), 4u);
  EXPECT_THROW(select_expert(std::vector<std::size_t>{}, std::nullopt, 0, 0, rng), Error);
}

TEST(Selection, UnsatisfiedDrawIsUniform) {
  Rng rng(11);
  std::vector<std::size_t> cand = {0, 2, 5};
  std::map<std::size_t, int> counts;
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[select_expert(cand, 2, 1.0, 2.9, rng)];
  for (auto c : cand) EXPECT_NEAR(counts[c] / double(n), 1.0 / 3, 0.015);
}

TEST(MetaAgent, RejectsBadConfig) {
  MetaConfig c;
  c.m = 0;
  EXPECT_THROW(MetaAgent(games::chicken(), Player::Row, c), Error);
  c.m = 10;
  c.lambda = 1.0;
  EXPECT_THROW(MetaAgent(games::chicken(), Player::Row, c), Error);
}

TEST(MetaAgent, ProtocolViolations) {
  MetaAgent a(games::chicken(), Player::Row, MetaConfig{});
  try {
    a.act(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProtocolViolation);
  }
  MetaAgent b(games::chicken(), Player::Row, MetaConfig{});
  Action x = b.act(1);
  EXPECT_THROW(b.observe({2, {x, Action::First}, {}}), Error);
}

TEST(MetaAgent, SilentWithoutTalk) {
  MetaConfig c;
  c.variant = MetaVariant::SSharp;
  MetaAgent a(games::prisoners_dilemma(), Player::Row, c);
  EXPECT_TRUE(a.speak(1).empty());
  c.talk = true;
  MetaAgent b(games::prisoners_dilemma(), Player::Row, c);
  auto msgs = b.speak(1);
  EXPECT_FALSE(msgs.empty());
  EXPECT_LE(msgs.size(), kMaxActsPerRound);
}

TEST(MetaAgent, SelectionHappensAtEpochBoundaries) {
  auto pa = instantiate_baseline({"spp", {}, 5, std::nullopt}, games::chicken(), Player::Row);
  auto pb = instantiate_baseline({"random", {}, 6, std::nullopt}, games::chicken(), Player::Col);
  play_match(games::chicken(), *pa, *pb, 200, false);
  auto& meta = dynamic_cast<MetaAgent&>(*pa);
  for (const auto& s : meta.selections()) EXPECT_EQ((s.round - 1) % meta.config().m, 0) << s.round;
}

TEST(MetaAgent, TalkOffMatchesSppOnSampleGames) {
  auto table = enumerate_periodic_table();
  for (std::size_t gi = 0; gi < table.size(); gi += 29) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      EXPECT_EQ(trace(table[gi], "ssharp", seed, false, 200), trace(table[gi], "spp", seed, false, 200))
          << table[gi].label();
    }
  }
}

TEST(MetaAgent, DeterministicUnderSeed) {
  auto g = games::pd_0135();
  EXPECT_EQ(trace(g, "ssharp", 9, true, 100), trace(g, "ssharp", 9, true, 100));
}

TEST(MetaAgent, SelfPlayCooperatesInPrisonersDilemma) {
  auto pa = instantiate_baseline({"spp", {}, 1, std::nullopt}, games::pd_0135(), Player::Row);
  auto pb = instantiate_baseline({"spp", {}, 2, std::nullopt}, games::pd_0135(), Player::Col);
  auto t = play_match(games::pd_0135(), *pa, *pb, 1000, false);
  EXPECT_GE(t.mean_payoff(Player::Row, 201), 2.0);
}
