#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>

#include "cooplab/analysis.hpp"
#include "cooplab/tournament.hpp"

using namespace cooplab;
namespace fs = std::filesystem;

namespace {
constexpr JointAction kCC{Action::First, Action::First};
constexpr JointAction kCD{Action::First, Action::Second};
constexpr JointAction kDD{Action::Second, Action::Second};

Transcript scripted(const Game& g, const std::vector<JointAction>& cells) {
  Transcript t;
  t.game = g;
  t.rounds = static_cast<int>(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    RoundRecord r;
    r.round = static_cast<int>(i) + 1;
    r.joint = cells[i];
    r.payoffs = g.payoffs(cells[i]);
    t.records.push_back(r);
  }
  return t;
}

PayoffTensor matrix_tensor(const std::vector<std::vector<double>>& a) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < a.size(); ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
  PayoffTensor t(names, 1, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) t.at(i, j, 0, 0) = a[i][j];
  }
  return t;
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> o(n);
  for (std::size_t i = 0; i < n; ++i) o[i] = i;
  return o;
}

const MetricReport& report(const std::vector<MetricReport>& r, const std::string& name) {
  for (const auto& m : r) {
    if (m.metric == name) return m;
  }
  throw std::runtime_error("no metric " + name);
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cooplab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}
}  // namespace

TEST(RoundRobin, TensorShape) {
  RoundRobinConfig cfg;
  cfg.roster = roster_from_names({"random", "bully", "gtft"});
  cfg.games = {games::prisoners_dilemma(), games::chicken()};
  cfg.rounds = 20;
  cfg.trials = 5;
  cfg.seed = 3;
  auto r = run_round_robin(cfg);
  EXPECT_EQ(r.tensor.shape(), (std::array<std::size_t, 4>{3, 3, 2, 5}));
  EXPECT_TRUE(r.tensor.complete());
  EXPECT_EQ(r.matches.size(), 3u * 3u * 2u * 5u);
}

TEST(RoundRobin, RandomVersusRandomExpectation) {
  MatchConfig cfg{games::pd_0135(), {"random", {}, 0, {}}, {"random", {}, 1, {}}, 10000, false, 17};
  auto t = run_match(cfg);
  EXPECT_NEAR(t.mean_payoff(Player::Row), 2.25, 0.05);
  EXPECT_NEAR(t.mean_payoff(Player::Col), 2.25, 0.05);
}

TEST(RoundRobin, RosterOrderDoesNotChangeEntries) {
  RoundRobinConfig cfg;
  cfg.games = {games::chicken()};
  cfg.rounds = 30;
  cfg.trials = 2;
  cfg.seed = 5;
  cfg.roster = roster_from_names({"wsls", "random", "spp"});
  auto a = run_round_robin(cfg).tensor;
  cfg.roster = roster_from_names({"spp", "wsls", "random"});
  auto b = run_round_robin(cfg).tensor;
  const std::size_t map[] = {1, 2, 0};  // position in b of a's agents
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t t = 0; t < 2; ++t) EXPECT_EQ(a.at(i, j, 0, t), b.at(map[i], map[j], 0, t));
    }
  }
}

TEST(RoundRobin, RejectsBadRosters) {
  RoundRobinConfig cfg;
  cfg.games = {games::chicken()};
  cfg.roster = roster_from_names({"random"});
  EXPECT_THROW(run_round_robin(cfg), Error);
  cfg.roster = roster_from_names({"random", "random"});
  EXPECT_THROW(run_round_robin(cfg), Error);
  EXPECT_THROW(roster_from_names({"cjal"}), Error);
}

TEST(RoundRobin, MissingMatchIsIncompleteTensor) {
  std::vector<MatchResult> m = {{0, 0, 0, 0, {1, 1}}, {0, 1, 0, 0, {1, 2}}, {1, 1, 0, 0, {3, 3}}};
  try {
    assemble_tensor({"a", "b"}, 1, 1, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompleteTensor);
  }
  m.push_back({1, 0, 0, 0, {4, 0}});
  auto t = assemble_tensor({"a", "b"}, 1, 1, m);
  EXPECT_DOUBLE_EQ(t.at(0, 1, 0, 0), 0.5 * (1 + 0));
  EXPECT_DOUBLE_EQ(t.at(1, 0, 0, 0), 0.5 * (4 + 2));
  PayoffTensor empty({"a", "b"}, 1, 1);
  EXPECT_THROW(compute_metrics(empty, identity_order(2)), Error);
}

TEST(Metrics, ToyMatrix) {
  auto t = matrix_tensor({{3, 2}, {0, 1}});
  auto r = compute_metrics(t, identity_order(2));
  ASSERT_EQ(r.size(), metric_names().size());
  const auto& rr = report(r, "round_robin_average");
  EXPECT_DOUBLE_EQ(rr.scores[0], 2.5);
  EXPECT_DOUBLE_EQ(rr.scores[1], 0.5);
  EXPECT_EQ(rr.ranks, (std::vector<int>{1, 2}));
  const auto& worst = report(r, "worst_case_score");
  EXPECT_DOUBLE_EQ(worst.scores[0], 2.0);
  EXPECT_DOUBLE_EQ(worst.scores[1], 0.0);
  EXPECT_DOUBLE_EQ(report(r, "group1_tourney").scores[0], 2.0);
  EXPECT_DOUBLE_EQ(report(r, "group1_tourney").scores[1], 0.0);
  EXPECT_EQ(report(r, "group2_tourney").scores, rr.scores);
  EXPECT_DOUBLE_EQ(report(r, "pct_best_score").scores[0], 100.0);
  EXPECT_DOUBLE_EQ(report(r, "pct_best_score").scores[1], 0.0);
  EXPECT_EQ(report(r, "replicator_dynamic").ranking[0], 0u);
}

TEST(Metrics, EqualPayoffsTieByOrder) {
  auto t = matrix_tensor({{2, 2, 2}, {2, 2, 2}, {2, 2, 2}});
  auto r = compute_metrics(t, {2, 0, 1});
  for (const auto& m : r) {
    EXPECT_EQ(m.ranking, (std::vector<std::size_t>{1, 2, 0})) << m.metric;
  }
  EXPECT_DOUBLE_EQ(report(r, "pct_best_score").scores[0], 100.0);
}

TEST(Metrics, PctBestWithinBounds) {
  RoundRobinConfig cfg;
  cfg.roster = roster_from_names({"random", "bully", "wsls", "fictitious_play"});
  cfg.games = stratified_sample(enumerate_periodic_table(), 4);
  cfg.rounds = 30;
  cfg.trials = 2;
  auto r = compute_metrics(run_round_robin(cfg).tensor);
  for (double v : report(r, "pct_best_score").scores) {
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 100);
  }
}

TEST(Replicator, DominantStrategyTakesOver) {
  auto tr = replicator_dynamics({{3, 3}, {1, 1}});
  EXPECT_GT(tr.shares.back()[0], 0.999);
  EXPECT_GT(tr.extinct_at[1], 0);
  EXPECT_EQ(tr.extinct_at[0], -1);
}

TEST(Replicator, UniformPayoffsKeepUniformShares) {
  auto tr = replicator_dynamics({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  for (double x : tr.shares.back()) EXPECT_NEAR(x, 1.0 / 3, 1e-12);
}

TEST(Replicator, SharesStayOnTheSimplex) {
  auto tr = replicator_dynamics({{3, 0, 5}, {5, 1, 0}, {0, 4, 2}}, 200);
  ASSERT_EQ(tr.shares.size(), 201u);
  for (const auto& x : tr.shares) {
    double s = 0;
    for (double v : x) {
      EXPECT_GE(v, 0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  EXPECT_THROW(replicator_dynamics({}), Error);
  EXPECT_THROW(replicator_dynamics({{1, 2}}), Error);
}

TEST(Cooperation, RoundsToMutualCooperation) {
  Game g = games::prisoners_dilemma();
  auto t = scripted(g, {kDD, kDD, kCC, kCC, kCC, kCC});
  auto s = cooperation_stats({t}, g);
  EXPECT_EQ(s.rounds_to_cc[0], 4);
  EXPECT_TRUE(s.reached[0]);
  EXPECT_TRUE(s.loyal[0]);
  EXPECT_EQ(*s.loyalty(), 1.0);
  EXPECT_DOUBLE_EQ(s.cdf(3), 0.0);
  EXPECT_DOUBLE_EQ(s.cdf(4), 1.0);
}

TEST(Cooperation, CensoredWhenNeverReached) {
  Game g = games::prisoners_dilemma();
  auto t = scripted(g, {kCC, kDD, kCC, kDD});
  auto s = cooperation_stats({t}, g);
  EXPECT_EQ(s.rounds_to_cc[0], 5);
  EXPECT_FALSE(s.reached[0]);
  EXPECT_FALSE(s.loyalty().has_value());
}

TEST(Cooperation, DefectionAfterReachingIsDisloyal) {
  Game g = games::prisoners_dilemma();
  auto t = scripted(g, {kCC, kCC, kCD, kCC});
  auto s = cooperation_stats({t}, g);
  EXPECT_TRUE(s.reached[0]);
  EXPECT_EQ(*s.loyalty(), 0.0);
  auto f = analyze_fidelity(t);
  EXPECT_TRUE(f.loyal[0]);
  EXPECT_FALSE(f.loyal[1]);
}

TEST(Fidelity, HonestyFromCommitments) {
  Game g = games::prisoners_dilemma();
  auto t = scripted(g, {kCC, kCC, kCC});
  t.talk = true;
  t.records[0].messages_a = {propose(JointPlan::stationary(kCC))};
  t.records[0].messages_b = {propose(JointPlan::stationary(kDD))};
  auto f = analyze_fidelity(t);
  EXPECT_DOUBLE_EQ(*f.honest[0], 1.0);
  EXPECT_DOUBLE_EQ(*f.honest[1], 0.0);
  EXPECT_EQ(f.committed_rounds[0], 3);
  auto silent = analyze_fidelity(scripted(g, {kCC, kCC}));
  EXPECT_FALSE(silent.honest[0].has_value());
}

TEST(Fidelity, LaterCommitmentTruncatesEarlier) {
  Game g = games::prisoners_dilemma();
  auto t = scripted(g, {kCC, kDD, kDD, kDD});
  t.records[0].messages_a = {propose(JointPlan::stationary(kCC))};
  t.records[1].messages_a = {propose(JointPlan::stationary(kDD))};
  auto c = commitments(t, Player::Row);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].end, 1u);
  EXPECT_EQ(c[1].end, 4u);
  EXPECT_DOUBLE_EQ(*analyze_fidelity(t).honest[0], 1.0);
}

TEST(Transcripts, CompactRoundTrip) {
  MatchConfig cfg{games::pd_0135(), {"ssharp", {}, 0, {}}, {"ssharp", {}, 0, {}}, 25, true, 4};
  auto t = run_match(cfg);
  auto back = expand_transcript(compact_transcript(t));
  EXPECT_EQ(back.records, t.records);
  EXPECT_EQ(back.game, t.game);
  nlohmann::json full = t;
  EXPECT_EQ(expand_transcript(full).records, t.records);
  auto bad = compact_transcript(t);
  bad["cells"] = "0129";
  EXPECT_THROW(expand_transcript(bad), Error);
}

TEST(Sampling, StratifiedSampleIsDeterministicAndDistinct) {
  auto pool = enumerate_periodic_table();
  auto a = stratified_sample(pool, 20);
  EXPECT_EQ(a.size(), 20u);
  EXPECT_EQ(a, stratified_sample(pool, 20));
  std::set<Game> unique(a.begin(), a.end());
  EXPECT_EQ(unique.size(), 20u);
  std::set<int> ne;
  for (const auto& g : a) ne.insert(pure_nash_count(g));
  EXPECT_GE(ne.size(), 3u);
}

TEST(Exports, ByteIdenticalAcrossRunsAndWorkerCounts) {
  TournamentSpec spec;
  spec.roster = roster_from_names({"random", "gtft", "spp", "exp3"});
  spec.games = stratified_sample(enumerate_periodic_table(), 3);
  spec.lengths = {20, 40};
  spec.trials = 2;
  spec.seed = 11;
  spec.workers = 1;
  auto d1 = temp_dir("a"), d2 = temp_dir("b");
  export_results(d1, spec, run_tournament(spec));
  spec.workers = 3;
  export_results(d2, spec, run_tournament(spec));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    ++files;
    EXPECT_EQ(read_file(e.path()), read_file(d2 / e.path().filename())) << e.path().filename();
  }
  EXPECT_EQ(files, 7u);

  auto rankings = read_file(d1 / "rankings_20.csv");
  EXPECT_EQ(std::count(rankings.begin(), rankings.end(), '\n'), 5);

  auto stored = analyze_directory(d1);
  ASSERT_EQ(stored.size(), 2u);
  auto runs = run_tournament(spec);
  EXPECT_EQ(tensor_csv(stored[0].tensor), tensor_csv(runs[0].result.tensor));
  fs::remove_all(d1);
  fs::remove_all(d2);
}
