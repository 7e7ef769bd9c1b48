#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <limits>

#include "cooplab/game.hpp"

using namespace cooplab;

namespace {

constexpr JointAction kCC{Action::First, Action::First};
constexpr JointAction kCD{Action::First, Action::Second};
constexpr JointAction kDC{Action::Second, Action::First};
constexpr JointAction kDD{Action::Second, Action::Second};

// Worst case of every mixed strategy on a 1e-3 grid.
double grid_maximin(const Game& g, Player p) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 1000; ++k) best = std::max(best, guaranteed_payoff(g, p, k / 1000.0));
  return best;
}

// Nash products of the four cells and of the midpoints of every pair of cells.
std::vector<double> hull_probe_products(const Game& g, const PayoffPair& d) {
  std::vector<double> out;
  for (auto a : kAllCells) {
    out.push_back(nash_product(g.payoffs(a), d));
    for (auto b : kAllCells) {
      PayoffPair pa = g.payoffs(a), pb = g.payoffs(b);
      out.push_back(nash_product({(pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2}, d));
    }
  }
  return out;
}

}  // namespace

TEST(PeriodicTable, HasOneHundredFortyFourGames) {
  auto start = std::chrono::steady_clock::now();
  auto table = enumerate_periodic_table();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(table.size(), 144u);
  EXPECT_EQ(count_up_to_player_swap(table), 78u);
  EXPECT_LT(secs, 1.0);
}

TEST(PeriodicTable, RepresentativesAreCanonicalAndDistinct) {
  auto table = enumerate_periodic_table();
  std::set<Game> seen(table.begin(), table.end());
  EXPECT_EQ(seen.size(), table.size());
  for (const auto& g : table) {
    EXPECT_TRUE(g.is_strict_ordinal());
    EXPECT_EQ(canonicalize_game(g), g);
    EXPECT_EQ(canonicalize_game(g.swapped_rows()), g);
    EXPECT_EQ(canonicalize_game(g.swapped_cols()), g);
    EXPECT_EQ(canonicalize_game(g.swapped_rows().swapped_cols()), g);
  }
}

TEST(PeriodicTable, EveryOrderedGameMapsIntoTheTable) {
  auto table = enumerate_periodic_table();
  std::set<Game> reps(table.begin(), table.end());
  auto all = all_ordered_ordinal_games();
  EXPECT_EQ(all.size(), 576u);
  for (const auto& g : all) EXPECT_TRUE(reps.count(canonicalize_game(g)));
}

TEST(Game, RejectsNonOrdinalForCanonicalization) {
  Game g({{{1, 1}, {2, 3}}}, {{{1, 2}, {3, 4}}});
  try {
    canonicalize_game(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotStrictOrdinal);
  }
}

TEST(Game, RejectsNonFinitePayoffs) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Game({{{nan, 1}, {2, 3}}}, {{{1, 2}, {3, 4}}}), Error);
}

TEST(Game, PayoffAccessorsAgreeAcrossSeats) {
  Game g = games::battle_of_sexes();
  for (auto ja : kAllCells) {
    for (Player p : {Player::Row, Player::Col}) {
      EXPECT_EQ(g.own(p, ja.of(p), ja.of(other(p))), g.payoff(p, ja));
    }
  }
  Game t = g.transposed_players();
  for (auto ja : kAllCells) {
    JointAction swapped{ja.col, ja.row};
    EXPECT_EQ(t.payoff(Player::Row, swapped), g.payoff(Player::Col, ja));
  }
}

TEST(Game, JsonRoundTrip) {
  Game g = games::chicken();
  nlohmann::json j = g;
  Game back = j.get<Game>();
  EXPECT_EQ(back, g);
  EXPECT_EQ(back.name(), "chicken");
  EXPECT_THROW(nlohmann::json({{"row_payoffs", 3}}).get<Game>(), Error);
}

TEST(Game, JointActionJsonRejectsBadCells) {
  EXPECT_THROW(nlohmann::json::parse("[0,2]").get<JointAction>(), Error);
  EXPECT_EQ(nlohmann::json::parse("[1,0]").get<JointAction>(), kDC);
}

TEST(Solvers, PureNashOfPrisonersDilemma) {
  auto ne = pure_nash_equilibria(games::prisoners_dilemma());
  ASSERT_EQ(ne.size(), 1u);
  EXPECT_EQ(ne[0], kDD);
  EXPECT_EQ(pure_nash_equilibria(games::chicken()).size(), 2u);
}

TEST(Solvers, MaximinKnownValues) {
  EXPECT_DOUBLE_EQ(maximin(games::prisoners_dilemma(), Player::Row).value, 2.0);
  EXPECT_EQ(security_action(games::prisoners_dilemma(), Player::Row), Action::Second);
  EXPECT_DOUBLE_EQ(maximin(games::chicken(), Player::Row).value, 2.0);
  EXPECT_EQ(security_action(games::chicken(), Player::Row), Action::First);
  auto bos = maximin(games::battle_of_sexes(), Player::Row);
  EXPECT_NEAR(bos.value, 2.5, 1e-12);
  EXPECT_FALSE(bos.is_pure());
}

TEST(Solvers, MaximinMatchesGridOracleOnWholeTable) {
  auto start = std::chrono::steady_clock::now();
  for (const auto& g : enumerate_periodic_table()) {
    for (Player p : {Player::Row, Player::Col}) {
      auto m = maximin(g, p);
      EXPECT_NEAR(m.value, grid_maximin(g, p), 2e-3) << g.label();
      EXPECT_NEAR(m.strategy[0] + m.strategy[1], 1.0, 1e-12);
      EXPECT_GE(m.value + 1e-12, grid_maximin(g, p));
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 10.0);
}

TEST(Solvers, BargainingBeatsEveryHullProbe) {
  for (const auto& g : enumerate_periodic_table()) {
    auto nbs = nash_bargaining(g);
    double prod = nash_product(nbs.payoffs, nbs.disagreement);
    for (double probe : hull_probe_products(g, nbs.disagreement)) EXPECT_GE(prod + 1e-12, probe) << g.label();
    EXPECT_GE(nbs.payoffs[0] + 1e-12, nbs.disagreement[0]);
    EXPECT_GE(nbs.payoffs[1] + 1e-12, nbs.disagreement[1]);
    EXPECT_LE(nbs.plan.length(), 2u);
  }
}

TEST(Solvers, BargainingKnownGames) {
  auto pd = nash_bargaining(games::prisoners_dilemma());
  EXPECT_EQ(pd.plan, JointPlan::stationary(kCC));
  EXPECT_EQ(pd.payoffs, (PayoffPair{3, 3}));

  // Alternating (C,D)/(D,C) also averages 3 each; the shorter cycle wins.
  auto ch = nash_bargaining(games::chicken());
  EXPECT_EQ(ch.plan, JointPlan::stationary(kCC));

  auto bos = nash_bargaining(games::battle_of_sexes());
  EXPECT_EQ(bos.plan.length(), 2u);
  EXPECT_NEAR(bos.payoffs[0], 3.5, 1e-12);
  EXPECT_NEAR(bos.payoffs[1], 3.5, 1e-12);
  EXPECT_NEAR(bos.disagreement[0], 2.5, 1e-12);
}

TEST(Solvers, BargainingFallsBackToMaximinWhenNothingImproves) {
  // Row's maximin already equals its best payoff in every cell the column
  // player accepts, so no plan strictly improves both.
  Game g({{{4, 4}, {1, 1}}}, {{{1, 1}, {1, 1}}});
  auto nbs = nash_bargaining(g);
  EXPECT_TRUE(nbs.maximin_fallback);
  EXPECT_EQ(nbs.payoffs, nbs.disagreement);
}

TEST(Solvers, BullyCellInChicken) {
  EXPECT_EQ(bully_cell(games::chicken(), Player::Row), kDC);
  EXPECT_EQ(bully_cell(games::chicken(), Player::Col), kCD);
  EXPECT_EQ(bully_cell(games::prisoners_dilemma(), Player::Row), kDD);
}

TEST(Solvers, BullyPlanRespectsPartnerMaximin) {
  for (const auto& g : enumerate_periodic_table()) {
    for (Player p : {Player::Row, Player::Col}) {
      auto plan = best_bully_plan(g, p);
      EXPECT_GE(plan.average(g, other(p)) + 1e-12, maximin(g, other(p)).value) << g.label();
      EXPECT_GE(plan.average(g, p) + 1e-12, nash_bargaining(g).payoffs[index(p)]) << g.label();
    }
  }
}

TEST(Solvers, AttackActionMinimizesPartnerBest) {
  Game g = games::chicken();
  // Playing D leaves the partner at most 2; playing C lets it get 4.
  EXPECT_EQ(attack_action(g, Player::Row), Action::Second);
}

TEST(Plans, EquivalenceIsRotation) {
  auto a = JointPlan::alternation(kCD, kDC);
  auto b = JointPlan::alternation(kDC, kCD);
  EXPECT_TRUE(a.equivalent(b));
  EXPECT_FALSE(a == b);
  EXPECT_FALSE(a.equivalent(JointPlan::stationary(kCD)));
  EXPECT_EQ(a.at(3), kDC);
  EXPECT_EQ(candidate_plans().size(), 10u);
}

TEST(Plans, JsonRoundTrip) {
  auto a = JointPlan::alternation(kCD, kDC);
  nlohmann::json j = a;
  EXPECT_EQ(j.get<JointPlan>(), a);
  EXPECT_THROW(nlohmann::json::array().get<JointPlan>(), Error);
}
