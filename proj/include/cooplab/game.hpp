#pragma once

// 2x2 general-sum games, the periodic table of strict ordinal games, and the
// one-shot solution concepts the agents build on (pure Nash, maximin, Nash
// bargaining over realizable cyclic plans).

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cooplab/error.hpp"

namespace cooplab {

enum class Player : std::uint8_t { Row = 0, Col = 1 };

constexpr Player other(Player p) { return p == Player::Row ? Player::Col : Player::Row; }
constexpr int index(Player p) { return static_cast<int>(p); }

// Each player has exactly two actions.
enum class Action : std::uint8_t { First = 0, Second = 1 };

constexpr int index(Action a) { return static_cast<int>(a); }
constexpr Action flip(Action a) { return a == Action::First ? Action::Second : Action::First; }

inline Action action_from_int(int value) {
  if (value != 0 && value != 1) {
    throw Error(ErrorCode::InvalidAction, "action index must be 0 or 1, got " + std::to_string(value));
  }
  return static_cast<Action>(value);
}

struct JointAction {
  Action row = Action::First;
  Action col = Action::First;

  constexpr Action of(Player p) const { return p == Player::Row ? row : col; }
  // Cell index in row-major order: 0..3.
  constexpr int cell() const { return index(row) * 2 + index(col); }

  static constexpr JointAction from_cell(int cell) {
    return {static_cast<Action>(cell / 2), static_cast<Action>(cell % 2)};
  }
  static constexpr JointAction make(Player me, Action mine, Action theirs) {
    return me == Player::Row ? JointAction{mine, theirs} : JointAction{theirs, mine};
  }

  friend constexpr auto operator<=>(const JointAction&, const JointAction&) = default;
};

inline constexpr std::array<JointAction, 4> kAllCells = {
    JointAction::from_cell(0), JointAction::from_cell(1), JointAction::from_cell(2),
    JointAction::from_cell(3)};

using Matrix2 = std::array<std::array<double, 2>, 2>;
using PayoffPair = std::array<double, 2>;

// A 2x2 bimatrix game. Both matrices are indexed [row action][col action].
class Game {
 public:
  Game() = default;
  Game(Matrix2 row_payoffs, Matrix2 col_payoffs, std::string name = {})
      : row_(row_payoffs), col_(col_payoffs), name_(std::move(name)) {
    for (const auto& m : {row_, col_}) {
      for (const auto& r : m) {
        for (double v : r) {
          if (!std::isfinite(v)) throw Error(ErrorCode::InvalidGame, "payoffs must be finite");
        }
      }
    }
  }

  const Matrix2& row_payoffs() const { return row_; }
  const Matrix2& col_payoffs() const { return col_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  double payoff(Player p, JointAction ja) const {
    const Matrix2& m = p == Player::Row ? row_ : col_;
    return m[index(ja.row)][index(ja.col)];
  }
  PayoffPair payoffs(JointAction ja) const {
    return {payoff(Player::Row, ja), payoff(Player::Col, ja)};
  }
  // Payoff to `me` when it plays `mine` and the partner plays `theirs`.
  double own(Player me, Action mine, Action theirs) const {
    return payoff(me, JointAction::make(me, mine, theirs));
  }

  double min_payoff(Player p) const {
    double lo = std::numeric_limits<double>::infinity();
    for (auto ja : kAllCells) lo = std::min(lo, payoff(p, ja));
    return lo;
  }
  double max_payoff(Player p) const {
    double hi = -std::numeric_limits<double>::infinity();
    for (auto ja : kAllCells) hi = std::max(hi, payoff(p, ja));
    return hi;
  }

  // Each player's four payoffs form a permutation of {1,2,3,4}.
  bool is_strict_ordinal() const {
    for (const auto* m : {&row_, &col_}) {
      std::array<int, 4> seen{};
      for (const auto& r : *m) {
        for (double v : r) {
          if (v != std::floor(v) || v < 1 || v > 4) return false;
          if (seen[static_cast<int>(v) - 1]++) return false;
        }
      }
    }
    return true;
  }

  std::array<double, 8> flattened() const {
    return {row_[0][0], row_[0][1], row_[1][0], row_[1][1],
            col_[0][0], col_[0][1], col_[1][0], col_[1][1]};
  }

  // Stable identifier: the name when set, otherwise the payoff digits.
  std::string label() const {
    if (!name_.empty()) return name_;
    std::ostringstream os;
    os << "r";
    for (int i = 0; i < 8; ++i) {
      if (i == 4) os << "c";
      double v = flattened()[i];
      if (v == std::floor(v) && std::abs(v) < 1e9) {
        os << static_cast<long long>(v);
      } else {
        os << v;
      }
      if (i != 3 && i != 7) os << "_";
    }
    return os.str();
  }

  Game swapped_rows() const {
    return Game({row_[1], row_[0]}, {col_[1], col_[0]}, name_);
  }
  Game swapped_cols() const {
    auto swap_cols = [](const Matrix2& m) {
      return Matrix2{{{m[0][1], m[0][0]}, {m[1][1], m[1][0]}}};
    };
    return Game(swap_cols(row_), swap_cols(col_), name_);
  }
  // Exchange the players' roles: the old column player becomes the row player.
  Game transposed_players() const {
    auto t = [](const Matrix2& m) { return Matrix2{{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; };
    return Game(t(col_), t(row_), name_);
  }

  friend bool operator==(const Game& a, const Game& b) { return a.flattened() == b.flattened(); }
  friend bool operator<(const Game& a, const Game& b) { return a.flattened() < b.flattened(); }

 private:
  Matrix2 row_{};
  Matrix2 col_{};
  std::string name_;
};

// Symmetric game from the row player's view: payoffs for (C,C),(C,D),(D,C),(D,D),
// with action First playing the role of C.
inline Game symmetric_game(double cc, double cd, double dc, double dd, std::string name = {}) {
  Matrix2 row{{{cc, cd}, {dc, dd}}};
  Matrix2 col{{{cc, dc}, {cd, dd}}};
  return Game(row, col, std::move(name));
}

namespace games {
inline Game prisoners_dilemma() { return symmetric_game(3, 1, 4, 2, "prisoners_dilemma"); }
inline Game chicken() { return symmetric_game(3, 2, 4, 1, "chicken"); }
// The (0-1-3-5) prisoner's dilemma.
inline Game pd_0135() { return symmetric_game(3, 0, 5, 1, "pd_0135"); }
inline Game stag_hunt() { return symmetric_game(4, 1, 3, 2, "stag_hunt"); }
inline Game battle_of_sexes() {
  return Game({{{4, 2}, {1, 3}}}, {{{3, 2}, {1, 4}}}, "battle_of_sexes");
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"prisoners_dilemma", "chicken", "pd_0135", "stag_hunt",
                                             "battle_of_sexes"};
  return n;
}

inline Game by_name(const std::string& name) {
  if (name == "prisoners_dilemma") return prisoners_dilemma();
  if (name == "chicken") return chicken();
  if (name == "pd_0135") return pd_0135();
  if (name == "stag_hunt") return stag_hunt();
  if (name == "battle_of_sexes") return battle_of_sexes();
  throw Error(ErrorCode::InvalidGame, "unknown game '" + name + "'");
}
}  // namespace games

// A finite cyclic sequence of joint actions.
class JointPlan {
 public:
  JointPlan() : cycle_{JointAction{}} {}
  explicit JointPlan(std::vector<JointAction> cycle) : cycle_(std::move(cycle)) {
    if (cycle_.empty()) throw Error(ErrorCode::MalformedPayload, "joint plan cycle must be non-empty");
  }
  static JointPlan stationary(JointAction ja) { return JointPlan({ja}); }
  static JointPlan alternation(JointAction a, JointAction b) { return JointPlan({a, b}); }

  const std::vector<JointAction>& cycle() const { return cycle_; }
  std::size_t length() const { return cycle_.size(); }
  JointAction at(std::size_t position) const { return cycle_[position % cycle_.size()]; }

  double average(const Game& g, Player p) const {
    double sum = 0;
    for (auto ja : cycle_) sum += g.payoff(p, ja);
    return sum / static_cast<double>(cycle_.size());
  }
  PayoffPair averages(const Game& g) const {
    return {average(g, Player::Row), average(g, Player::Col)};
  }

  bool contains(JointAction ja) const {
    return std::find(cycle_.begin(), cycle_.end(), ja) != cycle_.end();
  }

  // Equal up to cyclic rotation.
  bool equivalent(const JointPlan& other) const {
    if (other.length() != length()) return false;
    for (std::size_t shift = 0; shift < length(); ++shift) {
      bool same = true;
      for (std::size_t i = 0; i < length() && same; ++i) same = cycle_[i] == other.at(i + shift);
      if (same) return true;
    }
    return false;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < cycle_.size(); ++i) {
      if (i) os << ",";
      os << "(" << index(cycle_[i].row) << "," << index(cycle_[i].col) << ")";
    }
    os << "]";
    return os.str();
  }

  friend bool operator==(const JointPlan& a, const JointPlan& b) { return a.cycle_ == b.cycle_; }

 private:
  std::vector<JointAction> cycle_;
};

// All realizable candidate plans: the four stationary cells followed by the
// six two-cell alternations.
inline std::vector<JointPlan> candidate_plans() {
  std::vector<JointPlan> plans;
  for (auto ja : kAllCells) plans.push_back(JointPlan::stationary(ja));
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      plans.push_back(JointPlan::alternation(kAllCells[a], kAllCells[b]));
    }
  }
  return plans;
}

// ---------------------------------------------------------------------------
// Periodic table

inline Game canonicalize_game(const Game& g) {
  if (!g.is_strict_ordinal()) {
    throw Error(ErrorCode::NotStrictOrdinal, "each player's payoffs must be a permutation of {1,2,3,4}");
  }
  std::array<Game, 4> orbit = {g, g.swapped_rows(), g.swapped_cols(), g.swapped_rows().swapped_cols()};
  Game best = *std::min_element(orbit.begin(), orbit.end());
  best.set_name({});
  return best;
}

// All 576 ordered strict ordinal games (players distinguished, actions labelled).
inline std::vector<Game> all_ordered_ordinal_games() {
  std::array<double, 4> perm = {1, 2, 3, 4};
  std::vector<std::array<double, 4>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<Game> out;
  out.reserve(perms.size() * perms.size());
  for (const auto& r : perms) {
    for (const auto& c : perms) {
      out.emplace_back(Matrix2{{{r[0], r[1]}, {r[2], r[3]}}}, Matrix2{{{c[0], c[1]}, {c[2], c[3]}}});
    }
  }
  return out;
}

// Canonical representatives of the strict ordinal 2x2 games under action
// relabeling, sorted by flattened payoffs.
inline std::vector<Game> enumerate_periodic_table() {
  std::set<Game> reps;
  for (const auto& g : all_ordered_ordinal_games()) reps.insert(canonicalize_game(g));
  return {reps.begin(), reps.end()};
}

// Number of classes left when games that differ only by which player is which
// are identified.
inline std::size_t count_up_to_player_swap(const std::vector<Game>& canonical) {
  std::set<Game> classes;
  for (const auto& g : canonical) classes.insert(std::min(g, canonicalize_game(g.transposed_players())));
  return classes.size();
}

// ---------------------------------------------------------------------------
// Solution concepts

inline bool is_best_response(const Game& g, Player p, JointAction ja) {
  Action mine = ja.of(p);
  Action theirs = ja.of(other(p));
  return g.own(p, mine, theirs) >= g.own(p, flip(mine), theirs);
}

inline std::vector<JointAction> pure_nash_equilibria(const Game& g) {
  std::vector<JointAction> out;
  for (auto ja : kAllCells) {
    if (is_best_response(g, Player::Row, ja) && is_best_response(g, Player::Col, ja)) out.push_back(ja);
  }
  return out;
}

// Myopic best reply of `p` to the partner's action; ties go to Action::First.
inline Action best_response(const Game& g, Player p, Action partner_action) {
  return g.own(p, Action::Second, partner_action) > g.own(p, Action::First, partner_action)
             ? Action::Second
             : Action::First;
}

struct MaximinResult {
  double value = 0;
  // Probability of Action::First and Action::Second.
  std::array<double, 2> strategy = {1, 0};

  bool is_pure() const { return strategy[0] == 1.0 || strategy[1] == 1.0; }
  Action likeliest_action() const { return strategy[1] > strategy[0] ? Action::Second : Action::First; }
};

// Worst-case expected payoff of `p` mixing First with probability q.
inline double guaranteed_payoff(const Game& g, Player p, double q) {
  double worst = std::numeric_limits<double>::infinity();
  for (Action theirs : {Action::First, Action::Second}) {
    double v = q * g.own(p, Action::First, theirs) + (1 - q) * g.own(p, Action::Second, theirs);
    worst = std::min(worst, v);
  }
  return worst;
}

// Exact maximin for a 2x2 game: the optimum is at a pure strategy or at the
// crossing of the two opponent-reply lines. Pure strategies win ties.
inline MaximinResult maximin(const Game& g, Player p) {
  const double a = g.own(p, Action::First, Action::First);
  const double b = g.own(p, Action::First, Action::Second);
  const double c = g.own(p, Action::Second, Action::First);
  const double d = g.own(p, Action::Second, Action::Second);

  std::vector<double> candidates = {1.0, 0.0};
  // q*a + (1-q)*c == q*b + (1-q)*d
  const double denom = (a - c) - (b - d);
  if (denom != 0) {
    double q = (d - c) / denom;
    if (q > 0 && q < 1) candidates.push_back(q);
  }
  MaximinResult best;
  best.value = -std::numeric_limits<double>::infinity();
  constexpr double kTol = 1e-12;
  for (double q : candidates) {
    double v = guaranteed_payoff(g, p, q);
    if (v > best.value + kTol) {
      best.value = v;
      best.strategy = {q, 1 - q};
    }
  }
  return best;
}

// The pure action with the best worst case; ties go to Action::First.
inline Action security_action(const Game& g, Player p) {
  return guaranteed_payoff(g, p, 0.0) > guaranteed_payoff(g, p, 1.0) ? Action::Second : Action::First;
}

// The pure action that minimizes the partner's best attainable payoff; ties go
// to the action with the better own worst case.
inline Action attack_action(const Game& g, Player p) {
  const Player q = other(p);
  auto partner_best = [&](Action mine) {
    return std::max(g.own(q, Action::First, mine), g.own(q, Action::Second, mine));
  };
  double f = partner_best(Action::First);
  double s = partner_best(Action::Second);
  if (f < s) return Action::First;
  if (s < f) return Action::Second;
  return security_action(g, p);
}

struct BargainingSolution {
  JointPlan plan;
  PayoffPair payoffs{};
  PayoffPair disagreement{};
  // Set when no realizable plan strictly improves on the disagreement point;
  // the plan then holds the pure maximin cell and payoffs equal the disagreement.
  bool maximin_fallback = false;
};

// Product of gains over the disagreement point, clipped at zero per player.
inline double nash_product(const PayoffPair& u, const PayoffPair& d) {
  return std::max(0.0, u[0] - d[0]) * std::max(0.0, u[1] - d[1]);
}

// Nash bargaining over realizable plans (stationary cells and two-cell
// alternations). Ties prefer shorter cycles, then the larger minimum payoff,
// then candidate order.
inline BargainingSolution nash_bargaining(const Game& g) {
  BargainingSolution out;
  out.disagreement = {maximin(g, Player::Row).value, maximin(g, Player::Col).value};
  const auto& d = out.disagreement;
  constexpr double kTol = 1e-12;

  std::optional<JointPlan> best;
  double best_product = 0;
  for (const auto& plan : candidate_plans()) {
    PayoffPair u = plan.averages(g);
    if (!(u[0] > d[0] + kTol && u[1] > d[1] + kTol)) continue;
    double prod = nash_product(u, d);
    bool better = false;
    if (!best || prod > best_product + kTol) {
      better = true;
    } else if (std::abs(prod - best_product) <= kTol) {
      if (plan.length() < best->length()) {
        better = true;
      } else if (plan.length() == best->length()) {
        PayoffPair bu = best->averages(g);
        better = std::min(u[0], u[1]) > std::min(bu[0], bu[1]) + kTol;
      }
    }
    if (better) {
      best = plan;
      best_product = prod;
    }
  }
  if (best) {
    out.plan = *best;
    out.payoffs = best->averages(g);
    return out;
  }
  out.plan = JointPlan::stationary({security_action(g, Player::Row), security_action(g, Player::Col)});
  out.payoffs = d;
  out.maximin_fallback = true;
  return out;
}

// The plan maximizing `p`'s average payoff subject to the partner receiving at
// least its maximin value. Falls back to the bargaining plan when no plan
// qualifies. Ties prefer shorter cycles, then the larger partner payoff.
inline JointPlan best_bully_plan(const Game& g, Player p) {
  const double partner_floor = maximin(g, other(p)).value;
  constexpr double kTol = 1e-12;
  std::optional<JointPlan> best;
  for (const auto& plan : candidate_plans()) {
    double partner = plan.average(g, other(p));
    if (partner < partner_floor - kTol) continue;
    if (!best) {
      best = plan;
      continue;
    }
    double mine = plan.average(g, p);
    double best_mine = best->average(g, p);
    if (mine > best_mine + kTol) {
      best = plan;
    } else if (std::abs(mine - best_mine) <= kTol) {
      if (plan.length() < best->length() ||
          (plan.length() == best->length() &&
           partner > best->average(g, other(p)) + kTol)) {
        best = plan;
      }
    }
  }
  return best ? *best : nash_bargaining(g).plan;
}

// The cell `p` can demand and have sustained by the partner's myopic best
// reply, maximizing `p`'s own payoff.
inline JointAction bully_cell(const Game& g, Player p) {
  std::optional<JointAction> best;
  for (Action mine : {Action::First, Action::Second}) {
    JointAction ja = JointAction::make(p, mine, best_response(g, other(p), mine));
    if (!best || g.payoff(p, ja) > g.payoff(p, *best)) best = ja;
  }
  return *best;
}

// ---------------------------------------------------------------------------
// JSON game documents: {"row_payoffs": [[..],[..]], "col_payoffs": [[..],[..]], "name": ..}

inline void to_json(nlohmann::json& j, const Game& g) {
  j = nlohmann::json{{"row_payoffs", g.row_payoffs()}, {"col_payoffs", g.col_payoffs()}};
  if (!g.name().empty()) j["name"] = g.name();
}

inline void from_json(const nlohmann::json& j, Game& g) {
  try {
    auto row = j.at("row_payoffs").get<Matrix2>();
    auto col = j.at("col_payoffs").get<Matrix2>();
    std::string name = j.value("name", std::string{});
    g = Game(row, col, name);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidGame, e.what());
  }
}

inline void to_json(nlohmann::json& j, const JointAction& ja) { j = {index(ja.row), index(ja.col)}; }

inline void from_json(const nlohmann::json& j, JointAction& ja) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw Error(ErrorCode::MalformedPayload, "joint action must be [row, col]");
  }
  int r = j[0].get<int>();
  int c = j[1].get<int>();
  if (r < 0 || r > 1 || c < 0 || c > 1) {
    throw Error(ErrorCode::MalformedPayload, "joint action references a nonexistent cell");
  }
  ja = {static_cast<Action>(r), static_cast<Action>(c)};
}

inline void to_json(nlohmann::json& j, const JointPlan& plan) { j = plan.cycle(); }

inline void from_json(const nlohmann::json& j, JointPlan& plan) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::MalformedPayload, "plan must be a non-empty array");
  plan = JointPlan(j.get<std::vector<JointAction>>());
}

// A single game object or an array of them.
inline std::vector<Game> games_from_json(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<Game>>();
  return {j.get<Game>()};
}

}  // namespace cooplab
