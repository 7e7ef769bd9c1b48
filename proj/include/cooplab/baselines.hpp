#pragma once

// Comparison agents for tournaments, plus the registry that names them.
//
// Strategies written for the prisoner's dilemma are carried over to any 2x2
// game by reading "cooperate" as the player's own action in the first cell of
// the game's bargaining plan and "defect" as the other action.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cooplab/agent.hpp"
#include "cooplab/error.hpp"
#include "cooplab/experts.hpp"
#include "cooplab/game.hpp"
#include "cooplab/mbrl.hpp"
#include "cooplab/meta.hpp"
#include "cooplab/rng.hpp"

namespace cooplab {

using ParamMap = std::map<std::string, double>;

struct BaselineSpec {
  std::string name;
  ParamMap params;  // overrides; missing entries take registry defaults
  std::uint64_t seed = 0;
  // Conditional-probability table for mem1/mem2; the built-in table when unset.
  std::optional<nlohmann::json> table;
};

struct BaselineInfo {
  std::string name;
  std::string description;
  ParamMap defaults;
};

// ---------------------------------------------------------------------------
// Memory-one and memory-two tables

// Outcome keys are two letters, own action first: "cc", "cd", "dc", "dd".
inline std::string outcome_key(bool i_cooperated, bool partner_cooperated) {
  return std::string(1, i_cooperated ? 'c' : 'd') + (partner_cooperated ? 'c' : 'd');
}

inline const std::array<std::string, 4>& outcome_keys() {
  static const std::array<std::string, 4> keys = {"cc", "cd", "dc", "dd"};
  return keys;
}

inline nlohmann::json default_mem1_table() {
  return {{"initial", 0.9}, {"cc", 0.95}, {"cd", 0.25}, {"dc", 0.6}, {"dd", 0.4}};
}

// History keys are "older,newer". "first" conditions round 2 on round 1 alone.
inline nlohmann::json default_mem2_table() {
  nlohmann::json history = nlohmann::json::object();
  for (const auto& older : outcome_keys()) {
    for (const auto& newer : outcome_keys()) {
      double p;
      if (newer == "cc") p = 0.95;
      else if (newer[1] == 'c') p = 0.8;
      else if (older[1] == 'd') p = 0.05;
      else p = 0.3;
      history[older + "," + newer] = p;
    }
  }
  return {{"initial", 0.9}, {"first", default_mem1_table()}, {"history", history}};
}

namespace detail {

inline double table_probability(const nlohmann::json& t, const std::string& key) {
  if (!t.contains(key) || !t.at(key).is_number()) {
    throw Error(ErrorCode::MalformedPayload, "memory table lacks entry '" + key + "'");
  }
  double p = t.at(key).get<double>();
  if (!(p >= 0 && p <= 1)) throw Error(ErrorCode::MalformedPayload, "memory table entry '" + key + "' is not in [0,1]");
  return p;
}

}  // namespace detail

struct Mem1Table {
  double initial = 1;
  std::array<double, 4> after{};  // indexed like outcome_keys()

  static Mem1Table from_json(const nlohmann::json& t) {
    Mem1Table m;
    m.initial = detail::table_probability(t, "initial");
    for (std::size_t i = 0; i < 4; ++i) m.after[i] = detail::table_probability(t, outcome_keys()[i]);
    return m;
  }
};

struct Mem2Table {
  Mem1Table first;
  std::array<double, 16> after{};  // older * 4 + newer

  static Mem2Table from_json(const nlohmann::json& t) {
    Mem2Table m;
    if (!t.contains("first") || !t.contains("history")) {
      throw Error(ErrorCode::MalformedPayload, "memory-two table needs 'first' and 'history'");
    }
    m.first = Mem1Table::from_json(t.at("first"));
    m.first.initial = detail::table_probability(t, "initial");
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        m.after[i * 4 + j] = detail::table_probability(t.at("history"), outcome_keys()[i] + "," + outcome_keys()[j]);
      }
    }
    return m;
  }
};

inline nlohmann::json load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedPayload, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Agents

class BaselineAgent : public Agent {
 public:
  BaselineAgent(const Game& g, Player me, std::uint64_t seed)
      : Agent(me), game_(g), rng_(seed), coop_(), partner_coop_() {
    const auto cell = nash_bargaining(g).plan.at(0);
    coop_ = cell.of(me);
    partner_coop_ = cell.of(other(me));
  }

  Action cooperate() const { return coop_; }
  Action defect() const { return flip(coop_); }

 protected:
  static Action flip(Action a) { return a == Action::First ? Action::Second : Action::First; }
  bool partner_cooperated(const Outcome& o) const { return theirs(o) == partner_coop_; }
  bool i_cooperated(const Outcome& o) const { return mine(o) == coop_; }
  std::size_t outcome_index(const Outcome& o) const {
    return (i_cooperated(o) ? 0 : 2) + (partner_cooperated(o) ? 0 : 1);
  }
  Action cooperate_with(double p) { return rng_.bernoulli(p) ? coop_ : defect(); }

  Game game_;
  Rng rng_;
  Action coop_;
  Action partner_coop_;
};

class RandomAgent : public BaselineAgent {
 public:
  using BaselineAgent::BaselineAgent;
  Action act(int) override { return rng_.below(2) == 0 ? Action::First : Action::Second; }
  void observe(const Outcome&) override {}
};

class BullyAgent : public BaselineAgent {
 public:
  BullyAgent(const Game& g, Player me, std::uint64_t seed)
      : BaselineAgent(g, me, seed), demand_(bully_cell(g, me).of(me)) {}
  Action act(int) override { return demand_; }
  void observe(const Outcome&) override {}

 private:
  Action demand_;
};

// Bully until the average payoff over the last `window` rounds falls below the
// maximin value, then maximin for the rest of the game.
class ManipulatorAgent : public BaselineAgent {
 public:
  ManipulatorAgent(const Game& g, Player me, std::uint64_t seed, int window)
      : BaselineAgent(g, me, seed),
        demand_(bully_cell(g, me).of(me)),
        security_(maximin(g, me)),
        window_(std::max(window, 1)) {}

  bool fallen_back() const { return fallback_; }

  Action act(int) override {
    if (!fallback_) return demand_;
    if (security_.is_pure()) return security_.likeliest_action();
    return rng_.uniform() < security_.strategy[0] ? Action::First : Action::Second;
  }

  void observe(const Outcome& o) override {
    recent_.push_back(my_payoff(o));
    if (static_cast<int>(recent_.size()) > window_) recent_.erase(recent_.begin());
    if (fallback_ || static_cast<int>(recent_.size()) < window_) return;
    double avg = 0;
    for (double r : recent_) avg += r;
    avg /= window_;
    if (avg < security_.value - kAspirationTolerance) fallback_ = true;
  }

 private:
  Action demand_;
  MaximinResult security_;
  int window_;
  bool fallback_ = false;
  std::vector<double> recent_;
};

// Generous tit-for-tat: after a partner defection, punish with the security
// action unless forgiving with probability `forgiveness`.
class GtftAgent : public BaselineAgent {
 public:
  GtftAgent(const Game& g, Player me, std::uint64_t seed, double forgiveness)
      : BaselineAgent(g, me, seed), forgiveness_(forgiveness), punish_(security_action(g, me)) {}

  Action act(int) override {
    if (!partner_defected_) return coop_;
    return rng_.bernoulli(forgiveness_) ? coop_ : punish_;
  }
  void observe(const Outcome& o) override { partner_defected_ = !partner_cooperated(o); }

 private:
  double forgiveness_;
  Action punish_;
  bool partner_defected_ = false;
};

// Win-stay lose-shift with the threshold at `fraction` of the own payoff range.
class WslsAgent : public BaselineAgent {
 public:
  WslsAgent(const Game& g, Player me, std::uint64_t seed, double fraction)
      : BaselineAgent(g, me, seed),
        threshold_(g.min_payoff(me) + fraction * (g.max_payoff(me) - g.min_payoff(me))),
        next_(coop_) {}

  double threshold() const { return threshold_; }
  Action act(int) override { return next_; }
  void observe(const Outcome& o) override { next_ = my_payoff(o) >= threshold_ ? mine(o) : flip(mine(o)); }

 private:
  double threshold_;
  Action next_;
};

class Mem1Agent : public BaselineAgent {
 public:
  Mem1Agent(const Game& g, Player me, std::uint64_t seed, Mem1Table table)
      : BaselineAgent(g, me, seed), table_(table) {}

  double cooperation_probability() const { return last_ ? table_.after[*last_] : table_.initial; }
  Action act(int) override { return cooperate_with(cooperation_probability()); }
  void observe(const Outcome& o) override { last_ = outcome_index(o); }

 private:
  Mem1Table table_;
  std::optional<std::size_t> last_;
};

class Mem2Agent : public BaselineAgent {
 public:
  Mem2Agent(const Game& g, Player me, std::uint64_t seed, Mem2Table table)
      : BaselineAgent(g, me, seed), table_(table) {}

  double cooperation_probability() const {
    if (!newer_) return table_.first.initial;
    if (!older_) return table_.first.after[*newer_];
    return table_.after[*older_ * 4 + *newer_];
  }
  Action act(int) override { return cooperate_with(cooperation_probability()); }
  void observe(const Outcome& o) override {
    older_ = newer_;
    newer_ = outcome_index(o);
  }

 private:
  Mem2Table table_;
  std::optional<std::size_t> older_;
  std::optional<std::size_t> newer_;
};

// Best response to the empirical frequency of the partner's actions.
class FictitiousPlayAgent : public BaselineAgent {
 public:
  using BaselineAgent::BaselineAgent;

  // Probability the partner plays Action::First.
  double belief() const { return seen_ == 0 ? 0.5 : static_cast<double>(first_) / static_cast<double>(seen_); }

  double expected(Action a) const {
    double p = belief();
    return p * game_.own(role(), a, Action::First) + (1 - p) * game_.own(role(), a, Action::Second);
  }

  Action act(int) override { return expected(Action::Second) > expected(Action::First) ? Action::Second : Action::First; }
  void observe(const Outcome& o) override {
    ++seen_;
    if (theirs(o) == Action::First) ++first_;
  }

 private:
  long first_ = 0;
  long seen_ = 0;
};

// Logit response to the empirical belief; the temperature is a fraction of the
// own payoff range.
class StochasticFpAgent : public FictitiousPlayAgent {
 public:
  StochasticFpAgent(const Game& g, Player me, std::uint64_t seed, double temperature)
      : FictitiousPlayAgent(g, me, seed),
        tau_(std::max(temperature * (g.max_payoff(me) - g.min_payoff(me)), 1e-9)) {}

  double probability_first() const {
    double d = (expected(Action::Second) - expected(Action::First)) / tau_;
    return 1.0 / (1.0 + std::exp(std::clamp(d, -700.0, 700.0)));
  }
  Action act(int) override { return rng_.uniform() < probability_first() ? Action::First : Action::Second; }

 private:
  double tau_;
};

// Tabular Q-learning over the last joint action (plus a start state).
class QLearningAgent : public BaselineAgent {
 public:
  QLearningAgent(const Game& g, Player me, std::uint64_t seed, double alpha, double gamma, double epsilon)
      : BaselineAgent(g, me, seed), alpha_(alpha), gamma_(gamma), epsilon_(epsilon) {}

  double q(int state, Action a) const { return q_[static_cast<std::size_t>(state)][index(a)]; }

  Action act(int) override {
    if (rng_.uniform() < epsilon_) return rng_.below(2) == 0 ? Action::First : Action::Second;
    return q(state_, Action::Second) > q(state_, Action::First) ? Action::Second : Action::First;
  }

  void observe(const Outcome& o) override {
    int next = o.joint.cell();
    double best = std::max(q(next, Action::First), q(next, Action::Second));
    double& cur = q_[static_cast<std::size_t>(state_)][index(mine(o))];
    cur += alpha_ * (my_payoff(o) + gamma_ * best - cur);
    state_ = next;
  }

 private:
  static constexpr int kStart = 4;
  double alpha_, gamma_, epsilon_;
  std::array<std::array<double, 2>, 5> q_{};
  int state_ = kStart;
};

class MbrlAgent : public BaselineAgent {
 public:
  MbrlAgent(const Game& g, Player me, std::uint64_t seed, MbrlParams params)
      : BaselineAgent(g, me, seed), learner_(g, me, params) {}

  Action act(int) override { return learner_.choose(rng_); }
  void observe(const Outcome& o) override { learner_.observe(o.joint); }

 private:
  MbrlLearner learner_;
};

// Plays one expert from the S++ roster per epoch of `epoch` rounds and credits
// it with the epoch's mean payoff. Subclasses choose the expert.
class ExpertBanditAgent : public BaselineAgent {
 public:
  ExpertBanditAgent(const Game& g, Player me, std::uint64_t seed, RosterKind roster, int epoch)
      : BaselineAgent(g, me, seed), experts_(g, me, roster), epoch_(std::max(epoch, 1)) {}

  Action act(int) override {
    if (!current_ || len_ == 0) {
      std::size_t next = choose();
      if (!current_ || next != *current_) experts_[next].activate();
      current_ = next;
    }
    return experts_.action(*current_, rng_);
  }

  void observe(const Outcome& o) override {
    experts_.observe(*current_, o.joint);
    sum_ += my_payoff(o);
    if (++len_ == epoch_) {
      credit(*current_, sum_ / len_);
      sum_ = 0;
      len_ = 0;
    }
  }

 protected:
  virtual std::size_t choose() = 0;
  virtual void credit(std::size_t expert, double reward) = 0;

  ExpertSet experts_;
  int epoch_;
  std::optional<std::size_t> current_;
  double sum_ = 0;
  int len_ = 0;
};

// Explore-exploit over experts: in epoch k explore uniformly with probability
// 1/sqrt(k), otherwise exploit the best mean so far (untried experts first).
class EeeAgent : public ExpertBanditAgent {
 public:
  EeeAgent(const Game& g, Player me, std::uint64_t seed, RosterKind roster, int epoch)
      : ExpertBanditAgent(g, me, seed, roster, epoch), mean_(experts_.size(), 0.0), n_(experts_.size(), 0) {}

 protected:
  std::size_t choose() override {
    ++k_;
    if (rng_.uniform() < 1.0 / std::sqrt(static_cast<double>(k_))) return rng_.below(experts_.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < n_.size(); ++i) {
      if (n_[i] == 0) return i;
      if (mean_[i] > mean_[best]) best = i;
    }
    return best;
  }

  void credit(std::size_t i, double reward) override {
    ++n_[i];
    mean_[i] += (reward - mean_[i]) / static_cast<double>(n_[i]);
  }

 private:
  std::vector<double> mean_;
  std::vector<long> n_;
  long k_ = 0;
};

// Exp3 over experts with epoch rewards rescaled to [0,1].
class Exp3Agent : public ExpertBanditAgent {
 public:
  Exp3Agent(const Game& g, Player me, std::uint64_t seed, RosterKind roster, int epoch, double gamma)
      : ExpertBanditAgent(g, me, seed, roster, epoch),
        gamma_(std::clamp(gamma, 1e-9, 1.0)),
        lo_(g.min_payoff(me)),
        hi_(g.max_payoff(me)),
        w_(experts_.size(), 1.0) {}

  const std::vector<double>& weights() const { return w_; }

  std::vector<double> probabilities() const {
    double total = 0;
    for (double w : w_) total += w;
    const double k = static_cast<double>(w_.size());
    std::vector<double> p;
    for (double w : w_) p.push_back((1 - gamma_) * w / total + gamma_ / k);
    return p;
  }

 protected:
  std::size_t choose() override {
    auto p = probabilities();
    double u = rng_.uniform();
    for (std::size_t i = 0; i < p.size(); ++i) {
      u -= p[i];
      if (u < 0) return i;
    }
    return p.size() - 1;
  }

  void credit(std::size_t i, double reward) override {
    double x = hi_ > lo_ ? (reward - lo_) / (hi_ - lo_) : 0.5;
    double estimate = x / probabilities()[i];
    w_[i] *= std::exp(gamma_ * estimate / static_cast<double>(w_.size()));
    double top = *std::max_element(w_.begin(), w_.end());
    for (double& w : w_) w = std::max(w / top, 1e-300);
  }

 private:
  double gamma_;
  double lo_, hi_;
  std::vector<double> w_;
};

// Randomized weighted majority over the two actions with full-information
// rewards rescaled to [0,1].
class WmaAgent : public BaselineAgent {
 public:
  WmaAgent(const Game& g, Player me, std::uint64_t seed, double eta)
      : BaselineAgent(g, me, seed), eta_(eta), lo_(g.min_payoff(me)), hi_(g.max_payoff(me)) {}

  const std::array<double, 2>& weights() const { return w_; }
  double probability_first() const { return w_[0] / (w_[0] + w_[1]); }

  Action act(int) override { return rng_.uniform() < probability_first() ? Action::First : Action::Second; }

  void observe(const Outcome& o) override {
    for (Action a : {Action::First, Action::Second}) {
      double r = game_.own(role(), a, theirs(o));
      double x = hi_ > lo_ ? (r - lo_) / (hi_ - lo_) : 0.5;
      w_[index(a)] *= std::exp(eta_ * x);
    }
    double top = std::max(w_[0], w_[1]);
    for (double& w : w_) w = std::max(w / top, 1e-300);
  }

 private:
  double eta_;
  double lo_, hi_;
  std::array<double, 2> w_ = {1, 1};
};

// ---------------------------------------------------------------------------
// Registry

inline const std::vector<BaselineInfo>& baseline_registry() {
  static const std::vector<BaselineInfo> registry = {
      {"random", "uniform random actions", {}},
      {"bully", "always demands its bully cell", {}},
      {"manipulator", "bully with a maximin fallback", {{"window", 10}}},
      {"gtft", "generous tit-for-tat", {{"forgiveness", 0.1}}},
      {"wsls", "win-stay lose-shift", {{"threshold", 0.5}}},
      {"mem1", "memory-one stochastic strategy", {}},
      {"mem2", "memory-two stochastic strategy", {}},
      {"fictitious_play", "best response to empirical beliefs", {}},
      {"stochastic_fp", "logit response to empirical beliefs", {{"temperature", 0.1}}},
      {"qlearn", "epsilon-greedy Q-learning", {{"alpha", 0.1}, {"gamma", 0.95}, {"epsilon", 0.1}}},
      {"mbrl1", "model-based learner, memory one", {{"horizon", 50}, {"discount", 0.95}, {"epsilon", 0.1}}},
      {"mbrl2", "model-based learner, memory two", {{"horizon", 50}, {"discount", 0.95}, {"epsilon", 0.1}}},
      {"eee", "explore-exploit over experts", {{"epoch", 10}}},
      {"eee_simple", "explore-exploit over the simple roster", {{"epoch", 10}}},
      {"exp3", "Exp3 over experts", {{"epoch", 10}, {"gamma", 0.07}}},
      {"exp3_simple", "Exp3 over the simple roster", {{"epoch", 10}, {"gamma", 0.07}}},
      {"wma", "randomized weighted majority", {{"eta", 0.1}}},
      {"s", "satisficing expert selection", {{"lambda", 0.99}, {"epoch", 10}, {"slack", 0.01}}},
      {"spp", "S++", {{"lambda", 0.99}, {"epoch", 10}, {"slack", 0.01}}},
      {"spp_simple", "S++ over the simple roster", {{"lambda", 0.99}, {"epoch", 10}, {"slack", 0.01}}},
      {"ssharp", "S# (S++ with cheap talk)", {{"lambda", 0.99}, {"epoch", 10}, {"slack", 0.01}}},
  };
  return registry;
}

inline const std::vector<std::string>& reserved_baselines() {
  static const std::vector<std::string> names = {"mqubed", "cjal", "wolf_phc", "giga_wolf", "manip_gf"};
  return names;
}

inline const BaselineInfo* find_baseline(const std::string& name) {
  for (const auto& info : baseline_registry()) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

inline std::size_t registry_rank(const std::string& name) {
  const auto& r = baseline_registry();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].name == name) return i;
  }
  return r.size();
}

inline const BaselineInfo& require_baseline(const std::string& name) {
  if (std::find(reserved_baselines().begin(), reserved_baselines().end(), name) != reserved_baselines().end()) {
    throw Error(ErrorCode::NotImplemented, "agent '" + name + "' is reserved but not implemented");
  }
  const auto* info = find_baseline(name);
  if (!info) throw Error(ErrorCode::UnknownName, "unknown agent '" + name + "'");
  return *info;
}

// Defaults merged with the spec's overrides.
inline ParamMap resolve_params(const BaselineSpec& spec) {
  const auto& info = require_baseline(spec.name);
  ParamMap out = info.defaults;
  for (const auto& [k, v] : spec.params) {
    if (!out.count(k)) throw Error(ErrorCode::UnknownName, "agent '" + spec.name + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw Error(ErrorCode::BadRequest, "parameter '" + k + "' must be finite");
    out[k] = v;
  }
  return out;
}

inline nlohmann::json baseline_metadata(const BaselineSpec& spec) {
  nlohmann::json j{{"name", spec.name}, {"params", resolve_params(spec)}};
  if (spec.name == "mem1") j["table"] = spec.table ? *spec.table : default_mem1_table();
  if (spec.name == "mem2") j["table"] = spec.table ? *spec.table : default_mem2_table();
  if (spec.name == "mbrl1" || spec.name == "mbrl2") {
    MbrlParams d;
    j["params"]["epsilon_decay"] = d.epsilon_decay;
    j["params"]["epsilon_floor"] = d.epsilon_floor;
  }
  return j;
}

inline MetaConfig meta_config_for(const std::string& name, const ParamMap& p, std::uint64_t seed, bool talk) {
  MetaConfig c;
  c.variant = name == "s" ? MetaVariant::S : name == "ssharp" ? MetaVariant::SSharp : MetaVariant::SPP;
  c.roster = name == "spp_simple" ? RosterKind::Simple : RosterKind::Full;
  c.lambda = p.at("lambda");
  c.m = static_cast<int>(p.at("epoch"));
  c.slack = p.at("slack");
  c.seed = seed;
  c.talk = talk && c.variant == MetaVariant::SSharp;
  return c;
}

// `talk` only matters for agents that can speak.
inline AgentPtr instantiate_baseline(const BaselineSpec& spec, const Game& g, Player me, bool talk = false) {
  const ParamMap p = resolve_params(spec);
  const auto& n = spec.name;
  const auto seed = spec.seed;
  auto epoch = [&] { return static_cast<int>(p.at("epoch")); };
  if (n == "random") return std::make_unique<RandomAgent>(g, me, seed);
  if (n == "bully") return std::make_unique<BullyAgent>(g, me, seed);
  if (n == "manipulator") return std::make_unique<ManipulatorAgent>(g, me, seed, static_cast<int>(p.at("window")));
  if (n == "gtft") return std::make_unique<GtftAgent>(g, me, seed, p.at("forgiveness"));
  if (n == "wsls") return std::make_unique<WslsAgent>(g, me, seed, p.at("threshold"));
  if (n == "mem1") {
    return std::make_unique<Mem1Agent>(g, me, seed, Mem1Table::from_json(spec.table ? *spec.table : default_mem1_table()));
  }
  if (n == "mem2") {
    return std::make_unique<Mem2Agent>(g, me, seed, Mem2Table::from_json(spec.table ? *spec.table : default_mem2_table()));
  }
  if (n == "fictitious_play") return std::make_unique<FictitiousPlayAgent>(g, me, seed);
  if (n == "stochastic_fp") return std::make_unique<StochasticFpAgent>(g, me, seed, p.at("temperature"));
  if (n == "qlearn") return std::make_unique<QLearningAgent>(g, me, seed, p.at("alpha"), p.at("gamma"), p.at("epsilon"));
  if (n == "mbrl1" || n == "mbrl2") {
    MbrlParams mp;
    mp.memory = n == "mbrl1" ? 1 : 2;
    mp.horizon = static_cast<int>(p.at("horizon"));
    mp.discount = p.at("discount");
    mp.epsilon = p.at("epsilon");
    return std::make_unique<MbrlAgent>(g, me, seed, mp);
  }
  if (n == "eee") return std::make_unique<EeeAgent>(g, me, seed, RosterKind::Full, epoch());
  if (n == "eee_simple") return std::make_unique<EeeAgent>(g, me, seed, RosterKind::Simple, epoch());
  if (n == "exp3") return std::make_unique<Exp3Agent>(g, me, seed, RosterKind::Full, epoch(), p.at("gamma"));
  if (n == "exp3_simple") return std::make_unique<Exp3Agent>(g, me, seed, RosterKind::Simple, epoch(), p.at("gamma"));
  if (n == "wma") return std::make_unique<WmaAgent>(g, me, seed, p.at("eta"));
  return std::make_unique<MetaAgent>(g, me, meta_config_for(n, p, seed, talk));
}

}  // namespace cooplab
