#pragma once

// The expert roster used by the S-family meta-agents. Each expert is a complete
// strategy over the repeated game with its own small state machine, a potential
// (the per-round payoff it believes it can deliver), and a speech role.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cooplab/game.hpp"
#include "cooplab/mbrl.hpp"
#include "cooplab/rng.hpp"
#include "cooplab/signaling.hpp"

namespace cooplab {

enum class ExpertKind : std::uint8_t { TriggerLeader, Follower, Bully, BullyL, BullyF, Maximin, MBRL };

inline std::string_view to_string(ExpertKind k) {
  switch (k) {
    case ExpertKind::TriggerLeader: return "TriggerLeader";
    case ExpertKind::Follower: return "Follower";
    case ExpertKind::Bully: return "Bully";
    case ExpertKind::BullyL: return "BullyL";
    case ExpertKind::BullyF: return "BullyF";
    case ExpertKind::Maximin: return "Maximin";
    case ExpertKind::MBRL: return "MBRL";
  }
  return "?";
}

struct ExpertId {
  ExpertKind kind;
  std::optional<JointPlan> target;

  std::string to_string() const {
    std::string s(cooplab::to_string(kind));
    if (target) s += target->to_string();
    return s;
  }
  friend bool operator==(const ExpertId&, const ExpertId&) = default;
};

enum class ExpertPhase : std::uint8_t { Propose, Cooperate, Punish, Acquiesce };

struct ExpertState {
  ExpertPhase phase = ExpertPhase::Propose;
  int punish_rounds_left = 0;
  std::size_t cycle_position = 0;

  friend bool operator==(const ExpertState&, const ExpertState&) = default;
};

inline constexpr int kMaxPunishRounds = 10;
// Weight on the running compliance estimate when a new round is folded in.
inline constexpr double kComplianceRetention = 0.9;

// Smallest k >= 1 with k * (partner's plan payoff - partner's maximin) >= the
// partner's best one-shot deviation gain along the plan, capped at
// kMaxPunishRounds when the plan leaves the partner nothing to lose.
inline int punish_length(const Game& g, Player me, const JointPlan& plan) {
  const Player partner = other(me);
  double gain = 0;
  for (auto ja : plan.cycle()) {
    Action my_part = ja.of(me);
    double best = std::max(g.own(partner, Action::First, my_part), g.own(partner, Action::Second, my_part));
    gain = std::max(gain, best - g.payoff(partner, ja));
  }
  if (gain <= 0) return 1;
  double loss = plan.average(g, partner) - maximin(g, partner).value;
  if (loss <= 1e-12) return kMaxPunishRounds;
  int k = static_cast<int>(std::ceil(gain / loss - 1e-12));
  return std::clamp(k, 1, kMaxPunishRounds);
}

// Pure leader state machine step. `partner_matched` says whether the partner
// played its part of the target cell this round (ignored while punishing).
inline ExpertState advance_leader(const ExpertState& s, bool partner_matched, int punish_len) {
  ExpertState n = s;
  switch (s.phase) {
    case ExpertPhase::Propose:
      // The partner may not have heard the demand yet: no punishment this round.
      n.phase = ExpertPhase::Cooperate;
      n.cycle_position = s.cycle_position + 1;
      break;
    case ExpertPhase::Cooperate:
    case ExpertPhase::Acquiesce:
      if (partner_matched) {
        n.phase = ExpertPhase::Cooperate;
        n.cycle_position = s.cycle_position + 1;
      } else {
        n.phase = ExpertPhase::Punish;
        n.punish_rounds_left = punish_len;
        n.cycle_position = 0;
      }
      break;
    case ExpertPhase::Punish:
      n.punish_rounds_left = s.punish_rounds_left - 1;
      if (n.punish_rounds_left <= 0) {
        n.punish_rounds_left = 0;
        n.phase = ExpertPhase::Cooperate;
        n.cycle_position = 0;
      }
      break;
  }
  return n;
}

// Per-(game, player) quantities every expert draws on.
struct GameFacts {
  GameFacts(const Game& game, Player me)
      : g(game),
        me(me),
        own_maximin(maximin(game, me)),
        partner_maximin(maximin(game, other(me)).value),
        security(security_action(game, me)),
        attack(attack_action(game, me)),
        nbs(nash_bargaining(game)),
        bully_plan(best_bully_plan(game, me)),
        partner_bully_plan(best_bully_plan(game, other(me))),
        bully_cell(cooplab::bully_cell(game, me)),
        min_payoff(game.min_payoff(me)),
        max_payoff(game.max_payoff(me)) {}

  Game g;
  Player me;
  MaximinResult own_maximin;
  double partner_maximin;
  Action security;
  Action attack;
  BargainingSolution nbs;
  JointPlan bully_plan;
  JointPlan partner_bully_plan;
  JointAction bully_cell;
  double min_payoff;
  double max_payoff;
};

enum class RosterKind : std::uint8_t { Full, Simple };

// Things each round reveals that experts share: the partner's last action, the
// partner's latest proposal, and per-target compliance estimates.
struct SharedObservations {
  std::optional<Action> partner_last;
  std::optional<JointPlan> proposal;
  std::size_t proposal_position = 0;  // rounds since the proposal arrived
  std::vector<std::pair<JointPlan, double>> compliance;

  double compliance_of(const JointPlan& plan) const {
    for (const auto& [p, c] : compliance) {
      if (p.equivalent(plan)) return c;
    }
    return 1.0;
  }
  // Evidence about targets that are not being pursued goes stale: their
  // estimates relax toward full compliance by a factor `keep` per round.
  void relax_compliance(const std::optional<JointPlan>& except, double keep) {
    for (auto& [p, c] : compliance) {
      if (except && p.equivalent(*except)) continue;
      c = 1 - keep * (1 - c);
    }
  }

  void record_compliance(const JointPlan& plan, bool matched) {
    for (auto& [p, c] : compliance) {
      if (p.equivalent(plan)) {
        c = kComplianceRetention * c + (1 - kComplianceRetention) * (matched ? 1.0 : 0.0);
        return;
      }
    }
    compliance.emplace_back(plan, kComplianceRetention + (1 - kComplianceRetention) * (matched ? 1.0 : 0.0));
  }
};

// What an active expert's round produced, for the speech layer.
struct ExpertEvents {
  std::vector<SpeechEvent> events;
};

class Expert {
 public:
  Expert(ExpertId id, const GameFacts& facts, MbrlParams mbrl = {}) : id_(std::move(id)) {
    if (id_.target) punish_len_ = punish_length(facts.g, facts.me, *id_.target);
    if (id_.kind == ExpertKind::MBRL) mbrl_.emplace(facts.g, facts.me, mbrl);
    if (id_.kind == ExpertKind::Follower || id_.kind == ExpertKind::BullyF) state_.phase = ExpertPhase::Acquiesce;
  }

  const ExpertId& id() const { return id_; }
  ExpertKind kind() const { return id_.kind; }
  const ExpertState& state() const { return state_; }
  int punish_len() const { return punish_len_; }
  SpeechFsmState& speech() { return speech_; }
  const SpeechFsmState& speech() const { return speech_; }

  SpeechRole speech_role() const {
    switch (id_.kind) {
      case ExpertKind::TriggerLeader:
      case ExpertKind::Bully:
      case ExpertKind::BullyL: return SpeechRole::Leader;
      case ExpertKind::Follower:
      case ExpertKind::BullyF: return SpeechRole::Follower;
      default: return SpeechRole::Independent;
    }
  }

  bool punishes() const { return id_.kind == ExpertKind::TriggerLeader || id_.kind == ExpertKind::BullyL; }

  // The plan this expert talks about: its target, or the proposal a Follower
  // is going along with.
  std::optional<JointPlan> spoken_plan(const GameFacts& f, const SharedObservations& obs) const {
    if (id_.kind == ExpertKind::Follower) {
      if (obs.proposal && follower_accepts(f, *obs.proposal)) return obs.proposal;
      return std::nullopt;
    }
    return id_.target;
  }

  static bool follower_accepts(const GameFacts& f, const JointPlan& plan) {
    return plan.average(f.g, f.me) >= f.own_maximin.value - 1e-12;
  }

  // Whether this expert would carry out `proposal` (up to rotation).
  bool congruent_with(const GameFacts& f, const JointPlan& proposal) const {
    switch (id_.kind) {
      case ExpertKind::Follower: return follower_accepts(f, proposal);
      case ExpertKind::Maximin:
      case ExpertKind::MBRL: return false;
      default: return id_.target && id_.target->equivalent(proposal);
    }
  }

  void activate() {
    state_ = ExpertState{};
    if (id_.kind == ExpertKind::Follower || id_.kind == ExpertKind::BullyF) state_.phase = ExpertPhase::Acquiesce;
    if (id_.kind == ExpertKind::Bully) state_.phase = ExpertPhase::Cooperate;
  }

  double potential(const GameFacts& f, const SharedObservations& obs) {
    double v = 0;
    switch (id_.kind) {
      case ExpertKind::TriggerLeader:
      case ExpertKind::BullyL:
      case ExpertKind::Bully:
      case ExpertKind::BullyF:
        v = discount(obs.compliance_of(*id_.target), id_.target->average(f.g, f.me), f.min_payoff);
        break;
      case ExpertKind::Follower:
        v = f.own_maximin.value;
        if (obs.proposal) {
          if (follower_accepts(f, *obs.proposal)) v = obs.proposal->average(f.g, f.me);
        } else if (obs.partner_last) {
          Action br = best_response(f.g, f.me, *obs.partner_last);
          v = std::max(v, f.g.own(f.me, br, *obs.partner_last));
        }
        break;
      case ExpertKind::Maximin: v = f.own_maximin.value; break;
      case ExpertKind::MBRL: v = mbrl_->potential(); break;
    }
    return std::clamp(v, f.min_payoff, f.max_payoff);
  }

  Action next_action(const GameFacts& f, const SharedObservations& obs, Rng& rng) {
    switch (id_.kind) {
      case ExpertKind::TriggerLeader:
        if (state_.phase == ExpertPhase::Punish) return sample_maximin(f, rng);
        return id_.target->at(state_.cycle_position).of(f.me);
      case ExpertKind::BullyL:
        if (state_.phase == ExpertPhase::Punish) return f.attack;
        return id_.target->at(state_.cycle_position).of(f.me);
      case ExpertKind::Bully: return id_.target->at(0).of(f.me);
      case ExpertKind::BullyF: return id_.target->at(state_.cycle_position).of(f.me);
      case ExpertKind::Follower:
        if (obs.proposal) {
          if (follower_accepts(f, *obs.proposal)) return obs.proposal->at(obs.proposal_position).of(f.me);
          return sample_maximin(f, rng);
        }
        if (obs.partner_last) {
          Action br = best_response(f.g, f.me, *obs.partner_last);
          if (f.g.own(f.me, br, *obs.partner_last) >= f.own_maximin.value - 1e-12) return br;
        }
        return sample_maximin(f, rng);
      case ExpertKind::Maximin: return sample_maximin(f, rng);
      case ExpertKind::MBRL: return mbrl_->choose(rng);
    }
    return Action::First;
  }

  // Update after a round in which this expert was (`active`) or was not the
  // one being followed. Only the active expert's state machine advances.
  ExpertEvents observe(const GameFacts& f, SharedObservations& obs, JointAction outcome, bool active) {
    ExpertEvents ev;
    if (mbrl_) mbrl_->observe(outcome);
    if (!active) return ev;

    const Action partner = outcome.of(other(f.me));
    switch (id_.kind) {
      case ExpertKind::TriggerLeader:
      case ExpertKind::BullyL: {
        const ExpertState before = state_;
        if (before.phase == ExpertPhase::Propose) align_to_partner(f, partner);
        const bool matched = id_.target->at(state_.cycle_position).of(other(f.me)) == partner;
        if (before.phase == ExpertPhase::Cooperate) obs.record_compliance(*id_.target, matched);
        state_ = advance_leader(state_, matched, punish_len_);
        if (before.phase == ExpertPhase::Cooperate || before.phase == ExpertPhase::Propose) {
          if (matched) {
            ev.events.push_back(SpeechEvent::PartnerComplied);
          } else if (state_.phase == ExpertPhase::Punish) {
            ev.events.push_back(SpeechEvent::PartnerDeviated);
          }
        } else if (before.phase == ExpertPhase::Punish && state_.phase != ExpertPhase::Punish) {
          ev.events.push_back(SpeechEvent::PunishmentEnd);
        }
        break;
      }
      case ExpertKind::Bully:
      case ExpertKind::BullyF: {
        if (id_.kind == ExpertKind::BullyF && state_.cycle_position == 0) align_to_partner(f, partner);
        const bool matched = id_.target->at(state_.cycle_position).of(other(f.me)) == partner;
        obs.record_compliance(*id_.target, matched);
        state_.cycle_position = (state_.cycle_position + 1) % id_.target->length();
        ev.events.push_back(matched ? SpeechEvent::PartnerComplied : SpeechEvent::PartnerDeviated);
        break;
      }
      case ExpertKind::Follower:
        if (obs.proposal && follower_accepts(f, *obs.proposal)) {
          bool matched = obs.proposal->at(obs.proposal_position).of(other(f.me)) == partner;
          ev.events.push_back(matched ? SpeechEvent::PartnerComplied : SpeechEvent::PartnerDeviated);
        }
        break;
      case ExpertKind::Maximin:
      case ExpertKind::MBRL: break;
    }
    return ev;
  }

  const MbrlLearner* mbrl() const { return mbrl_ ? &*mbrl_ : nullptr; }

 private:
  // Scales the target's gain over the game's worst payoff by the compliance rate.
  static double discount(double compliance, double target_value, double floor) {
    return floor + compliance * (target_value - floor);
  }

  Action sample_maximin(const GameFacts& f, Rng& rng) const {
    const auto& s = f.own_maximin.strategy;
    if (f.own_maximin.is_pure()) return f.own_maximin.likeliest_action();
    return rng.uniform() < s[0] ? Action::First : Action::Second;
  }

  // On the first round of a cycle, adopt the partner's phase of an alternation
  // when its action fits a different position of the cycle.
  void align_to_partner(const GameFacts& f, Action partner) {
    const auto& plan = *id_.target;
    if (plan.length() < 2) return;
    if (plan.at(state_.cycle_position).of(other(f.me)) == partner) return;
    for (std::size_t j = 0; j < plan.length(); ++j) {
      if (plan.at(j).of(other(f.me)) == partner && plan.at(j).of(f.me) == plan.at(state_.cycle_position).of(f.me)) {
        state_.cycle_position = j;
        return;
      }
    }
  }

  ExpertId id_;
  ExpertState state_;
  SpeechFsmState speech_;
  int punish_len_ = 1;
  std::optional<MbrlLearner> mbrl_;
};

// Builds the deterministic roster for `me` in `g`.
inline std::vector<ExpertId> expert_roster(const GameFacts& f, RosterKind kind = RosterKind::Full) {
  if (kind == RosterKind::Simple) {
    return {{ExpertKind::TriggerLeader, f.nbs.plan},
            {ExpertKind::Bully, JointPlan::stationary(f.bully_cell)},
            {ExpertKind::Follower, std::nullopt},
            {ExpertKind::Maximin, std::nullopt}};
  }
  return {{ExpertKind::TriggerLeader, f.nbs.plan},
          {ExpertKind::TriggerLeader, f.bully_plan},
          {ExpertKind::Follower, std::nullopt},
          {ExpertKind::Bully, JointPlan::stationary(f.bully_cell)},
          {ExpertKind::BullyL, f.bully_plan},
          {ExpertKind::BullyF, f.partner_bully_plan},
          {ExpertKind::Maximin, std::nullopt},
          {ExpertKind::MBRL, std::nullopt}};
}

// The roster together with the observations its members share.
class ExpertSet {
 public:
  ExpertSet(const Game& g, Player me, RosterKind kind = RosterKind::Full, MbrlParams mbrl = {})
      : facts_(g, me) {
    for (auto& id : expert_roster(facts_, kind)) experts_.emplace_back(std::move(id), facts_, mbrl);
  }

  std::size_t size() const { return experts_.size(); }
  void set_staleness(double keep) { staleness_ = keep; }
  Expert& operator[](std::size_t i) { return experts_[i]; }
  const Expert& operator[](std::size_t i) const { return experts_[i]; }
  const GameFacts& facts() const { return facts_; }
  const SharedObservations& observations() const { return obs_; }

  double potential(std::size_t i) { return experts_[i].potential(facts_, obs_); }
  std::vector<double> potentials() {
    std::vector<double> out;
    for (std::size_t i = 0; i < experts_.size(); ++i) out.push_back(potential(i));
    return out;
  }

  bool congruent(std::size_t i, const JointPlan& proposal) const {
    return experts_[i].congruent_with(facts_, proposal);
  }

  // `fresh` marks a new proposal (as opposed to an acceptance), which restarts
  // the plan's cycle in the current round.
  void set_proposal(const JointPlan& plan, bool fresh) {
    if (fresh || !obs_.proposal || !(*obs_.proposal == plan)) obs_.proposal_position = 0;
    obs_.proposal = plan;
  }

  void record_compliance(const JointPlan& plan, bool matched) { obs_.record_compliance(plan, matched); }

  Action action(std::size_t active, Rng& rng) { return experts_[active].next_action(facts_, obs_, rng); }

  std::optional<JointPlan> spoken_plan(std::size_t i) const { return experts_[i].spoken_plan(facts_, obs_); }

  ExpertEvents observe(std::size_t active, JointAction outcome) {
    ExpertEvents ev;
    if (staleness_ < 1) obs_.relax_compliance(experts_[active].id().target, staleness_);
    for (std::size_t i = 0; i < experts_.size(); ++i) {
      auto e = experts_[i].observe(facts_, obs_, outcome, i == active);
      if (i == active) ev = std::move(e);
    }
    obs_.partner_last = outcome.of(other(facts_.me));
    if (obs_.proposal) ++obs_.proposal_position;
    return ev;
  }

 private:
  GameFacts facts_;
  SharedObservations obs_;
  std::vector<Expert> experts_;
  double staleness_ = 1;
};

inline nlohmann::json roster_json(ExpertSet& set) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < set.size(); ++i) {
    nlohmann::json rec{{"kind", to_string(set[i].kind())}, {"potential", set.potential(i)}};
    rec["target"] = set[i].id().target ? nlohmann::json(*set[i].id().target) : nlohmann::json(nullptr);
    if (set[i].id().target) rec["punish_len"] = set[i].punish_len();
    out.push_back(rec);
  }
  return out;
}

}  // namespace cooplab
