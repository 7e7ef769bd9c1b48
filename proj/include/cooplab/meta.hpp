#pragma once

// S, S++ and S#: satisficing expert selection with aspiration pruning and,
// for S# with talk enabled, congruence pruning and speech.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cooplab/agent.hpp"
#include "cooplab/error.hpp"
#include "cooplab/experts.hpp"
#include "cooplab/rng.hpp"
#include "cooplab/signaling.hpp"

namespace cooplab {

enum class MetaVariant : std::uint8_t { S, SPP, SSharp };

inline std::string_view to_string(MetaVariant v) {
  switch (v) {
    case MetaVariant::S: return "S";
    case MetaVariant::SPP: return "S++";
    case MetaVariant::SSharp: return "S#";
  }
  return "?";
}

enum class AspirationStart : std::uint8_t { Bargaining, MaxPayoff };

struct MetaConfig {
  MetaVariant variant = MetaVariant::SPP;
  double lambda = 0.99;
  int m = 10;
  // Explicit starting aspiration; when unset, `start` picks it from the game.
  std::optional<double> alpha0;
  AspirationStart start = AspirationStart::Bargaining;
  std::uint64_t seed = 0;
  bool talk = false;
  RosterKind roster = RosterKind::Full;
  // Fraction of the payoff range by which a reward or potential may fall short
  // of the aspiration and still count as meeting it.
  double slack = 0.01;
  MbrlParams mbrl{};
};

inline void to_json(nlohmann::json& j, const MetaConfig& c) {
  j = {{"variant", to_string(c.variant)},
       {"lambda", c.lambda},
       {"m", c.m},
       {"alpha0", c.alpha0 ? nlohmann::json(*c.alpha0)
                           : nlohmann::json(c.start == AspirationStart::Bargaining ? "bargaining" : "max_payoff")},
       {"seed", c.seed},
       {"talk", c.talk},
       {"roster", c.roster == RosterKind::Full ? "full" : "simple"},
       {"slack", c.slack},
       {"mbrl",
        {{"memory", c.mbrl.memory},
         {"horizon", c.mbrl.horizon},
         {"discount", c.mbrl.discount},
         {"epsilon", c.mbrl.epsilon},
         {"epsilon_decay", c.mbrl.epsilon_decay},
         {"epsilon_floor", c.mbrl.epsilon_floor}}}};
}

// Slack for comparing payoffs that went through floating-point averaging.
inline constexpr double kAspirationTolerance = 1e-9;

// Experts whose potential meets the aspiration, or the argmax when none does.
// Fallback ties prefer `current`, then roster order.
inline std::vector<std::size_t> prune_by_aspiration(std::span<const double> potentials, double alpha,
                                                    std::optional<std::size_t> current = std::nullopt,
                                                    double slack = 0) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < potentials.size(); ++i) {
    if (potentials[i] >= alpha - slack - kAspirationTolerance) out.push_back(i);
  }
  if (!out.empty() || potentials.empty()) return out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < potentials.size(); ++i) {
    if (potentials[i] > potentials[best] + kAspirationTolerance) best = i;
  }
  if (current && *current < potentials.size() &&
      potentials[*current] >= potentials[best] - kAspirationTolerance) {
    best = *current;
  }
  return {best};
}

// Experts that would carry out `proposal`. Without a proposal, every expert.
inline std::vector<std::size_t> prune_by_congruence(const ExpertSet& set, const std::optional<JointPlan>& proposal) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!proposal || set.congruent(i, *proposal)) out.push_back(i);
  }
  return out;
}

// The intersection, or the aspiration set when the intersection is empty.
inline std::vector<std::size_t> intersect_or_fallback(const std::vector<std::size_t>& aspiring,
                                                      const std::vector<std::size_t>& congruent) {
  std::vector<std::size_t> out;
  std::set_intersection(aspiring.begin(), aspiring.end(), congruent.begin(), congruent.end(), std::back_inserter(out));
  return out.empty() ? aspiring : out;
}

// Satisficing choice: keep `current` when it is a candidate and the epoch met
// the aspiration, otherwise draw uniformly. Singletons consume no randomness.
inline std::size_t select_expert(std::span<const std::size_t> candidates, std::optional<std::size_t> current,
                                 double epoch_avg_reward, double alpha, Rng& rng, double slack = 0) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidGame, "empty candidate set");
  if (current && epoch_avg_reward >= alpha - slack - kAspirationTolerance &&
      std::find(candidates.begin(), candidates.end(), *current) != candidates.end()) {
    return *current;
  }
  if (candidates.size() == 1) return candidates[0];
  return candidates[rng.below(candidates.size())];
}

struct AspirationState {
  double alpha = 0;
  double lambda = 0.99;
  int m = 10;
  double epoch_reward_sum = 0;
};

// alpha <- lambda^m alpha + (1 - lambda^m) reward, clamped to [lo, hi].
inline double update_aspiration(double alpha, double lambda, int m, double reward, double lo, double hi) {
  const double w = std::pow(lambda, m);
  return std::clamp(w * alpha + (1 - w) * reward, lo, hi);
}

inline AspirationState update_aspiration(const AspirationState& s, double reward, double lo, double hi) {
  AspirationState n = s;
  n.alpha = update_aspiration(s.alpha, s.lambda, s.m, reward, lo, hi);
  n.epoch_reward_sum = 0;
  return n;
}

inline double initial_aspiration(const Game& g, Player me, const MetaConfig& c) {
  if (c.alpha0) return std::clamp(*c.alpha0, g.min_payoff(me), g.max_payoff(me));
  if (c.start == AspirationStart::MaxPayoff) return g.max_payoff(me);
  return nash_bargaining(g).payoffs[index(me)];
}

struct SelectionRecord {
  int round = 0;
  std::size_t expert = 0;
  double alpha = 0;
};

class MetaAgent : public Agent {
 public:
  MetaAgent(const Game& g, Player me, MetaConfig config)
      : Agent(me),
        config_(std::move(config)),
        experts_(g, me, config_.roster, config_.mbrl),
        rng_(config_.seed),
        alpha_(initial_aspiration(g, me, config_)) {
    if (config_.m < 1) throw Error(ErrorCode::InvalidGame, "epoch length must be at least 1");
    experts_.set_staleness(config_.lambda);
    if (!(config_.lambda > 0 && config_.lambda < 1)) throw Error(ErrorCode::InvalidGame, "lambda must be in (0,1)");
  }

  const MetaConfig& config() const { return config_; }
  double alpha() const { return alpha_; }
  std::optional<std::size_t> selected() const { return selected_; }
  const ExpertSet& experts() const { return experts_; }
  ExpertSet& experts() { return experts_; }
  const std::vector<SelectionRecord>& selections() const { return selections_; }
  const std::vector<std::size_t>& last_pruned() const { return pruned_; }
  const std::vector<std::size_t>& last_congruent() const { return congruent_; }
  bool talking() const { return config_.variant == MetaVariant::SSharp && config_.talk; }

  std::vector<SpeechAct> speak(int round) override {
    begin_round(round);
    if (!talking()) return {};
    std::vector<SpeechAct> out;
    Expert& e = experts_[*selected_];
    const auto plan = experts_.spoken_plan(*selected_);
    for (const auto& in : pending_) {
      auto res = emit_speech(e.speech_role(), plan, e.speech(), in);
      e.speech() = res.next;
      out.insert(out.end(), res.acts.begin(), res.acts.end());
    }
    pending_.clear();
    return limit_acts(out);
  }

  void hear(int round, std::span<const SpeechAct> acts) override {
    begin_round(round);
    if (!talking()) return;
    auto plan = interpret_plan(acts);
    if (plan) {
      bool fresh = std::any_of(acts.begin(), acts.end(), [](const SpeechAct& a) {
        return a.id == acts::kProposeStationary || a.id == acts::kProposeAlternation ||
               a.id == acts::kProposeOneShot;
      });
      experts_.set_proposal(*plan, fresh);
      const bool repeated = partner_plan_ && *partner_plan_ == *plan;
      partner_plan_ = plan;

      // A partner that insists on a plan other than the current expert's
      // target is treated as refusing that target.
      const auto& target = experts_[*selected_].id().target;
      const bool agrees = experts_.congruent(*selected_, *plan);
      if (target && (agrees || repeated)) experts_.record_compliance(*target, agrees);
    }
    if (!partner_plan_) return;
    // While the current expert is at odds with the partner's standing proposal
    // the selection set is recomputed every round. The expert is kept while it
    // stays in the set.
    if (plan || !experts_.congruent(*selected_, *partner_plan_)) {
      auto candidates = selection_set(*selected_);
      if (std::find(candidates.begin(), candidates.end(), *selected_) == candidates.end()) {
        switch_to(candidates.size() == 1 ? candidates[0] : candidates[rng_.below(candidates.size())], round);
      }
    }
    if (plan) pending_.push_back({SpeechEvent::ProposalReceived, plan, experts_.congruent(*selected_, *plan)});
  }

  Action act(int round) override {
    begin_round(round);
    return experts_.action(*selected_, rng_);
  }

  void observe(const Outcome& outcome) override {
    if (outcome.round != round_) {
      throw Error(ErrorCode::ProtocolViolation, "observed round " + std::to_string(outcome.round) +
                                                    " while playing round " + std::to_string(round_));
    }
    auto ev = experts_.observe(*selected_, outcome.joint);
    epoch_sum_ += my_payoff(outcome);
    ++epoch_len_;
    last_round_ = round_;
    if (talking()) {
      for (auto e : ev.events) pending_.push_back({e, std::nullopt, false});
    }
  }

 private:
  void begin_round(int round) {
    if (round == round_ && round_ != last_round_) return;
    if (round != last_round_ + 1) {
      throw Error(ErrorCode::ProtocolViolation, "expected round " + std::to_string(last_round_ + 1) + ", got " +
                                                    std::to_string(round));
    }
    round_ = round;
    if (!selected_ || epoch_len_ >= config_.m) select(round);
  }

  std::vector<std::size_t> selection_set(std::optional<std::size_t> current) {
    if (config_.variant == MetaVariant::S) {
      std::vector<std::size_t> all(experts_.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      pruned_ = all;
      congruent_ = all;
      return all;
    }
    auto potentials = experts_.potentials();
    pruned_ = prune_by_aspiration(potentials, alpha_, current, slack());
    if (!talking()) {
      congruent_.clear();
      for (std::size_t i = 0; i < experts_.size(); ++i) congruent_.push_back(i);
      return pruned_;
    }
    congruent_ = prune_by_congruence(experts_, partner_plan_);
    return intersect_or_fallback(pruned_, congruent_);
  }

  double slack() const {
    const auto& f = experts_.facts();
    return config_.slack * (f.max_payoff - f.min_payoff);
  }

  void select(int round) {
    double reward = 0;
    if (selected_) {
      reward = epoch_sum_ / epoch_len_;
      const auto& f = experts_.facts();
      alpha_ = update_aspiration(alpha_, config_.lambda, epoch_len_, reward, f.min_payoff, f.max_payoff);
    }
    auto candidates = selection_set(selected_);
    std::size_t next = select_expert(candidates, selected_, reward, alpha_, rng_, slack());
    epoch_sum_ = 0;
    epoch_len_ = 0;
    if (!selected_ || next != *selected_) switch_to(next, round);
  }

  void switch_to(std::size_t next, int round) {
    const bool first = !selected_;
    selected_ = next;
    experts_[next].activate();
    experts_[next].speech() = {};
    selections_.push_back({round, next, alpha_});
    if (talking()) {
      pending_.clear();
      pending_.push_back({first ? SpeechEvent::RoundStartFirst : SpeechEvent::ExpertSwitched, std::nullopt, false});
    }
  }

  MetaConfig config_;
  ExpertSet experts_;
  Rng rng_;
  double alpha_;
  std::optional<std::size_t> selected_;
  double epoch_sum_ = 0;
  int epoch_len_ = 0;
  int round_ = 0;
  int last_round_ = 0;
  std::optional<JointPlan> partner_plan_;
  std::vector<SpeechInput> pending_;
  std::vector<std::size_t> pruned_;
  std::vector<std::size_t> congruent_;
  std::vector<SelectionRecord> selections_;
};

}  // namespace cooplab
