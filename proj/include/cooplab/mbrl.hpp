#pragma once

// Model-based reinforcement learner over joint-action histories. The state is
// the last `memory` joint actions (padded with a start symbol early in the
// game); the model counts the partner's replies in each state and plans with
// finite-horizon discounted value iteration. In states with no observations the
// partner is assumed to reply in the learner's favor, so an empty model values
// every state at the maximum cell payoff per round.

#include <algorithm>
#include <cmath>
#include <vector>

#include "cooplab/game.hpp"
#include "cooplab/rng.hpp"

namespace cooplab {

struct MbrlParams {
  int memory = 1;
  int horizon = 50;
  double discount = 0.95;
  double epsilon = 0.1;        // initial exploration rate
  double epsilon_decay = 0.999;
  double epsilon_floor = 0.01;
};

class MbrlLearner {
 public:
  MbrlLearner(const Game& g, Player me, MbrlParams params = {})
      : game_(g), me_(me), params_(params) {
    num_states_ = 1;
    for (int i = 0; i < params_.memory; ++i) num_states_ *= kSymbols;
    state_ = num_states_ - 1;  // all start symbols
    counts_.assign(static_cast<std::size_t>(num_states_) * 2, 0.0);
    q_.assign(static_cast<std::size_t>(num_states_) * 2, 0.0);
    rmax_ = g.max_payoff(me);
    norm_ = 0;
    for (int k = 0; k < params_.horizon; ++k) norm_ += std::pow(params_.discount, k);
  }

  const MbrlParams& params() const { return params_; }
  int state() const { return state_; }
  long rounds_observed() const { return t_; }

  void observe(JointAction outcome) {
    Action theirs = outcome.of(other(me_));
    counts_[static_cast<std::size_t>(state_) * 2 + static_cast<std::size_t>(index(theirs))] += 1.0;
    state_ = next_state(state_, outcome);
    ++t_;
    dirty_ = true;
  }

  double epsilon() const {
    return std::max(params_.epsilon * std::pow(params_.epsilon_decay, static_cast<double>(t_)),
                    params_.epsilon_floor);
  }

  // Normalized value of the current state, in per-round payoff units.
  double potential() {
    solve();
    return std::clamp(std::max(q(state_, Action::First), q(state_, Action::Second)) / norm_,
                      game_.min_payoff(me_), rmax_);
  }

  Action greedy() {
    solve();
    return q(state_, Action::Second) > q(state_, Action::First) ? Action::Second : Action::First;
  }

  // Epsilon-greedy. Draws from `rng` only when exploration is enabled.
  Action choose(Rng& rng) {
    double eps = epsilon();
    if (eps > 0 && rng.uniform() < eps) return rng.below(2) == 0 ? Action::First : Action::Second;
    return greedy();
  }

  double q(int s, Action a) const { return q_[static_cast<std::size_t>(s) * 2 + static_cast<std::size_t>(index(a))]; }

 private:
  static constexpr int kSymbols = 5;  // four cells plus the start symbol

  int next_state(int s, JointAction ja) const {
    if (params_.memory == 1) return ja.cell();
    // Drop the oldest symbol, append the newest.
    int base = num_states_ / kSymbols;
    return (s % base) * kSymbols + ja.cell();
  }

  void solve() {
    if (!dirty_ && solved_once_) return;
    const auto n = static_cast<std::size_t>(num_states_);
    std::vector<double> v(n, 0.0), v_next(n, 0.0);
    for (int h = 1; h <= params_.horizon; ++h) {
      for (std::size_t s = 0; s < n; ++s) {
        double c0 = counts_[s * 2];
        double c1 = counts_[s * 2 + 1];
        double total = c0 + c1;
        double best = -1e300;
        for (Action a : {Action::First, Action::Second}) {
          double value = total <= 0 ? -1e300 : 0.0;
          for (Action b : {Action::First, Action::Second}) {
            JointAction ja = JointAction::make(me_, a, b);
            int ns = next_state(static_cast<int>(s), ja);
            double backup = game_.payoff(me_, ja) + params_.discount * v[static_cast<std::size_t>(ns)];
            if (total <= 0) {
              value = std::max(value, backup);
            } else {
              double p = (b == Action::First ? c0 : c1) / total;
              if (p > 0) value += p * backup;
            }
          }
          if (h == params_.horizon) q_[s * 2 + static_cast<std::size_t>(index(a))] = value;
          best = std::max(best, value);
        }
        v_next[s] = best;
      }
      std::swap(v, v_next);
    }
    dirty_ = false;
    solved_once_ = true;
  }

  Game game_;
  Player me_;
  MbrlParams params_;
  int num_states_ = 0;
  int state_ = 0;
  long t_ = 0;
  double rmax_ = 0;
  double norm_ = 1;
  bool dirty_ = true;
  bool solved_once_ = false;
  std::vector<double> counts_;
  std::vector<double> q_;
};

}  // namespace cooplab
