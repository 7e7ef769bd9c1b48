#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cooplab/game.hpp"
#include "cooplab/signaling.hpp"

namespace cooplab {

// What both players learn at the end of a round.
struct Outcome {
  int round = 0;  // 1-based
  JointAction joint;
  PayoffPair payoffs{};
};

// A player in a repeated 2x2 game. Per round the match loop calls speak()
// (when talk is on), then hear() with the partner's acts, then act(), then
// observe() with the revealed outcome. Implementations own their randomness.
class Agent {
 public:
  explicit Agent(Player role) : role_(role) {}
  virtual ~Agent() = default;

  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  Player role() const { return role_; }

  virtual std::vector<SpeechAct> speak(int /*round*/) { return {}; }
  virtual void hear(int /*round*/, std::span<const SpeechAct> /*acts*/) {}
  virtual Action act(int round) = 0;
  virtual void observe(const Outcome& outcome) = 0;

 protected:
  Action mine(const Outcome& o) const { return o.joint.of(role_); }
  Action theirs(const Outcome& o) const { return o.joint.of(other(role_)); }
  double my_payoff(const Outcome& o) const { return o.payoffs[index(role_)]; }

 private:
  Player role_;
};

using AgentPtr = std::unique_ptr<Agent>;

}  // namespace cooplab
