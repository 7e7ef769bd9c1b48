#pragma once

// Transcript analyzers: how quickly a pairing settles into mutual cooperation,
// whether it stays there, and whether players do what they say.

#include <algorithm>
#include <optional>
#include <vector>

#include "json.hpp"

#include "cooplab/game.hpp"
#include "cooplab/signaling.hpp"
#include "cooplab/transcript.hpp"

namespace cooplab {

// Mutual cooperation is play inside the game's bargaining plan.
inline bool nbs_conformant(const JointPlan& nbs, JointAction ja) { return nbs.contains(ja); }

// Whether player `p` is responsible for a round that leaves the bargaining
// plan: its action appears in no plan cell, or the partner's action fits a
// plan cell that asks `p` for something else.
inline bool deviates(const JointPlan& nbs, Player p, JointAction ja) {
  if (nbs_conformant(nbs, ja)) return false;
  bool own_fits = false;
  bool blamed = false;
  for (auto c : nbs.cycle()) {
    if (c.of(p) == ja.of(p)) own_fits = true;
    if (c.of(other(p)) == ja.of(other(p)) && c.of(p) != ja.of(p)) blamed = true;
  }
  return !own_fits || blamed;
}

struct CooperationOutcome {
  // Second round of the first pair of consecutive conformant rounds; game
  // length + 1 when that never happens.
  int rounds_to_cc = 0;
  bool reached = false;
  bool loyal = false;                // no non-conformant round afterwards
  std::array<bool, 2> player_loyal{};  // per player, by deviates()
};

inline CooperationOutcome cooperation_outcome(const Transcript& t, const JointPlan& nbs) {
  CooperationOutcome out;
  const auto& rec = t.records;
  out.rounds_to_cc = static_cast<int>(rec.size()) + 1;
  std::size_t start = rec.size();
  for (std::size_t i = 1; i < rec.size(); ++i) {
    if (nbs_conformant(nbs, rec[i - 1].joint) && nbs_conformant(nbs, rec[i].joint)) {
      out.rounds_to_cc = rec[i].round;
      out.reached = true;
      start = i + 1;
      break;
    }
  }
  if (!out.reached) return out;
  out.loyal = true;
  out.player_loyal = {true, true};
  for (std::size_t i = start; i < rec.size(); ++i) {
    if (!nbs_conformant(nbs, rec[i].joint)) out.loyal = false;
    for (Player p : {Player::Row, Player::Col}) {
      if (deviates(nbs, p, rec[i].joint)) out.player_loyal[index(p)] = false;
    }
  }
  return out;
}

struct CooperationStats {
  std::vector<int> rounds_to_cc;  // per transcript, censored at length + 1
  std::vector<bool> reached;
  std::vector<bool> loyal;
  int horizon = 0;  // longest transcript

  // Fraction of transcripts with rounds_to_cc <= k.
  double cdf(int k) const {
    if (rounds_to_cc.empty()) return 0;
    long n = std::count_if(rounds_to_cc.begin(), rounds_to_cc.end(), [&](int r) { return r <= k; });
    return static_cast<double>(n) / static_cast<double>(rounds_to_cc.size());
  }
  int reached_count() const { return static_cast<int>(std::count(reached.begin(), reached.end(), true)); }
  // Among transcripts that reached mutual cooperation; absent when none did.
  std::optional<double> loyalty() const {
    int n = 0, l = 0;
    for (std::size_t i = 0; i < reached.size(); ++i) {
      if (!reached[i]) continue;
      ++n;
      if (loyal[i]) ++l;
    }
    if (n == 0) return std::nullopt;
    return static_cast<double>(l) / n;
  }
  std::vector<double> cdf_curve() const {
    std::vector<double> out;
    for (int k = 1; k <= horizon + 1; ++k) out.push_back(cdf(k));
    return out;
  }
};

// Uses `g`'s bargaining plan for every transcript.
inline CooperationStats cooperation_stats(const std::vector<Transcript>& transcripts, const Game& g) {
  const JointPlan nbs = nash_bargaining(g).plan;
  CooperationStats s;
  for (const auto& t : transcripts) {
    auto o = cooperation_outcome(t, nbs);
    s.rounds_to_cc.push_back(o.rounds_to_cc);
    s.reached.push_back(o.reached);
    s.loyal.push_back(o.loyal);
    s.horizon = std::max(s.horizon, static_cast<int>(t.records.size()));
  }
  return s;
}

// Each transcript judged against its own game.
inline CooperationStats cooperation_stats(const std::vector<Transcript>& transcripts) {
  CooperationStats s;
  for (const auto& t : transcripts) {
    auto o = cooperation_outcome(t, nash_bargaining(t.game).plan);
    s.rounds_to_cc.push_back(o.rounds_to_cc);
    s.reached.push_back(o.reached);
    s.loyal.push_back(o.loyal);
    s.horizon = std::max(s.horizon, static_cast<int>(t.records.size()));
  }
  return s;
}

struct Fidelity {
  std::array<bool, 2> loyal{};
  std::array<std::optional<double>, 2> honest;
  std::array<int, 2> committed_rounds{};
};

// A plan a player committed to and the rounds it covered, [begin, end).
struct Commitment {
  JointPlan plan;
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline std::vector<Commitment> commitments(const Transcript& t, Player p) {
  std::vector<Commitment> out;
  const auto& rec = t.records;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const auto& sent = p == Player::Row ? rec[i].messages_a : rec[i].messages_b;
    const SpeechAct* last = nullptr;
    for (const auto& a : sent) {
      const auto& e = catalog_entry(a.id);
      if (e.category == ActCategory::Plans && e.endorses_plan && a.plan) last = &a;
    }
    if (!last) continue;
    if (!out.empty() && out.back().end > i) out.back().end = i;
    std::size_t end = last->id == acts::kProposeOneShot ? i + 1 : rec.size();
    out.push_back({*last->plan, i, end});
  }
  return out;
}

// Honesty scores each commitment under the cyclic phase that fits it best,
// since an accepted alternation may start on either of its cells.
inline Fidelity analyze_fidelity(const Transcript& t) {
  Fidelity f;
  const JointPlan nbs = nash_bargaining(t.game).plan;
  auto co = cooperation_outcome(t, nbs);
  f.loyal = co.reached ? co.player_loyal : std::array<bool, 2>{false, false};
  for (Player p : {Player::Row, Player::Col}) {
    int matched = 0, total = 0;
    for (const auto& c : commitments(t, p)) {
      const std::size_t len = c.plan.length();
      int best = 0;
      for (std::size_t shift = 0; shift < len; ++shift) {
        int m = 0;
        for (std::size_t i = c.begin; i < c.end; ++i) {
          if (t.records[i].joint.of(p) == c.plan.at((i - c.begin + shift) % len).of(p)) ++m;
        }
        best = std::max(best, m);
      }
      matched += best;
      total += static_cast<int>(c.end - c.begin);
    }
    f.committed_rounds[index(p)] = total;
    if (total > 0) f.honest[index(p)] = static_cast<double>(matched) / total;
  }
  return f;
}

inline nlohmann::json to_json(const Fidelity& f) {
  auto honest = [](const std::optional<double>& h) { return h ? nlohmann::json(*h) : nlohmann::json(nullptr); };
  return {{"loyal", f.loyal},
          {"honest", {honest(f.honest[0]), honest(f.honest[1])}},
          {"committed_rounds", f.committed_rounds}};
}

inline nlohmann::json to_json(const CooperationStats& s) {
  auto loyalty = s.loyalty();
  return {{"transcripts", s.rounds_to_cc.size()},
          {"rounds_to_cc", s.rounds_to_cc},
          {"reached", s.reached_count()},
          {"loyalty", loyalty ? nlohmann::json(*loyalty) : nlohmann::json(nullptr)},
          {"cdf", s.cdf_curve()}};
}

}  // namespace cooplab
