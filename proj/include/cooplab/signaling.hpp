#pragma once

// Cheap-talk vocabulary: the fixed catalog of speech acts, plan payloads, and
// the game-generic speech state machines that experts use to narrate what they
// are doing.

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cooplab/error.hpp"
#include "cooplab/game.hpp"

namespace cooplab {

enum class ActCategory : std::uint8_t { Plans, Threats, Praise, Hate, Other };

inline std::string_view to_string(ActCategory c) {
  switch (c) {
    case ActCategory::Plans: return "Plans";
    case ActCategory::Threats: return "Threats";
    case ActCategory::Praise: return "Praise";
    case ActCategory::Hate: return "Hate";
    case ActCategory::Other: return "Other";
  }
  return "Other";
}

// Shape a Plans act's payload must have.
enum class PayloadKind : std::uint8_t { None, Cell, Alternation, Plan };

inline std::string_view to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::None: return "none";
    case PayloadKind::Cell: return "cell";
    case PayloadKind::Alternation: return "alternation";
    case PayloadKind::Plan: return "plan";
  }
  return "none";
}

struct CatalogEntry {
  int id;
  std::string_view key;
  ActCategory category;
  std::string_view text;  // "{plan}" is replaced by the payload
  PayloadKind payload;
  bool endorses_plan;     // the sender commits to the payload plan
};

namespace acts {
inline constexpr int kProposeStationary = 0;
inline constexpr int kProposeAlternation = 1;
inline constexpr int kProposeOneShot = 2;
inline constexpr int kAccept = 3;
inline constexpr int kReject = 4;
inline constexpr int kTrySomethingElse = 5;
inline constexpr int kDoAsISay = 6;
inline constexpr int kLastWarning = 7;
inline constexpr int kPunishingNow = 8;
inline constexpr int kExcellent = 9;
inline constexpr int kBothWinning = 10;
inline constexpr int kThanks = 11;
inline constexpr int kGoodDeal = 12;
inline constexpr int kBetrayed = 13;
inline constexpr int kCurseYou = 14;
inline constexpr int kInYourFace = 15;
inline constexpr int kChangingStrategy = 16;
inline constexpr int kForgiveYou = 17;
inline constexpr int kDoBetter = 18;
}  // namespace acts

inline constexpr int kCatalogSize = 19;
inline constexpr int kCatalogVersion = 1;
inline constexpr std::size_t kMaxActsPerRound = 3;

inline constexpr std::array<CatalogEntry, kCatalogSize> kCatalog = {{
    {0, "propose_stationary", ActCategory::Plans, "Let's play {plan} every round.", PayloadKind::Cell, true},
    {1, "propose_alternation", ActCategory::Plans, "Let's take turns: {plan}.", PayloadKind::Alternation, true},
    {2, "propose_one_shot", ActCategory::Plans, "This round, let's play {plan}.", PayloadKind::Cell, true},
    {3, "accept", ActCategory::Plans, "I accept your proposal {plan}.", PayloadKind::Plan, true},
    {4, "reject", ActCategory::Plans, "I don't accept {plan}.", PayloadKind::Plan, false},
    {5, "try_something_else", ActCategory::Plans, "Let's try something other than {plan}.", PayloadKind::Plan, false},
    {6, "do_as_i_say", ActCategory::Threats, "Do as I say, or I'll punish you.", PayloadKind::None, false},
    {7, "last_warning", ActCategory::Threats, "This is your last warning.", PayloadKind::None, false},
    {8, "punishing_now", ActCategory::Threats, "I am punishing you now.", PayloadKind::None, false},
    {9, "excellent", ActCategory::Praise, "Excellent!", PayloadKind::None, false},
    {10, "both_winning", ActCategory::Praise, "Nice. We're both winning.", PayloadKind::None, false},
    {11, "thanks", ActCategory::Praise, "Thanks.", PayloadKind::None, false},
    {12, "good_deal", ActCategory::Praise, "Good deal.", PayloadKind::None, false},
    {13, "betrayed", ActCategory::Hate, "You betrayed me.", PayloadKind::None, false},
    {14, "curse_you", ActCategory::Hate, "Curse you.", PayloadKind::None, false},
    {15, "in_your_face", ActCategory::Hate, "In your face!", PayloadKind::None, false},
    {16, "changing_strategy", ActCategory::Other, "I'm changing my strategy.", PayloadKind::None, false},
    {17, "forgive_you", ActCategory::Other, "I forgive you.", PayloadKind::None, false},
    {18, "do_better", ActCategory::Other, "We can both do better than this.", PayloadKind::None, false},
}};

inline const CatalogEntry& catalog_entry(int id) {
  if (id < 0 || id >= kCatalogSize) {
    throw Error(ErrorCode::UnknownAct, "speech act id " + std::to_string(id) + " is outside 0..18");
  }
  return kCatalog[static_cast<std::size_t>(id)];
}

inline ActCategory categorize(int id) { return catalog_entry(id).category; }

struct SpeechAct {
  int id = 0;
  std::optional<JointPlan> plan;

  ActCategory category() const { return categorize(id); }

  friend bool operator==(const SpeechAct&, const SpeechAct&) = default;
};

// Throws UnknownAct or MalformedPayload when the act does not fit the catalog.
inline void validate(const SpeechAct& act) {
  const auto& entry = catalog_entry(act.id);
  if (entry.payload == PayloadKind::None) {
    if (act.plan) throw Error(ErrorCode::MalformedPayload, std::string(entry.key) + " takes no payload");
    return;
  }
  if (!act.plan) throw Error(ErrorCode::MalformedPayload, std::string(entry.key) + " requires a plan payload");
  const std::size_t n = act.plan->length();
  if ((entry.payload == PayloadKind::Cell && n != 1) || (entry.payload == PayloadKind::Alternation && n != 2)) {
    throw Error(ErrorCode::MalformedPayload, std::string(entry.key) + " payload has the wrong length");
  }
}

inline SpeechAct propose(const JointPlan& plan) {
  return {plan.length() == 1 ? acts::kProposeStationary
          : plan.length() == 2 ? acts::kProposeAlternation
                               : acts::kAccept,
          plan};
}

inline SpeechAct plain_act(int id) { return {id, std::nullopt}; }

inline std::string render(const SpeechAct& act) {
  std::string text(catalog_entry(act.id).text);
  auto pos = text.find("{plan}");
  if (pos != std::string::npos) text.replace(pos, 6, act.plan ? act.plan->to_string() : "?");
  return text;
}

// The plan of the most recent act that commits its sender to a plan, if any.
inline std::optional<JointPlan> interpret_plan(std::span<const SpeechAct> acts) {
  for (auto it = acts.rbegin(); it != acts.rend(); ++it) {
    const auto& entry = catalog_entry(it->id);
    if (entry.category == ActCategory::Plans && entry.endorses_plan && it->plan) return it->plan;
  }
  return std::nullopt;
}

// Keep at most `limit` acts, Plans acts first, preserving the original order.
inline std::vector<SpeechAct> limit_acts(const std::vector<SpeechAct>& acts, std::size_t limit = kMaxActsPerRound) {
  if (acts.size() <= limit) return acts;
  std::vector<bool> keep(acts.size(), false);
  std::size_t kept = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < acts.size() && kept < limit; ++i) {
      bool is_plan = acts[i].category() == ActCategory::Plans;
      if (!keep[i] && (pass == 1 || is_plan)) {
        keep[i] = true;
        ++kept;
      }
    }
  }
  std::vector<SpeechAct> out;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    if (keep[i]) out.push_back(acts[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Speech state machines

enum class SpeechState : std::uint8_t { Propose, Cooperating, Punishing, Acquiescing, Renewing };

enum class SpeechEvent : std::uint8_t {
  RoundStartFirst,
  PartnerComplied,
  PartnerDeviated,
  PunishmentStart,
  PunishmentEnd,
  ExpertSwitched,
  ProposalReceived,
};

inline constexpr std::array<SpeechState, 5> kAllSpeechStates = {
    SpeechState::Propose, SpeechState::Cooperating, SpeechState::Punishing, SpeechState::Acquiescing,
    SpeechState::Renewing};
inline constexpr std::array<SpeechEvent, 7> kAllSpeechEvents = {
    SpeechEvent::RoundStartFirst, SpeechEvent::PartnerComplied, SpeechEvent::PartnerDeviated,
    SpeechEvent::PunishmentStart, SpeechEvent::PunishmentEnd,   SpeechEvent::ExpertSwitched,
    SpeechEvent::ProposalReceived};

// Which table an expert speaks from.
enum class SpeechRole : std::uint8_t {
  Leader,       // demands a target plan and enforces it
  Follower,     // goes along with what the partner wants
  Independent,  // no plan to talk about
};

struct SpeechFsmState {
  SpeechState state = SpeechState::Propose;
  int complied_streak = 0;

  friend bool operator==(const SpeechFsmState&, const SpeechFsmState&) = default;
};

struct SpeechInput {
  SpeechEvent event;
  // Partner's proposal, for ProposalReceived.
  std::optional<JointPlan> proposal;
  // Whether the speaking expert goes along with that proposal.
  bool proposal_congruent = false;
};

struct SpeechOutput {
  SpeechFsmState next;
  std::vector<SpeechAct> acts;
};

inline SpeechOutput emit_speech(SpeechRole role, const std::optional<JointPlan>& target, SpeechFsmState s,
                                const SpeechInput& in) {
  SpeechOutput out{s, {}};
  auto& acts = out.acts;
  auto& next = out.next;
  auto say_target = [&] {
    if (target) acts.push_back(propose(*target));
  };
  auto echo_proposal = [&](int id) {
    if (in.proposal) acts.push_back({id, in.proposal});
  };

  switch (in.event) {
    case SpeechEvent::RoundStartFirst:
      next = {role == SpeechRole::Follower ? SpeechState::Acquiescing : SpeechState::Propose, 0};
      if (role != SpeechRole::Independent) say_target();
      break;

    case SpeechEvent::ExpertSwitched:
      next = {role == SpeechRole::Follower ? SpeechState::Acquiescing : SpeechState::Propose, 0};
      acts.push_back(plain_act(acts::kChangingStrategy));
      if (role != SpeechRole::Independent) say_target();
      break;

    case SpeechEvent::PartnerComplied:
      next.complied_streak = s.complied_streak + 1;
      if (role == SpeechRole::Leader) {
        if (s.state != SpeechState::Punishing) next.state = SpeechState::Cooperating;
      } else if (role == SpeechRole::Follower) {
        next.state = SpeechState::Acquiescing;
      }
      if (next.complied_streak == 3) {
        acts.push_back(plain_act(role == SpeechRole::Leader     ? acts::kBothWinning
                                 : role == SpeechRole::Follower ? acts::kThanks
                                                                : acts::kGoodDeal));
      }
      break;

    case SpeechEvent::PartnerDeviated:
      next.complied_streak = 0;
      if (role == SpeechRole::Leader) {
        if (s.state != SpeechState::Punishing) {
          acts.push_back(plain_act(acts::kBetrayed));
          acts.push_back(plain_act(acts::kPunishingNow));
        }
        next.state = SpeechState::Punishing;
      } else if (role == SpeechRole::Follower) {
        next.state = SpeechState::Acquiescing;
        acts.push_back(plain_act(acts::kDoBetter));
      }
      break;

    case SpeechEvent::PunishmentStart:
      next.complied_streak = 0;
      if (role == SpeechRole::Leader) {
        if (s.state != SpeechState::Punishing) acts.push_back(plain_act(acts::kPunishingNow));
        next.state = SpeechState::Punishing;
      }
      break;

    case SpeechEvent::PunishmentEnd:
      if (role == SpeechRole::Leader) {
        next.state = SpeechState::Renewing;
        acts.push_back(plain_act(acts::kForgiveYou));
        say_target();
      }
      break;

    case SpeechEvent::ProposalReceived:
      if (role == SpeechRole::Independent) {
        echo_proposal(acts::kReject);
      } else if (in.proposal_congruent) {
        echo_proposal(acts::kAccept);
        if (role == SpeechRole::Leader) {
          acts.push_back(plain_act(acts::kGoodDeal));
          if (s.state == SpeechState::Propose || s.state == SpeechState::Renewing) {
            next.state = SpeechState::Cooperating;
          }
        }
      } else {
        echo_proposal(acts::kReject);
        if (role == SpeechRole::Leader) {
          acts.push_back(plain_act(acts::kDoAsISay));
          say_target();
        } else {
          acts.push_back(plain_act(acts::kDoBetter));
        }
      }
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const SpeechAct& act) {
  j = nlohmann::json{{"id", act.id}};
  if (act.plan) j["plan"] = *act.plan;
}

// Parses and validates; throws UnknownAct or MalformedPayload.
inline void from_json(const nlohmann::json& j, SpeechAct& act) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer()) {
    throw Error(ErrorCode::MalformedPayload, "speech act must be an object with an integer id");
  }
  act.id = j["id"].get<int>();
  act.plan.reset();
  if (j.contains("plan") && !j["plan"].is_null()) act.plan = j["plan"].get<JointPlan>();
  validate(act);
}

inline nlohmann::json catalog_json() {
  auto entries = nlohmann::json::array();
  for (const auto& e : kCatalog) {
    entries.push_back({{"id", e.id},
                       {"key", e.key},
                       {"category", to_string(e.category)},
                       {"template", e.text},
                       {"payload", to_string(e.payload)},
                       {"endorses_plan", e.endorses_plan}});
  }
  return {{"version", kCatalogVersion},
          {"max_acts_per_round", kMaxActsPerRound},
          {"categories", {"Plans", "Threats", "Praise", "Hate", "Other"}},
          {"acts", entries}};
}

}  // namespace cooplab
