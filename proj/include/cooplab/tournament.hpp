#pragma once

// Matches, round robins and result files.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cooplab/analysis.hpp"
#include "cooplab/baselines.hpp"
#include "cooplab/error.hpp"
#include "cooplab/experts.hpp"
#include "cooplab/game.hpp"
#include "cooplab/metrics.hpp"
#include "cooplab/rng.hpp"
#include "cooplab/transcript.hpp"

namespace cooplab {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

struct MatchConfig {
  Game game;
  BaselineSpec agent_a;  // row player
  BaselineSpec agent_b;  // column player
  int rounds = 100;
  bool talk = false;
  std::uint64_t seed = 0;
};

// Seat 1 is the row player, seat 2 the column player.
inline std::uint64_t agent_seed(std::uint64_t match_seed, const BaselineSpec& spec, int seat) {
  return mix_seed(match_seed ^ spec.seed, static_cast<std::uint64_t>(seat));
}

inline nlohmann::json match_metadata(const MatchConfig& cfg) {
  return {{"agent_a", baseline_metadata(cfg.agent_a)},
          {"agent_b", baseline_metadata(cfg.agent_b)},
          {"version", kArtifactVersion},
          {"catalog_version", kCatalogVersion}};
}

inline Transcript run_match(const MatchConfig& cfg) {
  auto a_spec = cfg.agent_a;
  auto b_spec = cfg.agent_b;
  a_spec.seed = agent_seed(cfg.seed, cfg.agent_a, 1);
  b_spec.seed = agent_seed(cfg.seed, cfg.agent_b, 2);
  auto a = instantiate_baseline(a_spec, cfg.game, Player::Row, cfg.talk);
  auto b = instantiate_baseline(b_spec, cfg.game, Player::Col, cfg.talk);
  Transcript t = play_match(cfg.game, *a, *b, cfg.rounds, cfg.talk);
  t.agent_a = cfg.agent_a.name;
  t.agent_b = cfg.agent_b.name;
  t.seed = cfg.seed;
  t.metadata = match_metadata(cfg);
  return t;
}

// Depends only on names, the game and the trial, so reordering the roster does
// not change any match.
inline std::uint64_t match_seed(std::uint64_t master, const std::string& row, const std::string& col,
                                const Game& g, int trial) {
  std::string key = row + "|" + col + "|" + g.label() + "|" + std::to_string(trial);
  return mix_seed(master, fnv1a(key));
}

// ---------------------------------------------------------------------------
// Compact transcripts: one JSON object per line, actions as cell digits.

inline nlohmann::json compact_transcript(const Transcript& t) {
  std::string cells;
  cells.reserve(t.records.size());
  for (const auto& r : t.records) cells.push_back(static_cast<char>('0' + r.joint.cell()));
  nlohmann::json j{{"agent_a", t.agent_a}, {"agent_b", t.agent_b}, {"game", t.game},
                   {"rounds", t.rounds},   {"talk", t.talk},       {"seed", t.seed},
                   {"trial", t.trial},     {"catalog_version", kCatalogVersion},
                   {"metadata", t.metadata}, {"cells", cells}};
  if (t.talk) {
    auto msgs = nlohmann::json::array();
    for (const auto& r : t.records) msgs.push_back({r.messages_a, r.messages_b});
    j["messages"] = msgs;
  }
  return j;
}

inline Transcript expand_transcript(const nlohmann::json& j) {
  try {
    if (!j.contains("cells")) return j.get<Transcript>();
    Transcript t;
    t.game = j.at("game").get<Game>();
    t.agent_a = j.value("agent_a", std::string{});
    t.agent_b = j.value("agent_b", std::string{});
    t.rounds = j.at("rounds").get<int>();
    t.talk = j.value("talk", false);
    t.seed = j.value("seed", std::uint64_t{0});
    t.trial = j.value("trial", 0);
    t.metadata = j.value("metadata", nlohmann::json::object());
    const auto cells = j.at("cells").get<std::string>();
    const nlohmann::json* msgs = j.contains("messages") ? &j.at("messages") : nullptr;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      int c = cells[i] - '0';
      if (c < 0 || c > 3) throw Error(ErrorCode::MalformedPayload, "bad cell digit in transcript");
      RoundRecord r;
      r.round = static_cast<int>(i) + 1;
      r.joint = JointAction::from_cell(c);
      r.payoffs = t.game.payoffs(r.joint);
      if (msgs) {
        r.messages_a = msgs->at(i).at(0).get<std::vector<SpeechAct>>();
        r.messages_b = msgs->at(i).at(1).get<std::vector<SpeechAct>>();
      }
      t.records.push_back(std::move(r));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedPayload, std::string("bad transcript: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Round robin

struct RoundRobinConfig {
  std::vector<BaselineSpec> roster;
  std::vector<Game> games;
  int rounds = 100;
  int trials = 1;
  bool talk = false;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: COOPLAB_WORKERS, else the hardware thread count
  bool keep_transcripts = false;
};

struct MatchResult {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t game = 0;
  int trial = 0;
  PayoffPair mean{};
};

struct RoundRobinResult {
  PayoffTensor tensor;
  std::vector<MatchResult> matches;   // in work order
  std::vector<std::string> transcripts;  // compact JSON lines, work order
};

inline int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COOPLAB_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline PayoffTensor assemble_tensor(const std::vector<std::string>& agents, std::size_t games, std::size_t trials,
                                    const std::vector<MatchResult>& matches) {
  PayoffTensor t(agents, games, trials);
  const std::size_t n = agents.size();
  std::vector<double> row_payoff(n * n * games * trials, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> col_payoff(row_payoff.size(), std::numeric_limits<double>::quiet_NaN());
  auto idx = [&](std::size_t i, std::size_t j, std::size_t g, std::size_t tr) {
    return ((i * n + j) * games + g) * trials + tr;
  };
  for (const auto& m : matches) {
    if (m.row >= n || m.col >= n || m.game >= games || m.trial < 0 || static_cast<std::size_t>(m.trial) >= trials) {
      throw Error(ErrorCode::IncompleteTensor, "match outside the tensor");
    }
    auto k = idx(m.row, m.col, m.game, static_cast<std::size_t>(m.trial));
    row_payoff[k] = m.mean[0];
    col_payoff[k] = m.mean[1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t g = 0; g < games; ++g) {
        for (std::size_t tr = 0; tr < trials; ++tr) {
          double as_row = row_payoff[idx(i, j, g, tr)];
          double as_col = col_payoff[idx(j, i, g, tr)];
          if (!std::isfinite(as_row) || !std::isfinite(as_col)) {
            throw Error(ErrorCode::IncompleteTensor, "missing match " + agents[i] + " vs " + agents[j] + ", game " +
                                                         std::to_string(g) + ", trial " + std::to_string(tr));
          }
          t.at(i, j, g, tr) = 0.5 * (as_row + as_col);
        }
      }
    }
  }
  return t;
}

inline RoundRobinResult run_round_robin(const RoundRobinConfig& cfg) {
  const std::size_t n = cfg.roster.size();
  if (n < 2) throw Error(ErrorCode::BadRequest, "round robin needs at least two agents");
  if (cfg.trials < 1) throw Error(ErrorCode::BadRequest, "trials must be at least 1");
  if (cfg.games.empty()) throw Error(ErrorCode::BadRequest, "no games");
  std::vector<std::string> names;
  for (const auto& s : cfg.roster) {
    require_baseline(s.name);
    if (std::find(names.begin(), names.end(), s.name) != names.end()) {
      throw Error(ErrorCode::BadRequest, "duplicate roster entry '" + s.name + "'");
    }
    names.push_back(s.name);
  }

  struct Unit {
    std::size_t row, col, game;
    int trial;
  };
  std::vector<Unit> work;
  for (std::size_t g = 0; g < cfg.games.size(); ++g) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (int t = 0; t < cfg.trials; ++t) work.push_back({i, j, g, t});
      }
    }
  }

  RoundRobinResult out;
  out.matches.resize(work.size());
  if (cfg.keep_transcripts) out.transcripts.resize(work.size());
  std::vector<std::optional<Error>> errors(work.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < work.size(); k = next++) {
      const auto& u = work[k];
      MatchConfig mc{cfg.games[u.game], cfg.roster[u.row], cfg.roster[u.col], cfg.rounds, cfg.talk,
                     match_seed(cfg.seed, names[u.row], names[u.col], cfg.games[u.game], u.trial)};
      try {
        Transcript t = run_match(mc);
        t.trial = u.trial;
        t.metadata["game_index"] = u.game;
        out.matches[k] = {u.row, u.col, u.game, u.trial, {t.mean_payoff(Player::Row), t.mean_payoff(Player::Col)}};
        if (cfg.keep_transcripts) out.transcripts[k] = compact_transcript(t).dump();
      } catch (const Error& e) {
        errors[k] = Error(e.code(), names[u.row] + " vs " + names[u.col] + ", game " + std::to_string(u.game) +
                                        ", trial " + std::to_string(u.trial) + ": " + e.what());
      }
    }
  };
  const int threads = std::min<int>(worker_count(cfg.workers), static_cast<int>(work.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) throw *e;
  }
  out.tensor = assemble_tensor(names, cfg.games.size(), static_cast<std::size_t>(cfg.trials), out.matches);
  return out;
}

// Tie-break positions: registry order, then roster order for anything else.
inline std::vector<std::size_t> registry_tie_order(const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back(registry_rank(names[i]) * names.size() + i);
  return out;
}

inline std::vector<MetricReport> compute_metrics(const PayoffTensor& t) {
  return compute_metrics(t, registry_tie_order(t.agents()));
}

// ---------------------------------------------------------------------------
// Game samples

inline int pure_nash_count(const Game& g) { return static_cast<int>(pure_nash_equilibria(g).size()); }

// A deterministic sample of `k` games from `pool`, stratified by the number of
// pure equilibria and by whether the bargaining plan is a single cell. Strata
// get seats in proportion to their size (largest remainder) and members are
// taken at evenly spaced positions.
inline std::vector<Game> stratified_sample(const std::vector<Game>& pool, std::size_t k) {
  if (k >= pool.size()) return pool;
  std::map<std::pair<int, bool>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    strata[{pure_nash_count(pool[i]), nash_bargaining(pool[i]).plan.length() == 1}].push_back(i);
  }
  std::vector<std::pair<std::pair<int, bool>, std::size_t>> seats;
  std::vector<std::pair<double, std::pair<int, bool>>> remainders;
  std::size_t given = 0;
  for (const auto& [key, members] : strata) {
    double share = static_cast<double>(k) * static_cast<double>(members.size()) / static_cast<double>(pool.size());
    auto whole = static_cast<std::size_t>(share);
    seats.push_back({key, whole});
    given += whole;
    remainders.push_back({share - static_cast<double>(whole), key});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; given < k && r < remainders.size(); ++r, ++given) {
    for (auto& s : seats) {
      if (s.first == remainders[r].second) ++s.second;
    }
  }
  std::vector<std::size_t> chosen;
  for (const auto& [key, count] : seats) {
    const auto& members = strata[key];
    for (std::size_t c = 0; c < count; ++c) {
      chosen.push_back(members[(2 * c + 1) * members.size() / (2 * count)]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Game> out;
  for (auto i : chosen) out.push_back(pool[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Result files

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string rankings_csv(const PayoffTensor& t, const std::vector<MetricReport>& reports) {
  std::ostringstream os;
  os << "agent";
  for (const auto& r : reports) os << "," << r.metric;
  for (const auto& r : reports) os << "," << r.metric << "_rank";
  os << "\n";
  for (std::size_t i = 0; i < t.num_agents(); ++i) {
    os << t.agents()[i];
    for (const auto& r : reports) os << "," << format_number(r.scores[i]);
    for (const auto& r : reports) os << "," << r.ranks[i];
    os << "\n";
  }
  return os.str();
}

inline std::string tensor_csv(const PayoffTensor& t) {
  std::ostringstream os;
  os << "agent,partner,game,trial,mean_payoff\n";
  for (std::size_t i = 0; i < t.num_agents(); ++i) {
    for (std::size_t j = 0; j < t.num_agents(); ++j) {
      for (std::size_t g = 0; g < t.num_games(); ++g) {
        for (std::size_t tr = 0; tr < t.num_trials(); ++tr) {
          os << t.agents()[i] << "," << t.agents()[j] << "," << g << "," << tr << "," << format_number(t.at(i, j, g, tr))
             << "\n";
        }
      }
    }
  }
  return os.str();
}

// Every tunable that shapes results.
inline nlohmann::json design_parameters() {
  nlohmann::json baselines = nlohmann::json::object();
  for (const auto& info : baseline_registry()) baselines[info.name] = baseline_metadata({info.name, {}, 0, {}});
  MetaConfig meta;
  MbrlParams mbrl;
  return {{"baselines", baselines},
          {"meta_defaults", meta},
          {"experts",
           {{"max_punish_rounds", kMaxPunishRounds},
            {"compliance_retention", kComplianceRetention},
            {"mbrl_horizon", mbrl.horizon},
            {"mbrl_discount", mbrl.discount}}},
          {"replicator", {{"steps", kReplicatorSteps}, {"extinction_threshold", kExtinctionThreshold}}},
          {"tensor", "mean per-round payoff of agent vs partner, averaged over both seatings"},
          {"metrics", metric_names()},
          {"tie_break", "registry order"},
          {"match_seed", "splitmix(master ^ splitmix(fnv1a(row|col|game|trial)))"},
          {"mutual_cooperation", "play inside the game's Nash bargaining plan"}};
}

struct TournamentSpec {
  std::vector<BaselineSpec> roster;
  std::vector<Game> games;
  std::vector<int> lengths = {100, 1000};
  int trials = 10;
  bool talk = false;
  std::uint64_t seed = 0;
  int workers = 0;
  bool keep_transcripts = true;
};

inline nlohmann::json tournament_metadata(const TournamentSpec& s) {
  auto roster = nlohmann::json::array();
  for (const auto& r : s.roster) roster.push_back(baseline_metadata(r));
  return {{"version", kArtifactVersion},
          {"catalog_version", kCatalogVersion},
          {"roster", roster},
          {"games", s.games},
          {"lengths", s.lengths},
          {"trials", s.trials},
          {"talk", s.talk},
          {"seed", s.seed},
          {"design", design_parameters()}};
}

struct TournamentRun {
  int rounds = 0;
  RoundRobinResult result;
  std::vector<MetricReport> reports;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void export_results(const std::filesystem::path& dir, const TournamentSpec& spec,
                           const std::vector<TournamentRun>& runs) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "metadata.json", tournament_metadata(spec).dump(2) + "\n");
  for (const auto& run : runs) {
    const std::string suffix = "_" + std::to_string(run.rounds);
    write_file(dir / ("rankings" + suffix + ".csv"), rankings_csv(run.result.tensor, run.reports));
    write_file(dir / ("tensor" + suffix + ".csv"), tensor_csv(run.result.tensor));
    if (!run.result.transcripts.empty()) {
      std::ofstream out(dir / ("transcripts" + suffix + ".jsonl"), std::ios::binary);
      if (!out) throw Error(ErrorCode::IoError, "cannot write transcripts");
      for (const auto& line : run.result.transcripts) out << line << "\n";
    }
  }
}

inline std::vector<TournamentRun> run_tournament(const TournamentSpec& spec) {
  std::vector<TournamentRun> runs;
  for (int rounds : spec.lengths) {
    RoundRobinConfig cfg{spec.roster, spec.games, rounds, spec.trials, spec.talk, spec.seed, spec.workers,
                         spec.keep_transcripts};
    TournamentRun run;
    run.rounds = rounds;
    run.result = run_round_robin(cfg);
    run.reports = compute_metrics(run.result.tensor);
    runs.push_back(std::move(run));
  }
  return runs;
}

struct StoredRun {
  int rounds = 0;
  PayoffTensor tensor;
  std::vector<MetricReport> reports;
  std::vector<Transcript> transcripts;
};

// Rebuilds tensors and metrics from the transcript files in `dir`.
inline std::vector<StoredRun> analyze_directory(const std::filesystem::path& dir) {
  auto meta = nlohmann::json::parse(read_file(dir / "metadata.json"), nullptr, false);
  if (meta.is_discarded()) throw Error(ErrorCode::MalformedPayload, "metadata.json is not valid JSON");
  std::vector<std::string> names;
  for (const auto& r : meta.at("roster")) names.push_back(r.at("name").get<std::string>());
  const auto games = meta.at("games").get<std::vector<Game>>();
  const int trials = meta.at("trials").get<int>();
  std::vector<StoredRun> out;
  for (int rounds : meta.at("lengths").get<std::vector<int>>()) {
    StoredRun run;
    run.rounds = rounds;
    std::ifstream in(dir / ("transcripts_" + std::to_string(rounds) + ".jsonl"));
    if (!in) throw Error(ErrorCode::IoError, "no transcripts for length " + std::to_string(rounds));
    std::vector<MatchResult> matches;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::MalformedPayload, "bad transcript line");
      Transcript t = expand_transcript(j);
      auto pos = [&](const std::string& n) {
        auto it = std::find(names.begin(), names.end(), n);
        if (it == names.end()) throw Error(ErrorCode::MalformedPayload, "transcript names unknown agent " + n);
        return static_cast<std::size_t>(it - names.begin());
      };
      std::size_t g = t.metadata.value("game_index", std::size_t{0});
      matches.push_back({pos(t.agent_a), pos(t.agent_b), g, t.trial,
                         {t.mean_payoff(Player::Row), t.mean_payoff(Player::Col)}});
      run.transcripts.push_back(std::move(t));
    }
    run.tensor = assemble_tensor(names, games.size(), static_cast<std::size_t>(trials), matches);
    run.reports = compute_metrics(run.tensor);
    out.push_back(std::move(run));
  }
  return out;
}

inline std::vector<BaselineSpec> roster_from_names(const std::vector<std::string>& names) {
  std::vector<BaselineSpec> out;
  for (const auto& n : names) {
    require_baseline(n);
    out.push_back({n, {}, 0, std::nullopt});
  }
  return out;
}

}  // namespace cooplab
