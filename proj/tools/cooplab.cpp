// Command-line front end: tournaments, single matches, analysis and the play
// server.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include "cooplab/analysis.hpp"
#include "cooplab/baselines.hpp"
#include "cooplab/experts.hpp"
#include "cooplab/game.hpp"
#include "cooplab/http_service.hpp"
#include "cooplab/play_service.hpp"
#include "cooplab/signaling.hpp"
#include "cooplab/tournament.hpp"

using namespace cooplab;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "name" or "name:key=value,key=value"; "table=<path>" loads a mem1/mem2 table.
BaselineSpec parse_agent(const std::string& text) {
  BaselineSpec spec;
  auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (colon != std::string::npos) {
    for (const auto& kv : split(text.substr(colon + 1), ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::BadRequest, "expected key=value in '" + kv + "'");
      auto key = kv.substr(0, eq);
      auto value = kv.substr(eq + 1);
      if (key == "table") {
        spec.table = load_table_file(value);
      } else {
        try {
          spec.params[key] = std::stod(value);
        } catch (const std::exception&) {
          throw Error(ErrorCode::BadRequest, "parameter '" + key + "' is not a number");
        }
      }
    }
  }
  resolve_params(spec);
  return spec;
}

// Roster entries are separated by ';' when any carries parameters, else ','.
std::vector<BaselineSpec> parse_roster(const std::string& text) {
  if (text == "all") return roster_from_names([] {
      std::vector<std::string> n;
      for (const auto& i : baseline_registry()) n.push_back(i.name);
      return n;
    }());
  std::vector<BaselineSpec> out;
  for (const auto& item : split(text, text.find(';') != std::string::npos ? ';' : ',')) out.push_back(parse_agent(item));
  return out;
}

std::vector<Game> load_games(const std::string& what) {
  if (what == "periodic") return enumerate_periodic_table();
  if (what.rfind("sample", 0) == 0) {
    std::size_t k = what.size() > 6 ? std::stoul(what.substr(6)) : 20;
    return stratified_sample(enumerate_periodic_table(), k);
  }
  if (!fs::exists(what)) return {games::by_name(what)};
  auto j = nlohmann::json::parse(read_file(what), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidGame, what + " is not valid JSON");
  return games_from_json(j);
}

Game load_game(const std::string& what) {
  auto g = load_games(what);
  if (g.size() != 1) throw Error(ErrorCode::InvalidGame, "expected exactly one game in " + what);
  return g[0];
}

bool parse_switch(const std::string& s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw Error(ErrorCode::BadRequest, "expected on|off, got '" + s + "'");
}

void print_rankings(const PayoffTensor& t, const std::vector<MetricReport>& reports, int rounds) {
  std::cout << "# " << rounds << " rounds\n" << rankings_csv(t, reports);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated 2x2 game agents, tournaments and a play server"};
  app.require_subcommand(1);

  // tournament
  auto* tour = app.add_subcommand("tournament", "round robin over a roster and a game set");
  std::string roster = "all", games_arg = "sample20", rounds_arg = "100,1000", talk_arg = "off", out_dir;
  int trials = 10, workers = 0;
  std::uint64_t seed = 1;
  bool no_transcripts = false;
  tour->add_option("--roster", roster, "agent names (comma separated), or 'all'");
  tour->add_option("--games", games_arg, "periodic, sampleN, a built-in game name, or a JSON file");
  tour->add_option("--rounds", rounds_arg, "comma-separated game lengths");
  tour->add_option("--trials", trials, "trials per pairing and game");
  tour->add_option("--talk", talk_arg, "on|off");
  tour->add_option("--seed", seed, "master seed");
  tour->add_option("--workers", workers, "worker threads (default: COOPLAB_WORKERS or hardware)");
  tour->add_option("--out", out_dir, "output directory")->required();
  tour->add_flag("--no-transcripts", no_transcripts, "skip transcript files");

  // match
  auto* match = app.add_subcommand("match", "play one match and print its transcript");
  std::string agent_a, agent_b, match_game = "prisoners_dilemma", match_out, match_talk = "off";
  int match_rounds = 100;
  std::uint64_t match_seed_arg = 1;
  match->add_option("--a", agent_a, "row agent")->required();
  match->add_option("--b", agent_b, "column agent")->required();
  match->add_option("--game", match_game, "built-in game name or JSON file");
  match->add_option("--rounds", match_rounds, "rounds");
  match->add_option("--talk", match_talk, "on|off");
  match->add_option("--seed", match_seed_arg, "seed");
  match->add_option("--out", match_out, "write the transcript here instead of stdout");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "recompute metrics from a tournament directory or a transcript");
  std::string in_path;
  analyze->add_option("--in", in_path, "tournament output directory or transcript JSON file")->required();

  // table
  auto* table = app.add_subcommand("table", "enumerate the periodic table of 2x2 games");
  bool table_json = false;
  std::size_t sample = 0;
  table->add_flag("--json", table_json, "print the games as JSON");
  table->add_option("--sample", sample, "print a stratified sample of this size instead");

  // catalog / roster / experts
  auto* catalog = app.add_subcommand("catalog", "print the speech-act catalog as JSON");
  auto* roster_cmd = app.add_subcommand("roster", "list registry agents and their parameters");
  auto* experts = app.add_subcommand("experts", "print the expert roster for a game");
  std::string experts_game = "prisoners_dilemma", experts_seat = "row";
  experts->add_option("--game", experts_game, "built-in game name or JSON file");
  experts->add_option("--seat", experts_seat, "row|col");

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP play server");
  std::string host = "127.0.0.1", transcript_dir;
  int port = 8080, idle = 3600;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");
  serve->add_option("--idle-timeout", idle, "seconds before an idle session expires");
  serve->add_option("--transcripts", transcript_dir, "directory for finished and expired session transcripts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tour) {
      TournamentSpec spec;
      spec.roster = parse_roster(roster);
      spec.games = load_games(games_arg);
      spec.lengths.clear();
      for (const auto& r : split(rounds_arg, ',')) spec.lengths.push_back(std::stoi(r));
      spec.trials = trials;
      spec.talk = parse_switch(talk_arg);
      spec.seed = seed;
      spec.workers = workers;
      spec.keep_transcripts = !no_transcripts;
      auto start = std::chrono::steady_clock::now();
      auto runs = run_tournament(spec);
      export_results(out_dir, spec, runs);
      for (const auto& run : runs) print_rankings(run.result.tensor, run.reports, run.rounds);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cerr << "wrote " << out_dir << " in " << secs << " s\n";
    } else if (*match) {
      MatchConfig cfg{load_game(match_game), parse_agent(agent_a), parse_agent(agent_b), match_rounds,
                      parse_switch(match_talk), match_seed_arg};
      auto t = run_match(cfg);
      auto text = nlohmann::json(t).dump(2) + "\n";
      if (match_out.empty()) {
        std::cout << text;
      } else {
        write_file(match_out, text);
      }
      std::cerr << t.agent_a << " " << t.mean_payoff(Player::Row) << ", " << t.agent_b << " "
                << t.mean_payoff(Player::Col) << "\n";
    } else if (*analyze) {
      if (fs::is_directory(in_path)) {
        for (const auto& run : analyze_directory(in_path)) {
          print_rankings(run.tensor, run.reports, run.rounds);
          std::cout << "cooperation " << to_json(cooperation_stats(run.transcripts)).dump() << "\n";
        }
      } else {
        auto t = nlohmann::json::parse(read_file(in_path), nullptr, false);
        if (t.is_discarded()) throw Error(ErrorCode::MalformedPayload, in_path + " is not valid JSON");
        Transcript tr = expand_transcript(t);
        nlohmann::json out{{"cooperation", to_json(cooperation_stats({tr}))}, {"fidelity", to_json(analyze_fidelity(tr))}};
        std::cout << out.dump(2) << "\n";
      }
    } else if (*table) {
      auto all = enumerate_periodic_table();
      auto games = sample ? stratified_sample(all, sample) : all;
      if (table_json) {
        std::cout << nlohmann::json(games).dump(2) << "\n";
      } else {
        std::cout << "games " << all.size() << ", up to player swap " << count_up_to_player_swap(all) << "\n";
        for (const auto& g : games) {
          auto nbs = nash_bargaining(g);
          std::cout << g.label() << "  pure_nash=" << pure_nash_count(g) << "  nbs=" << nbs.plan.to_string() << "\n";
        }
      }
    } else if (*catalog) {
      std::cout << catalog_json().dump(2) << "\n";
    } else if (*roster_cmd) {
      for (const auto& info : baseline_registry()) {
        std::cout << info.name << "  " << info.description;
        for (const auto& [k, v] : info.defaults) std::cout << "  " << k << "=" << v;
        std::cout << "\n";
      }
      for (const auto& n : reserved_baselines()) std::cout << n << "  (reserved, not implemented)\n";
    } else if (*experts) {
      ExpertSet set(load_game(experts_game), experts_seat == "col" ? Player::Col : Player::Row);
      std::cout << roster_json(set).dump(2) << "\n";
    } else if (*serve) {
      SessionStore::Options opts;
      opts.idle_timeout = std::chrono::seconds(idle);
      if (!transcript_dir.empty()) opts.transcript_dir = transcript_dir;
      SessionStore store(opts);
      httplib::Server server;
      install_routes(server, store);
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
