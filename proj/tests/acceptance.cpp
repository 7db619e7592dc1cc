// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "fuzz.hpp"
#include "oracle.hpp"
#include "othello/agents.hpp"
#include "othello/replay.hpp"
#include "othello/server.hpp"
#include "positions.hpp"
#include "test_util.hpp"

using namespace othello;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string secs_text(double s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << s << " s";
  return out.str();
}

std::filesystem::path scratch(const std::string& tag) {
  auto d = std::filesystem::temp_directory_path() / ("othello-acceptance-" + std::to_string(::getpid())) / tag;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

ServerConfig server_config(const std::filesystem::path& logs, int time_limit_ms) {
  ServerConfig c;
  c.host = "127.0.0.1";
  c.port = 0;
  c.time_limit_ms = time_limit_ms;
  c.log_dir = logs;
  c.spectator = nullptr;
  return c;
}

std::thread spawn_agent(int port, const std::string& name, Strategy strategy) {
  AgentConfig cfg;
  cfg.port = port;
  cfg.name = name;
  cfg.strategy = std::move(strategy);
  cfg.reply_safety_margin = 200ms;
  return std::thread([cfg] { agent_loop(cfg); });
}

// Loads every log in `dir` and checks it replays cleanly.
int verify_dir(const std::filesystem::path& dir, std::size_t& files) {
  int bad = 0;
  const auto paths = replay::log_files(dir);
  files = paths.size();
  for (const auto& p : paths)
    if (!replay::verify_replay(replay::load_game_log(p)).ok()) ++bad;
  return bad;
}

// 1. perft(initial, d), d = 1..5, equals the grid oracle; under 10 s.
Outcome rules_oracle() {
  Check c;
  const auto t0 = Clock::now();
  std::ostringstream counts;
  for (int d = 1; d <= 5; ++d) {
    const auto fast = perft(initial_state(), d);
    const auto slow = oracle::perft(oracle::start(), d);
    c.require(fast == slow, "depth " + std::to_string(d) + ": " + std::to_string(fast) + " vs oracle " + std::to_string(slow));
    counts << (d > 1 ? "," : "") << fast;
  }
  c.require(perft(initial_state(), 1) == 4, "perft(1) != 4");
  const double secs = seconds_since(t0);
  c.require(secs < 10.0, "took " + secs_text(secs));
  c.note("perft 1..5 = " + counts.str() + " in " + secs_text(secs));
  return c.result();
}

// 2. 200 random positions, depths 1..5: alphabeta value and move equal
// minimax and negamax; TT on equals TT off; under 2 minutes.
Outcome search_equivalence() {
  Check c;
  const auto t0 = Clock::now();
  const auto h = Heuristic::standard();
  const auto positions = testutil::random_positions(20240601, 200, 0, 58);
  int comparisons = 0;
  for (const auto& s : positions) {
    TranspositionTable tt(1 << 16);
    for (int depth = 1; depth <= 5; ++depth) {
      const auto mm = minimax(s, depth, h);
      const auto nm = negamax(s, depth, h);
      const auto ab = alphabeta(s, depth, h);
      const auto abt = alphabeta(s, depth, h, -kInfinity, kInfinity, &tt);
      const std::string where = protocol::serialize_state(s) + " depth " + std::to_string(depth);
      c.require(mm.value == nm.value && mm.best_move == nm.best_move, "negamax differs at " + where);
      c.require(mm.value == ab.value && mm.best_move == ab.best_move, "alphabeta differs at " + where);
      c.require(abt.value == ab.value, "TT changes the value at " + where);
      ++comparisons;
    }
  }
  const double secs = seconds_since(t0);
  c.require(secs < 120.0, "took " + secs_text(secs));
  c.note(std::to_string(positions.size()) + " positions, " + std::to_string(comparisons) + " searches agree in " +
         secs_text(secs));
  return c.result();
}

// 3. 10^4 random messages survive encode/decode and 1-byte reassembly.
Outcome protocol_fuzz() {
  Check c;
  std::mt19937_64 rng(99);
  constexpr int kCases = 10'000;
  std::vector<protocol::Message> sent;
  std::string stream;
  int identical = 0;
  for (int i = 0; i < kCases; ++i) {
    sent.push_back(fuzz::message(rng));
    const std::string f = protocol::encode_message(sent.back());
    stream += f;
    try {
      if (protocol::decode_message(f) == sent.back()) ++identical;
    } catch (const protocol::DecodeError& e) {
      c.require(false, std::string("decode failed: ") + e.what());
    }
  }
  c.require(identical == kCases, std::to_string(kCases - identical) + " messages changed in round trip");

  protocol::FrameAssembler a;
  std::size_t got = 0;
  for (char ch : stream) {
    a.feed(std::string_view(&ch, 1));
    while (auto f = a.next()) {
      const bool same = got < sent.size() && protocol::decode_frame(*f) == sent[got];
      c.require(same, "reassembled frame " + std::to_string(got) + " differs");
      ++got;
    }
  }
  c.require(got == sent.size(), "reassembled " + std::to_string(got) + " of " + std::to_string(sent.size()) + " frames");
  c.note(std::to_string(identical) + "/" + std::to_string(kCases) + " identical, " + std::to_string(got) +
         " frames reassembled from 1-byte chunks");
  return c.result();
}

// 4. At the standard 5 s limit a reply at deadline + 100 ms is a timeout and
// the opponent moves next; an always-illegal agent is recorded illegal every
// turn while the game continues, and forfeits on the 10th.
Outcome deadline_semantics() {
  Check c;
  {
    const auto dir = scratch("slow");
    TournamentServer server(server_config(dir, 5000));
    server.start();
    std::atomic<int> late{0};
    testutil::ScriptedClient slow(server.port(), "slow", [&](const protocol::MoveRequest& r) {
      // Late exactly once per game: on the first request of each game.
      if (r.ply <= 1) {
        ++late;
        std::this_thread::sleep_for(std::chrono::milliseconds(r.deadline_ms + 100));
      }
      return testutil::first_legal(r);
    });
    testutil::ScriptedClient prompt(server.port(), "prompt",
                                    [](const protocol::MoveRequest& r) { return testutil::first_legal(r); });
    c.require(server.wait_for_games(2, 120s), "slow-agent games did not finish");
    server.stop();
    int timeouts = 0;
    for (const auto& rec : server.records()) {
      const Color slow_color = rec.black_name == "slow" ? Color::Black : Color::White;
      for (std::size_t i = 0; i < rec.moves.size(); ++i) {
        const auto& m = rec.moves[i];
        if (m.verdict != Verdict::BadMoveTimeout) continue;
        ++timeouts;
        c.require(m.player == slow_color, "timeout charged to the prompt agent");
        c.require(i + 1 < rec.moves.size() && rec.moves[i + 1].player == opponent(m.player),
                  "opponent did not move after the timeout");
      }
      c.require(rec.reason == EndReason::Normal, "slow game did not finish normally");
      c.require(rec.bad_moves_of(slow_color) == 1, "expected one bad move for the slow agent");
      c.require(replay::verify_replay(rec).ok(), "slow game log does not verify");
    }
    c.require(late == 2, "slow agent was late " + std::to_string(late) + " times");
    c.require(timeouts == 2, "expected 2 timeouts, saw " + std::to_string(timeouts));
  }
  {
    const auto dir = scratch("illegal");
    auto cfg = server_config(dir, 5000);
    cfg.bad_move_cap = 10;
    TournamentServer server(cfg);
    server.start();
    testutil::ScriptedClient cheat(server.port(), "cheat", [](const protocol::MoveRequest& r) {
      // An occupied square: never legal.
      for (int i = 0; i < 64; ++i) {
        const Coord sq = Coord::from_index(i);
        if (r.state.at(sq) != Cell::Empty) return testutil::reply(r, sq.to_string());
      }
      return testutil::first_legal(r);
    });
    testutil::ScriptedClient fair(server.port(), "fair",
                                  [](const protocol::MoveRequest& r) { return testutil::first_legal(r); });
    c.require(server.wait_for_games(2, 120s), "illegal-agent games did not finish");
    server.stop();
    for (const auto& rec : server.records()) {
      const Color cheat_color = rec.black_name == "cheat" ? Color::Black : Color::White;
      int illegal = 0, fair_moves = 0;
      for (const auto& m : rec.moves) {
        if (m.player == cheat_color) {
          illegal += m.verdict == Verdict::BadMoveIllegal;
        } else {
          fair_moves += m.verdict == Verdict::Ok;
        }
      }
      c.require(illegal == 10, "expected 10 illegal verdicts, saw " + std::to_string(illegal));
      c.require(fair_moves >= 9, "game did not continue between bad moves");
      c.require(rec.reason == EndReason::BadMoveCap && rec.forfeited_by == cheat_color &&
                    rec.winner == opponent(cheat_color),
                "cap did not forfeit the cheat");
      c.require(replay::verify_replay(rec).ok(), "illegal game log does not verify");
    }
    c.require(cheat.bad_moves() == 20, "cheat was notified of " + std::to_string(cheat.bad_moves()) + " bad moves");
  }
  c.note("late reply -> bad_move_timeout then opponent moves; 10 illegal replies -> forfeit");
  return c.result();
}

// 5. random + greedy + two depth-4 alpha-beta agents on a live server:
// 12 logs, all verify, ranks are 1..4, under 10 minutes.
Outcome live_tournament() {
  Check c;
  const auto t0 = Clock::now();
  const auto dir = scratch("tournament");
  auto cfg = server_config(dir, 5000);
  cfg.include_random_agent = true;
  cfg.random_agent_seed = 5;
  TournamentServer server(cfg);
  server.start();
  AlphaBetaStrategy ab;
  ab.limits = SearchLimits::depth(4);
  std::vector<std::thread> agents;
  agents.push_back(spawn_agent(server.port(), "greedy", GreedyStrategy{}));
  agents.push_back(spawn_agent(server.port(), "alphabeta-a", ab));
  agents.push_back(spawn_agent(server.port(), "alphabeta-b", ab));
  c.require(server.wait_for_games(12, 600s), "tournament did not finish 12 games");
  c.require(server.wait_idle(10s), "games still pending");
  server.stop();
  for (auto& t : agents) t.join();

  std::size_t files = 0;
  const int bad = verify_dir(dir, files);
  c.require(files == 12, std::to_string(files) + " logs written");
  c.require(bad == 0, std::to_string(bad) + " logs fail verification");
  std::set<int> ranks;
  for (const auto& row : server.standings()) ranks.insert(row.rank);
  c.require(ranks == std::set<int>{1, 2, 3, 4}, "ranks are not 1..4");
  c.require(std::filesystem::exists(dir / "summary.txt"), "no summary written");
  const double secs = seconds_since(t0);
  c.require(secs < 600.0, "took " + secs_text(secs));
  c.note("12 logs verified, ranks 1..4, " + secs_text(secs));
  return c.result();
}

// 6. Depth-3 alpha-beta beats random in >= 95 of 100 colour-balanced games.
Outcome strength() {
  Check c;
  int wins = 0;
  for (int g = 0; g < 100; ++g) {
    AlphaBetaStrategy ab;
    ab.limits = SearchLimits::depth(3);
    ab.tt_entries = 1 << 16;
    Agent searcher(ab);
    Agent random(RandomStrategy{1000u + static_cast<std::uint64_t>(g)});
    const bool searcher_black = g % 2 == 0;
    const GameState end = searcher_black ? play_local_game(searcher, random) : play_local_game(random, searcher);
    const auto winner = score(end).winner;
    if (winner && *winner == (searcher_black ? Color::Black : Color::White)) ++wins;
  }
  c.require(wins >= 95, "won " + std::to_string(wins) + "/100");
  c.note("won " + std::to_string(wins) + "/100 (50 as black, 50 as white)");
  return c.result();
}

// 7. MCTS with 10 000 playouts finds the verified winning move >= 95/100.
Outcome mcts_sanity() {
  Check c;
  const auto board = oracle::from_text(positions::kWinInOne);
  for (const auto& m : oracle::moves(board)) {
    const auto after = oracle::play(board, m);
    if (m == positions::kWinInOneMove) {
      c.require(oracle::wins_every_line(after, board.to_move), "fixture move does not force a win");
    } else {
      c.require(oracle::solve(after) > 0, "alternative " + m + " does not lose");
    }
  }
  const GameState s = testutil::state(positions::kWinInOne);
  SearchLimits lim;
  lim.node_budget = 10'000;
  int hits = 0;
  for (std::uint64_t trial = 1; trial <= 100; ++trial)
    hits += mcts_choose(s, lim, std::sqrt(2.0), trial).best_move.to_string() == positions::kWinInOneMove;
  c.require(hits >= 95, "found it " + std::to_string(hits) + "/100");
  c.note("found " + std::string(positions::kWinInOneMove) + " in " + std::to_string(hits) + "/100 trials");
  return c.result();
}

// 8. 50 random-vs-random server games, 50 logs, no discrepancies.
Outcome replay_integrity() {
  Check c;
  std::size_t total_files = 0;
  int total_bad = 0;
  for (int round = 0; round < 25; ++round) {
    const auto dir = scratch("random-" + std::to_string(round));
    TournamentServer server(server_config(dir, 5000));
    server.start();
    auto a = spawn_agent(server.port(), "random-a", RandomStrategy{static_cast<std::uint64_t>(2 * round + 1)});
    auto b = spawn_agent(server.port(), "random-b", RandomStrategy{static_cast<std::uint64_t>(2 * round + 2)});
    c.require(server.wait_for_games(2, 60s), "round " + std::to_string(round) + " did not finish");
    server.stop();
    a.join();
    b.join();
    std::size_t files = 0;
    total_bad += verify_dir(dir, files);
    total_files += files;
  }
  c.require(total_files == 50, std::to_string(total_files) + " logs written");
  c.require(total_bad == 0, std::to_string(total_bad) + " logs have discrepancies");
  c.note(std::to_string(total_files) + " logs, " + std::to_string(total_bad) + " with discrepancies");
  return c.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"rules oracle (perft 1..5)", rules_oracle},
      {"search equivalence", search_equivalence},
      {"protocol round trip", protocol_fuzz},
      {"deadline and bad-move semantics", deadline_semantics},
      {"live 4-agent tournament", live_tournament},
      {"alpha-beta beats random", strength},
      {"mcts finds the winning move", mcts_sanity},
      {"replay integrity", replay_integrity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::filesystem::remove_all(std::filesystem::temp_directory_path() / ("othello-acceptance-" + std::to_string(::getpid())));
  return failed == 0 ? 0 : 1;
}
