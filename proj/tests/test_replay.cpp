#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "othello/replay.hpp"
#include "test_util.hpp"

using namespace othello;
using namespace othello::replay;

namespace {

// A random game played to the end, recorded as the server would.
GameRecord random_game(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GameRecord r;
  r.pairing = {"g" + std::to_string(seed), "c1", "c2"};
  r.black_name = "alice";
  r.white_name = "bob";
  r.started_at = 1'700'000'000'000;
  GameState s = initial_state();
  Millis t = r.started_at;
  while (!s.is_terminal()) {
    const auto moves = legal_moves(s);
    const Move m = moves[rng() % moves.size()];
    r.moves.push_back({static_cast<int>(r.moves.size()), s.to_move, t, t + 3, m, Verdict::Ok});
    t += 5;
    s = apply_move(s, m);
  }
  r.ended_at = t;
  r.final_state = s;
  const auto sc = score(s);
  r.winner = sc.winner;
  r.black_count = sc.black_count;
  r.white_count = sc.white_count;
  return r;
}

std::size_t count_lines(const std::string& text) { return std::count(text.begin(), text.end(), '\n'); }

}  // namespace

TEST(GameLog, OneLinePerTurnPlusHeaderAndResult) {
  int full_games = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const GameRecord r = random_game(seed);
    const std::string text = game_log_text(r);
    EXPECT_EQ(count_lines(text), r.moves.size() + 2);
    const bool no_pass = std::none_of(r.moves.begin(), r.moves.end(), [](const MoveRecord& m) { return m.move->is_pass(); });
    if (no_pass && r.final_state.empty_count() == 0) {
      EXPECT_EQ(count_lines(text), 62u);
      ++full_games;
    }
  }
  EXPECT_GT(full_games, 0);
}

TEST(GameLog, RoundTrip) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GameRecord r = random_game(seed);
    if (seed % 3 == 0) {
      r.moves[4].verdict = Verdict::BadMoveTimeout;
      r.moves[4].move.reset();
      r.moves[4].replied_at.reset();
    }
    r.black_is_random = seed % 2 == 0;
    EXPECT_EQ(parse_game_log(game_log_text(r)), r);
  }
}

TEST(GameLog, FirstLinesAreReadable) {
  const std::string text = game_log_text(random_game(3));
  std::istringstream in(text);
  std::string header, turn;
  std::getline(in, header);
  std::getline(in, turn);
  EXPECT_EQ(header.rfind("{\"type\":\"header\",\"game_id\":\"g3\"", 0), 0u) << header;
  EXPECT_NE(header.find("\"rules\":\"othello-1\""), std::string::npos);
  EXPECT_EQ(turn.rfind("{\"type\":\"turn\",\"ply\":0,\"player\":\"black\"", 0), 0u) << turn;
}

TEST(GameLog, ParseErrorsNameTheLine) {
  std::string text = game_log_text(random_game(4));
  const auto second_nl = text.find('\n', text.find('\n') + 1);
  text.insert(second_nl + 1, "{not json\n");
  try {
    parse_game_log(text);
    FAIL();
  } catch (const LogError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_game_log(""), LogError);
  const std::string no_result = game_log_text(random_game(5));
  EXPECT_THROW(parse_game_log(no_result.substr(0, no_result.rfind("{\"type\":\"result\""))), LogError);
}

TEST(Verify, CleanGamesHaveNoDiscrepancies) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto rep = verify_replay(parse_game_log(game_log_text(random_game(seed))));
    EXPECT_TRUE(rep.ok()) << rep.discrepancies.front().message;
  }
}

TEST(Verify, EditedIllegalMoveIsTheOnlyDiscrepancy) {
  GameRecord r = random_game(6);
  const GameState before = state_after(r, 10);
  std::optional<Move> illegal;
  for (int i = 0; i < 64 && !illegal; ++i) {
    const Move m(Coord::from_index(i));
    if (!is_legal(before, m)) illegal = m;
  }
  ASSERT_TRUE(illegal);
  r.moves[10].move = *illegal;
  const auto rep = verify_replay(parse_game_log(game_log_text(r)));
  ASSERT_EQ(rep.discrepancies.size(), 1u);
  EXPECT_EQ(rep.discrepancies[0].ply, 10);
}

TEST(Verify, FlippedWinnerDetected) {
  GameRecord r = random_game(7);
  if (!r.winner) r = random_game(8);
  ASSERT_TRUE(r.winner);
  r.winner = opponent(*r.winner);
  const auto rep = verify_replay(r);
  ASSERT_EQ(rep.discrepancies.size(), 1u);
  EXPECT_FALSE(rep.discrepancies[0].ply);
}

TEST(Verify, CountsAndFinalStateChecked) {
  GameRecord r = random_game(9);
  r.black_count += 1;
  EXPECT_EQ(verify_replay(r).discrepancies.size(), 1u);
  r = random_game(9);
  r.final_state.to_move = opponent(r.final_state.to_move);
  EXPECT_EQ(verify_replay(r).discrepancies.size(), 1u);
}

TEST(Verify, BadMovesForfeitTheTurn) {
  // Black times out once at ply 0, then both play normally.
  GameRecord r;
  r.pairing = {"g1", "c1", "c2"};
  GameState s = initial_state();
  r.moves.push_back({0, Color::Black, 0, std::nullopt, std::nullopt, Verdict::BadMoveTimeout});
  s = forfeit_turn(s);
  std::mt19937_64 rng(1);
  while (!s.is_terminal()) {
    const auto moves = legal_moves(s);
    const Move m = moves[rng() % moves.size()];
    r.moves.push_back({static_cast<int>(r.moves.size()), s.to_move, 0, 0, m, Verdict::Ok});
    s = apply_move(s, m);
  }
  r.final_state = s;
  const auto sc = score(s);
  r.winner = sc.winner;
  r.black_count = sc.black_count;
  r.white_count = sc.white_count;
  r.bad_moves = {1, 0};
  EXPECT_TRUE(verify_replay(r).ok());
  r.bad_moves = {0, 0};
  EXPECT_EQ(verify_replay(r).discrepancies.size(), 1u);
}

TEST(Verify, BadMoveCapForfeit) {
  GameRecord r;
  r.pairing = {"g1", "c1", "c2"};
  r.bad_move_cap = 3;
  GameState s = initial_state();
  for (int i = 0; i < 3; ++i) {
    r.moves.push_back({2 * i, Color::Black, 0, 0, Move(*Coord::parse("a1")), Verdict::BadMoveIllegal});
    s = forfeit_turn(s);
    const Move m = legal_moves(s)[0];
    if (i < 2) {
      r.moves.push_back({2 * i + 1, Color::White, 0, 0, m, Verdict::Ok});
      s = apply_move(s, m);
    }
  }
  r.final_state = s;
  r.black_count = s.count(Color::Black);
  r.white_count = s.count(Color::White);
  r.bad_moves = {3, 0};
  r.reason = EndReason::BadMoveCap;
  r.forfeited_by = Color::Black;
  r.winner = Color::White;
  EXPECT_TRUE(verify_replay(parse_game_log(game_log_text(r))).ok());
  r.winner = Color::Black;
  EXPECT_FALSE(verify_replay(r).ok());
  r.winner = Color::White;
  r.moves[0].move = *Move::parse("d3");  // legal, so not a bad move
  EXPECT_FALSE(verify_replay(r).ok());
}

TEST(Render, OpeningBoard) {
  const std::string expected =
      "   a b c d e f g h\n"
      " 8 · · · · · · · · 8\n"
      " 7 · · · · · · · · 7\n"
      " 6 · · · · · · · · 6\n"
      " 5 · · · B W · · · 5\n"
      " 4 · · · W B · · · 4\n"
      " 3 · · · · · · · · 3\n"
      " 2 · · · · · · · · 2\n"
      " 1 · · · · · · · · 1\n"
      "   a b c d e f g h\n"
      "black to move  B:2 W:2\n";
  EXPECT_EQ(render_ascii(initial_state()), expected);
}

TEST(Render, FinishedGameFooter) {
  const GameRecord r = random_game(10);
  const std::string out = render_ascii(r.final_state);
  EXPECT_NE(out.find("game over"), std::string::npos);
  EXPECT_EQ(state_after(r, r.moves.size()), r.final_state);
  EXPECT_EQ(state_after(r, 0), initial_state());
}

TEST(Report, StandingsAndMatrix) {
  std::vector<GameRecord> games;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    GameRecord r = random_game(seed);
    if (seed == 2) {
      r.pairing = {"g2", "c2", "c1"};
      r.black_name = "bob";
      r.white_name = "alice";
    }
    games.push_back(r);
  }
  const auto rep = write_report(games);
  ASSERT_EQ(rep.standings.size(), 2u);
  EXPECT_EQ(rep.results.size(), 2u);
  EXPECT_EQ(rep.results.count({"c1", "c2"}), 1u);
  EXPECT_NE(rep.text.find("Standings"), std::string::npos);
  EXPECT_NE(rep.text.find("alice"), std::string::npos);
}

TEST(LogFiles, DirectoryListingSkipsSummary) {
  const auto dir = std::filesystem::temp_directory_path() / ("othello-replay-test-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) save_game_log(random_game(seed), dir / ("g" + std::to_string(seed) + ".log"));
  std::ofstream(dir / "summary.txt") << "x\n";
  const auto files = log_files(dir);
  EXPECT_EQ(files.size(), 3u);
  for (const auto& f : files) EXPECT_TRUE(verify_replay(load_game_log(f)).ok());
  std::filesystem::remove_all(dir);
}
