#pragma once

// Game log files, replay verification, ASCII boards and tournament reports.
//
// A log is line-oriented JSON in the protocol's style: one "header" line, one
// "turn" line per MoveRecord, one "result" line.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "othello/game_core.hpp"
#include "othello/protocol.hpp"
#include "othello/record.hpp"

namespace othello::replay {

constexpr const char* kRulesVersion = "othello-1";

class LogError : public std::runtime_error {
 public:
  LogError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// ---------------------------------------------------------------------------
// Writing

inline void write_game_log(const GameRecord& r, std::ostream& out) {
  using nlohmann::ordered_json;
  auto emit = [&](const ordered_json& j) { out << protocol::detail::dump(j) << '\n'; };

  ordered_json h;
  h["type"] = "header";
  h["game_id"] = r.pairing.game_id;
  h["black_id"] = r.pairing.black;
  h["black_name"] = r.black_name;
  h["white_id"] = r.pairing.white;
  h["white_name"] = r.white_name;
  h["black_random"] = r.black_is_random;
  h["white_random"] = r.white_is_random;
  h["bad_move_cap"] = r.bad_move_cap;
  h["started_at"] = r.started_at;
  h["rules"] = kRulesVersion;
  emit(h);

  for (const auto& m : r.moves) {
    ordered_json t;
    t["type"] = "turn";
    t["ply"] = m.ply;
    t["player"] = color_name(m.player);
    t["requested_at"] = m.requested_at;
    if (m.replied_at) t["replied_at"] = *m.replied_at;
    if (m.move) t["move"] = m.move->to_string();
    t["verdict"] = verdict_name(m.verdict);
    emit(t);
  }

  ordered_json res;
  res["type"] = "result";
  res["winner"] = r.winner ? color_name(*r.winner) : "draw";
  res["black_count"] = r.black_count;
  res["white_count"] = r.white_count;
  res["black_bad_moves"] = r.bad_moves_of(Color::Black);
  res["white_bad_moves"] = r.bad_moves_of(Color::White);
  res["reason"] = end_reason_name(r.reason);
  if (r.forfeited_by) res["forfeited_by"] = color_name(*r.forfeited_by);
  res["final_state"] = protocol::serialize_state(r.final_state);
  res["ended_at"] = r.ended_at;
  emit(res);
  if (!out) throw std::ios_base::failure("game log write failed");
}

inline std::string game_log_text(const GameRecord& r) {
  std::ostringstream out;
  write_game_log(r, out);
  return out.str();
}

inline void save_game_log(const GameRecord& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  write_game_log(r, out);
  out.flush();
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Loading

namespace detail {

class LineFields {
 public:
  LineFields(const nlohmann::json& j, int line) : j_(j), line_(line) {}

  const nlohmann::json& raw(const char* key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw LogError(line_, std::string("missing field ") + key);
    return *it;
  }
  std::string str(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_string()) throw LogError(line_, std::string("field ") + key + " is not a string");
    return v.get<std::string>();
  }
  std::int64_t integer(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw LogError(line_, std::string("field ") + key + " is not an integer");
    return v.get<std::int64_t>();
  }
  bool boolean(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_boolean()) throw LogError(line_, std::string("field ") + key + " is not a boolean");
    return v.get<bool>();
  }
  bool has(const char* key) const { return j_.contains(key); }
  Color color(const char* key) const {
    auto c = parse_color(str(key));
    if (!c) throw LogError(line_, std::string("bad colour in ") + key);
    return *c;
  }
  int line() const { return line_; }

 private:
  const nlohmann::json& j_;
  int line_;
};

}  // namespace detail

/// Parses a log; errors carry the 1-based line number.
inline GameRecord load_game_log(std::istream& in) {
  GameRecord r;
  std::string text;
  int line = 0;
  bool header = false;
  bool result = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    if (result) throw LogError(line, "content after result line");
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw LogError(line, "not a JSON object");
    detail::LineFields f(j, line);
    const std::string type = f.str("type");
    if (!header) {
      if (type != "header") throw LogError(line, "expected header line");
      r.pairing.game_id = f.str("game_id");
      r.pairing.black = f.str("black_id");
      r.black_name = f.str("black_name");
      r.pairing.white = f.str("white_id");
      r.white_name = f.str("white_name");
      r.black_is_random = f.boolean("black_random");
      r.white_is_random = f.boolean("white_random");
      r.bad_move_cap = static_cast<int>(f.integer("bad_move_cap"));
      r.started_at = f.integer("started_at");
      if (f.str("rules") != kRulesVersion) throw LogError(line, "unsupported rules version");
      header = true;
    } else if (type == "turn") {
      MoveRecord m;
      m.ply = static_cast<int>(f.integer("ply"));
      m.player = f.color("player");
      m.requested_at = f.integer("requested_at");
      if (f.has("replied_at")) m.replied_at = f.integer("replied_at");
      if (f.has("move")) {
        m.move = Move::parse(f.str("move"));
        if (!m.move) throw LogError(line, "bad move text");
      }
      auto v = parse_verdict(f.str("verdict"));
      if (!v) throw LogError(line, "bad verdict");
      m.verdict = *v;
      r.moves.push_back(m);
    } else if (type == "result") {
      const std::string winner = f.str("winner");
      if (winner != "draw") r.winner = f.color("winner");
      r.black_count = static_cast<int>(f.integer("black_count"));
      r.white_count = static_cast<int>(f.integer("white_count"));
      r.bad_moves[0] = static_cast<int>(f.integer("black_bad_moves"));
      r.bad_moves[1] = static_cast<int>(f.integer("white_bad_moves"));
      auto reason = parse_end_reason(f.str("reason"));
      if (!reason) throw LogError(line, "bad end reason");
      r.reason = *reason;
      if (f.has("forfeited_by")) r.forfeited_by = f.color("forfeited_by");
      auto fs = protocol::parse_state(f.str("final_state"));
      if (!fs) throw LogError(line, "bad final_state");
      r.final_state = *fs;
      r.ended_at = f.integer("ended_at");
      result = true;
    } else {
      throw LogError(line, "unexpected line type " + type);
    }
  }
  if (!header) throw LogError(line + 1, "missing header line");
  if (!result) throw LogError(line + 1, "missing result line");
  return r;
}

inline GameRecord load_game_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return load_game_log(in);
}

inline GameRecord parse_game_log(const std::string& text) {
  std::istringstream in(text);
  return load_game_log(in);
}

/// All "*.log" files in a directory, ordered by game number.
inline std::vector<std::filesystem::path> log_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".log") out.push_back(e.path());
  auto number = [](const std::filesystem::path& p) {
    const std::string s = p.stem().string();
    const auto digits = s.find_first_of("0123456789");
    return digits == std::string::npos ? -1L : std::strtol(s.c_str() + digits, nullptr, 10);
  };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    const long na = number(a), nb = number(b);
    return na != nb ? na < nb : a < b;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Verification

struct Discrepancy {
  std::optional<int> ply;  // empty for whole-game checks
  std::string message;
  friend bool operator==(const Discrepancy&, const Discrepancy&) = default;
};

struct VerificationReport {
  std::vector<Discrepancy> discrepancies;
  GameState replayed;
  bool ok() const noexcept { return discrepancies.empty(); }
};

/// Re-simulates a record from the initial position. Ok turns must be legal;
/// bad moves become forfeited turns. The first illegal Ok move halts the
/// replay since later turns no longer have a defined position.
inline VerificationReport verify_replay(const GameRecord& r) {
  VerificationReport rep;
  auto flag = [&](std::optional<int> ply, std::string msg) { rep.discrepancies.push_back({ply, std::move(msg)}); };

  GameState s = initial_state();
  std::array<int, 2> bad{0, 0};
  bool halted = false;
  for (std::size_t i = 0; i < r.moves.size(); ++i) {
    const MoveRecord& m = r.moves[i];
    const int ply = static_cast<int>(i);
    if (m.ply != ply) flag(ply, "ply index " + std::to_string(m.ply) + " out of sequence");
    if (s.is_terminal()) {
      flag(ply, "turn recorded after the game was over");
      halted = true;
      break;
    }
    if (m.player != s.to_move) flag(ply, std::string("recorded player ") + color_name(m.player) + " but " +
                                             color_name(s.to_move) + " was to move");
    if (m.verdict == Verdict::Ok) {
      if (!m.move) {
        flag(ply, "ok verdict without a move");
        halted = true;
        break;
      }
      if (!is_legal(s, *m.move)) {
        flag(ply, "illegal move " + m.move->to_string() + " recorded as ok");
        halted = true;
        break;
      }
      s = apply_move(s, *m.move);
    } else {
      if (m.verdict == Verdict::BadMoveIllegal && m.move && is_legal(s, *m.move))
        flag(ply, "legal move " + m.move->to_string() + " recorded as illegal");
      ++bad[static_cast<int>(s.to_move)];
      s = forfeit_turn(s);
    }
  }
  rep.replayed = s;
  if (halted) return rep;

  for (Color c : {Color::Black, Color::White})
    if (bad[static_cast<int>(c)] != r.bad_moves_of(c))
      flag(std::nullopt, std::string(color_name(c)) + " bad-move count " + std::to_string(r.bad_moves_of(c)) +
                             " but replay has " + std::to_string(bad[static_cast<int>(c)]));
  if (!(s == r.final_state)) flag(std::nullopt, "final state does not match replay");
  const FinalScore sc = score(s);
  if (sc.black_count != r.black_count || sc.white_count != r.white_count)
    flag(std::nullopt, "disc counts " + std::to_string(r.black_count) + "-" + std::to_string(r.white_count) +
                           " but replay has " + std::to_string(sc.black_count) + "-" + std::to_string(sc.white_count));

  std::optional<Color> expected_winner;
  switch (r.reason) {
    case EndReason::Normal:
      if (!s.is_terminal()) flag(std::nullopt, "game ended normally from a non-terminal position");
      expected_winner = sc.winner;
      break;
    case EndReason::BadMoveCap:
      if (!r.forfeited_by) {
        flag(std::nullopt, "bad-move forfeit without an offender");
        return rep;
      }
      if (bad[static_cast<int>(*r.forfeited_by)] < r.bad_move_cap)
        flag(std::nullopt, "bad-move forfeit below the cap");
      expected_winner = opponent(*r.forfeited_by);
      break;
    case EndReason::Disconnect:
      if (!r.forfeited_by) {
        flag(std::nullopt, "disconnect forfeit without an offender");
        return rep;
      }
      expected_winner = opponent(*r.forfeited_by);
      break;
  }
  if (expected_winner != r.winner) {
    auto name = [](std::optional<Color> c) { return c ? std::string(color_name(*c)) : std::string("draw"); };
    flag(std::nullopt, "result says " + name(r.winner) + " but replay gives " + name(expected_winner));
  }
  return rep;
}

/// Position after the first `plies` turns (bad moves forfeit the turn).
inline GameState state_after(const GameRecord& r, std::size_t plies) {
  GameState s = initial_state();
  for (std::size_t i = 0; i < std::min(plies, r.moves.size()); ++i) {
    const auto& m = r.moves[i];
    s = (m.verdict == Verdict::Ok && m.move) ? apply_move(s, *m.move) : forfeit_turn(s);
  }
  return s;
}

// ---------------------------------------------------------------------------
// ASCII rendering

/// Rows 8..1 top to bottom with file letters above and below.
inline std::string render_ascii(const GameState& s) {
  std::string out = "   a b c d e f g h\n";
  for (int row = 7; row >= 0; --row) {
    out += ' ';
    out += static_cast<char>('1' + row);
    for (int col = 0; col < 8; ++col) {
      out += ' ';
      switch (s.at(Coord(col, row))) {
        case Cell::Black: out += 'B'; break;
        case Cell::White: out += 'W'; break;
        default: out += "·"; break;
      }
    }
    out += ' ';
    out += static_cast<char>('1' + row);
    out += '\n';
  }
  out += "   a b c d e f g h\n";
  const int b = s.count(Color::Black), w = s.count(Color::White);
  const std::string counts = "B:" + std::to_string(b) + " W:" + std::to_string(w);
  if (auto st = status(s)) {
    const std::string verdict = st->winner ? std::string(color_name(*st->winner)) + " wins" : "draw";
    out += "game over  " + counts + "  " + verdict + "  (" + color_name(s.to_move) + " to move)\n";
  } else {
    out += std::string(color_name(s.to_move)) + " to move  " + counts + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tournament report

struct TournamentReport {
  std::vector<StandingsRow> standings;
  std::vector<std::string> clients;  // matrix order: by rank
  /// results[{black, white}] = short result text from Black's side, e.g. "W 40-24".
  std::map<std::pair<std::string, std::string>, std::string> results;
  std::string text;
};

inline TournamentReport write_report(const std::vector<GameRecord>& records,
                                     std::optional<std::string> random_agent_id = std::nullopt) {
  TournamentReport rep;
  rep.standings = compute_standings(records, random_agent_id);
  for (const auto& row : rep.standings) rep.clients.push_back(row.client_id);

  for (const auto& r : records) {
    const char* outcome = !r.winner ? "D" : *r.winner == Color::Black ? "W" : "L";
    rep.results[{r.pairing.black, r.pairing.white}] =
        std::string(outcome) + " " + std::to_string(r.black_count) + "-" + std::to_string(r.white_count);
  }

  std::ostringstream out;
  out << "Standings\n";
  out << std::left << std::setw(5) << "rank" << std::setw(20) << "agent" << std::right << std::setw(6) << "games"
      << std::setw(5) << "W" << std::setw(5) << "D" << std::setw(5) << "L" << std::setw(8) << "points" << std::setw(6)
      << "bad" << std::setw(7) << "discs" << "  vs-random\n";
  for (const auto& row : rep.standings) {
    std::ostringstream pts;
    pts << std::fixed << std::setprecision(1) << row.points;
    const std::string vs_random = row.is_random ? "(random)" : row.beat_random ? "beat" : "-";
    out << std::left << std::setw(5) << row.rank << std::setw(20) << row.name << std::right << std::setw(6)
        << row.games << std::setw(5) << row.wins << std::setw(5) << row.draws << std::setw(5) << row.losses
        << std::setw(8) << pts.str() << std::setw(6) << row.total_bad_moves << std::setw(7) << row.disc_differential
        << "  " << vs_random << "\n";
  }

  out << "\nResults (row plays Black against column)\n";
  out << std::setw(20) << "";
  for (std::size_t j = 0; j < rep.clients.size(); ++j) out << std::setw(10) << ("#" + std::to_string(j + 1));
  out << "\n";
  for (std::size_t i = 0; i < rep.clients.size(); ++i) {
    const std::string label = "#" + std::to_string(i + 1) + " " + rep.standings[i].name;
    out << std::left << std::setw(20) << label.substr(0, 19) << std::right;
    for (std::size_t j = 0; j < rep.clients.size(); ++j) {
      auto it = rep.results.find({rep.clients[i], rep.clients[j]});
      out << std::setw(10) << (i == j ? "x" : it == rep.results.end() ? "." : it->second);
    }
    out << "\n";
  }
  rep.text = out.str();
  return rep;
}

}  // namespace othello::replay
