#pragma once

// Tournament bookkeeping shared by the server and the replay tools: pairings,
// per-turn records, finished-game records and standings.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "othello/game_core.hpp"

namespace othello {

using Millis = std::int64_t;  // wall-clock milliseconds since the Unix epoch

struct Pairing {
  std::string game_id;
  std::string black;  // client ids
  std::string white;
  friend bool operator==(const Pairing&, const Pairing&) = default;
};

enum class Verdict { Ok, BadMoveIllegal, BadMoveTimeout, BadMoveMalformed };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Ok: return "ok";
    case Verdict::BadMoveIllegal: return "bad_move_illegal";
    case Verdict::BadMoveTimeout: return "bad_move_timeout";
    default: return "bad_move_malformed";
  }
}

inline std::optional<Verdict> parse_verdict(const std::string& s) {
  for (Verdict v : {Verdict::Ok, Verdict::BadMoveIllegal, Verdict::BadMoveTimeout, Verdict::BadMoveMalformed})
    if (s == verdict_name(v)) return v;
  return std::nullopt;
}

struct MoveRecord {
  int ply = 0;
  Color player = Color::Black;
  Millis requested_at = 0;
  std::optional<Millis> replied_at;
  std::optional<Move> move;
  Verdict verdict = Verdict::Ok;
  friend bool operator==(const MoveRecord&, const MoveRecord&) = default;
};

enum class EndReason { Normal, BadMoveCap, Disconnect };

inline const char* end_reason_name(EndReason r) {
  switch (r) {
    case EndReason::Normal: return "normal";
    case EndReason::BadMoveCap: return "bad_move_cap";
    default: return "disconnect";
  }
}

inline std::optional<EndReason> parse_end_reason(const std::string& s) {
  for (EndReason r : {EndReason::Normal, EndReason::BadMoveCap, EndReason::Disconnect})
    if (s == end_reason_name(r)) return r;
  return std::nullopt;
}

struct GameRecord {
  Pairing pairing;
  std::string black_name;
  std::string white_name;
  bool black_is_random = false;
  bool white_is_random = false;
  int bad_move_cap = 10;
  Millis started_at = 0;
  Millis ended_at = 0;
  std::vector<MoveRecord> moves;
  GameState final_state;
  std::optional<Color> winner;  // empty on a draw
  int black_count = 0;
  int white_count = 0;
  std::array<int, 2> bad_moves{0, 0};  // indexed by Color
  EndReason reason = EndReason::Normal;
  std::optional<Color> forfeited_by;

  const std::string& id_of(Color c) const { return c == Color::Black ? pairing.black : pairing.white; }
  const std::string& name_of(Color c) const { return c == Color::Black ? black_name : white_name; }
  int bad_moves_of(Color c) const { return bad_moves[static_cast<int>(c)]; }

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

// ---------------------------------------------------------------------------
// Matchmaking

/// Double round-robin over `clients` in order: every ordered pair (i, j),
/// i != j, plays once with i as Black. `next_id` numbers the games.
inline std::vector<Pairing> schedule_pairings(const std::vector<std::string>& clients, int& next_id) {
  std::vector<Pairing> out;
  if (clients.size() < 2) return out;
  for (std::size_t i = 0; i < clients.size(); ++i)
    for (std::size_t j = 0; j < clients.size(); ++j)
      if (i != j) out.push_back({"g" + std::to_string(next_id++), clients[i], clients[j]});
  return out;
}

/// Games added when `newcomer` joins: one with each colour against every
/// existing client. Applied join by join this yields the full double
/// round-robin.
inline std::vector<Pairing> pairings_for_newcomer(const std::vector<std::string>& existing, const std::string& newcomer,
                                                  int& next_id) {
  std::vector<Pairing> out;
  for (const auto& e : existing) {
    if (e == newcomer) continue;
    out.push_back({"g" + std::to_string(next_id++), e, newcomer});
    out.push_back({"g" + std::to_string(next_id++), newcomer, e});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standings

struct StandingsRow {
  std::string client_id;
  std::string name;
  int games = 0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  double points = 0;
  int total_bad_moves = 0;
  int disc_differential = 0;
  bool is_random = false;
  bool beat_random = false;
  int rank = 0;
  friend bool operator==(const StandingsRow&, const StandingsRow&) = default;
};

/// Points 1 / 0.5 / 0. Ranked by points, then fewer bad moves, then disc
/// differential, then name. `random_agent_id` empty means: take it from the
/// records' random flags.
inline std::vector<StandingsRow> compute_standings(const std::vector<GameRecord>& records,
                                                   std::optional<std::string> random_agent_id = std::nullopt) {
  std::map<std::string, StandingsRow> rows;
  for (const auto& r : records) {
    for (Color c : {Color::Black, Color::White}) {
      auto& row = rows[r.id_of(c)];
      row.client_id = r.id_of(c);
      row.name = r.name_of(c);
      ++row.games;
      row.total_bad_moves += r.bad_moves_of(c);
      const int own = c == Color::Black ? r.black_count : r.white_count;
      const int opp = c == Color::Black ? r.white_count : r.black_count;
      row.disc_differential += own - opp;
      if (!r.winner) {
        ++row.draws;
        row.points += 0.5;
      } else if (*r.winner == c) {
        ++row.wins;
        row.points += 1.0;
      } else {
        ++row.losses;
      }
      const bool flagged = c == Color::Black ? r.black_is_random : r.white_is_random;
      if (!random_agent_id && flagged) random_agent_id = row.client_id;
    }
  }

  std::vector<StandingsRow> out;
  out.reserve(rows.size());
  for (auto& [id, row] : rows) out.push_back(row);
  std::sort(out.begin(), out.end(), [](const StandingsRow& a, const StandingsRow& b) {
    if (a.points != b.points) return a.points > b.points;
    if (a.total_bad_moves != b.total_bad_moves) return a.total_bad_moves < b.total_bad_moves;
    if (a.disc_differential != b.disc_differential) return a.disc_differential > b.disc_differential;
    if (a.name != b.name) return a.name < b.name;
    return a.client_id < b.client_id;
  });

  int random_rank = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].rank = static_cast<int>(i) + 1;
    if (random_agent_id && out[i].client_id == *random_agent_id) {
      out[i].is_random = true;
      random_rank = out[i].rank;
    }
  }
  for (auto& row : out) row.beat_random = random_rank > 0 && row.rank < random_rank;
  return out;
}

}  // namespace othello
