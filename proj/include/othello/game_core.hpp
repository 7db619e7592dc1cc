#pragma once

// Othello rules on a pair of 64-bit occupancy masks.
//
// Bit index = row * 8 + column, so a1 is bit 0, h1 is bit 7 and h8 is bit 63.
// Rows are the digits 1..8, columns the letters a..h.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace othello {

using Bitboard = std::uint64_t;

enum class Color : std::uint8_t { Black = 0, White = 1 };

constexpr Color opponent(Color c) noexcept {
  return c == Color::Black ? Color::White : Color::Black;
}

inline const char* color_name(Color c) noexcept {
  return c == Color::Black ? "black" : "white";
}

inline std::optional<Color> parse_color(std::string_view s) noexcept {
  if (s == "black") return Color::Black;
  if (s == "white") return Color::White;
  return std::nullopt;
}

/// Raised when a rules precondition is violated (illegal move, searching a
/// finished game, placing on an occupied cell).
class RulesError : public std::logic_error {
 public:
  enum class Reason { Occupied, NoFlips, PassWithMovesAvailable, GameOver, BadCoord };

  RulesError(Reason reason, const std::string& what)
      : std::logic_error(what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

class Coord {
 public:
  constexpr Coord() = default;
  constexpr Coord(int column, int row) : index_(static_cast<std::uint8_t>(row * 8 + column)) {
    if (column < 0 || column > 7 || row < 0 || row > 7)
      throw RulesError(RulesError::Reason::BadCoord, "coordinate out of range");
  }

  static constexpr Coord from_index(int index) { return Coord(index % 8, index / 8); }

  constexpr int column() const noexcept { return index_ % 8; }
  constexpr int row() const noexcept { return index_ / 8; }
  constexpr int index() const noexcept { return index_; }
  constexpr Bitboard bit() const noexcept { return Bitboard{1} << index_; }

  std::string to_string() const {
    return {static_cast<char>('a' + column()), static_cast<char>('1' + row())};
  }

  static std::optional<Coord> parse(std::string_view s) noexcept {
    if (s.size() != 2) return std::nullopt;
    if (s[0] < 'a' || s[0] > 'h' || s[1] < '1' || s[1] > '8') return std::nullopt;
    return Coord(s[0] - 'a', s[1] - '1');
  }

  friend constexpr bool operator==(Coord, Coord) = default;
  friend constexpr auto operator<=>(Coord, Coord) = default;

 private:
  std::uint8_t index_ = 0;
};

/// Either a placement or an explicit pass.
class Move {
 public:
  constexpr Move() = default;  // pass
  constexpr explicit Move(Coord c) : coord_(c), is_pass_(false) {}

  static constexpr Move pass() { return Move(); }
  static constexpr Move place(Coord c) { return Move(c); }

  constexpr bool is_pass() const noexcept { return is_pass_; }
  constexpr Coord coord() const noexcept { return coord_; }

  std::string to_string() const { return is_pass_ ? std::string("pass") : coord_.to_string(); }

  static std::optional<Move> parse(std::string_view s) noexcept {
    if (s == "pass") return Move::pass();
    if (auto c = Coord::parse(s)) return Move(*c);
    return std::nullopt;
  }

  friend constexpr bool operator==(Move a, Move b) noexcept {
    return a.is_pass_ == b.is_pass_ && (a.is_pass_ || a.coord_ == b.coord_);
  }

 private:
  Coord coord_{};
  bool is_pass_ = true;
};

enum class Cell : std::uint8_t { Empty, Black, White };

namespace detail {

constexpr Bitboard kNotA = 0xfefefefefefefefeULL;  // clears column a after an eastward shift
constexpr Bitboard kNotH = 0x7f7f7f7f7f7f7f7fULL;  // clears column h after a westward shift

// Shift one step in direction d (0..7: E, W, N, S, NE, NW, SE, SW), where
// "N" means towards row 8.
constexpr Bitboard shift(Bitboard b, int d) noexcept {
  switch (d) {
    case 0: return (b << 1) & kNotA;
    case 1: return (b >> 1) & kNotH;
    case 2: return b << 8;
    case 3: return b >> 8;
    case 4: return (b << 9) & kNotA;
    case 5: return (b << 7) & kNotH;
    case 6: return (b >> 7) & kNotA;
    default: return (b >> 9) & kNotH;
  }
}

// Kogge-Stone style fill: placements for `own` that bracket `opp`.
inline Bitboard placements(Bitboard own, Bitboard opp) noexcept {
  const Bitboard empty = ~(own | opp);
  Bitboard moves = 0;
  for (int d = 0; d < 8; ++d) {
    Bitboard run = shift(own, d) & opp;
    for (int i = 0; i < 5; ++i) run |= shift(run, d) & opp;
    moves |= shift(run, d) & empty;
  }
  return moves;
}

inline Bitboard flip_mask(Bitboard own, Bitboard opp, Bitboard square) noexcept {
  Bitboard flips = 0;
  for (int d = 0; d < 8; ++d) {
    Bitboard run = 0;
    Bitboard cursor = shift(square, d);
    while (cursor & opp) {
      run |= cursor;
      cursor = shift(cursor, d);
    }
    if (cursor & own) flips |= run;
  }
  return flips;
}

}  // namespace detail

struct GameState;

/// Outcome of a finished game; `winner` is empty on a draw.
struct FinalScore {
  std::optional<Color> winner;
  int black_count = 0;
  int white_count = 0;
  friend bool operator==(const FinalScore&, const FinalScore&) = default;
};

/// Ongoing when empty.
using GameStatus = std::optional<FinalScore>;

struct GameState {
  Bitboard black = 0;
  Bitboard white = 0;
  Color to_move = Color::Black;
  int consecutive_passes = 0;

  Bitboard own() const noexcept { return to_move == Color::Black ? black : white; }
  Bitboard opp() const noexcept { return to_move == Color::Black ? white : black; }
  Bitboard occupied() const noexcept { return black | white; }
  Bitboard discs(Color c) const noexcept { return c == Color::Black ? black : white; }

  int count(Color c) const noexcept { return std::popcount(discs(c)); }
  int empty_count() const noexcept { return 64 - std::popcount(occupied()); }

  Cell at(Coord c) const noexcept {
    if (black & c.bit()) return Cell::Black;
    if (white & c.bit()) return Cell::White;
    return Cell::Empty;
  }

  void set(Coord c, Cell cell) noexcept {
    black &= ~c.bit();
    white &= ~c.bit();
    if (cell == Cell::Black) black |= c.bit();
    if (cell == Cell::White) white |= c.bit();
  }

  bool is_terminal() const noexcept { return consecutive_passes >= 2 || occupied() == ~Bitboard{0}; }

  friend bool operator==(const GameState&, const GameState&) = default;
};

inline GameState initial_state() {
  GameState s;
  s.set(Coord(3, 4), Cell::Black);  // d5
  s.set(Coord(4, 3), Cell::Black);  // e4
  s.set(Coord(3, 3), Cell::White);  // d4
  s.set(Coord(4, 4), Cell::White);  // e5
  return s;
}

inline Bitboard placement_mask(const GameState& s) noexcept {
  return detail::placements(s.own(), s.opp());
}

inline int mobility(const GameState& s, Color c) noexcept {
  const Bitboard own = s.discs(c);
  const Bitboard opp = s.discs(opponent(c));
  return std::popcount(detail::placements(own, opp));
}

/// Cells flipped by the side to move placing at `c`, in ascending index order.
/// Empty means the placement is illegal.
inline std::vector<Coord> flips_for(const GameState& s, Coord c) {
  if (s.occupied() & c.bit())
    throw RulesError(RulesError::Reason::Occupied, "cell " + c.to_string() + " is occupied");
  std::vector<Coord> out;
  for (Bitboard m = detail::flip_mask(s.own(), s.opp(), c.bit()); m; m &= m - 1)
    out.push_back(Coord::from_index(std::countr_zero(m)));
  return out;
}

/// Row-major placements, or exactly {pass} when the mover has none.
inline std::vector<Move> legal_moves(const GameState& s) {
  if (s.is_terminal()) throw RulesError(RulesError::Reason::GameOver, "game is over");
  std::vector<Move> out;
  for (Bitboard m = placement_mask(s); m; m &= m - 1)
    out.emplace_back(Coord::from_index(std::countr_zero(m)));
  if (out.empty()) out.push_back(Move::pass());
  return out;
}

inline bool is_legal(const GameState& s, Move m) noexcept {
  if (s.is_terminal()) return false;
  const Bitboard moves = placement_mask(s);
  if (m.is_pass()) return moves == 0;
  return (moves & m.coord().bit()) != 0;
}

inline GameState apply_move(const GameState& s, Move m) {
  if (s.is_terminal()) throw RulesError(RulesError::Reason::GameOver, "game is over");
  GameState next = s;
  next.to_move = opponent(s.to_move);
  if (m.is_pass()) {
    if (placement_mask(s) != 0)
      throw RulesError(RulesError::Reason::PassWithMovesAvailable, "pass while placements are available");
    next.consecutive_passes = s.consecutive_passes + 1;
    return next;
  }
  const Bitboard sq = m.coord().bit();
  if (s.occupied() & sq)
    throw RulesError(RulesError::Reason::Occupied, "cell " + m.coord().to_string() + " is occupied");
  const Bitboard flips = detail::flip_mask(s.own(), s.opp(), sq);
  if (flips == 0)
    throw RulesError(RulesError::Reason::NoFlips, "placement at " + m.coord().to_string() + " flips nothing");
  if (s.to_move == Color::Black) {
    next.black = s.black | sq | flips;
    next.white = s.white & ~flips;
  } else {
    next.white = s.white | sq | flips;
    next.black = s.black & ~flips;
  }
  next.consecutive_passes = 0;
  return next;
}

/// Turn lost to a bad move: side to move flips, board unchanged. The pass
/// streak restarts because the offender's own options were never exercised.
inline GameState forfeit_turn(const GameState& s) noexcept {
  GameState next = s;
  next.to_move = opponent(s.to_move);
  next.consecutive_passes = 0;
  return next;
}

inline FinalScore score(const GameState& s) noexcept {
  FinalScore f;
  f.black_count = s.count(Color::Black);
  f.white_count = s.count(Color::White);
  if (f.black_count > f.white_count) f.winner = Color::Black;
  if (f.white_count > f.black_count) f.winner = Color::White;
  return f;
}

inline GameStatus status(const GameState& s) noexcept {
  if (!s.is_terminal()) return std::nullopt;
  return score(s);
}

inline std::uint64_t perft(const GameState& s, int depth) {
  if (depth == 0 || s.is_terminal()) return 1;
  const Bitboard moves = placement_mask(s);
  if (moves == 0) return perft(apply_move(s, Move::pass()), depth - 1);
  if (depth == 1) return static_cast<std::uint64_t>(std::popcount(moves));
  std::uint64_t total = 0;
  for (Bitboard m = moves; m; m &= m - 1)
    total += perft(apply_move(s, Move(Coord::from_index(std::countr_zero(m)))), depth - 1);
  return total;
}

}  // namespace othello
