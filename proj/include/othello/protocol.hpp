#pragma once

// Wire protocol: one JSON object per LF-terminated line, "type" first.
//
//   client -> server   register, move, ping, pong
//   server -> client   registered, game_start, move_request, bad_move,
//                      game_end, error, ping, pong

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "othello/game_core.hpp"

namespace othello::protocol {

constexpr std::size_t kMaxFrameBytes = 8192;  // including the terminating LF

// ---------------------------------------------------------------------------
// State text: 64 row-major cells ('.', 'B', 'W'), side to move, pass streak.
// e.g. "...........................WB......BW........................... B 0"

inline std::string serialize_state(const GameState& s) {
  std::string out(64, '.');
  for (int i = 0; i < 64; ++i) {
    const Cell c = s.at(Coord::from_index(i));
    if (c == Cell::Black) out[i] = 'B';
    if (c == Cell::White) out[i] = 'W';
  }
  out += s.to_move == Color::Black ? " B " : " W ";
  out += std::to_string(s.consecutive_passes);
  return out;
}

inline std::optional<GameState> parse_state(std::string_view text) noexcept {
  if (text.size() != 68 || text[64] != ' ' || text[66] != ' ') return std::nullopt;
  GameState s;
  for (int i = 0; i < 64; ++i) {
    switch (text[i]) {
      case '.': break;
      case 'B': s.set(Coord::from_index(i), Cell::Black); break;
      case 'W': s.set(Coord::from_index(i), Cell::White); break;
      default: return std::nullopt;
    }
  }
  if (text[65] == 'B') s.to_move = Color::Black;
  else if (text[65] == 'W') s.to_move = Color::White;
  else return std::nullopt;
  if (text[67] < '0' || text[67] > '2') return std::nullopt;
  s.consecutive_passes = text[67] - '0';
  return s;
}

// ---------------------------------------------------------------------------
// Messages

enum class GameResult { BlackWins, WhiteWins, Draw };

inline const char* result_name(GameResult r) {
  switch (r) {
    case GameResult::BlackWins: return "black_wins";
    case GameResult::WhiteWins: return "white_wins";
    default: return "draw";
  }
}

inline std::optional<GameResult> parse_result(std::string_view s) {
  if (s == "black_wins") return GameResult::BlackWins;
  if (s == "white_wins") return GameResult::WhiteWins;
  if (s == "draw") return GameResult::Draw;
  return std::nullopt;
}

inline GameResult result_for(std::optional<Color> winner) {
  if (!winner) return GameResult::Draw;
  return *winner == Color::Black ? GameResult::BlackWins : GameResult::WhiteWins;
}

struct Register {
  std::string name;
  friend bool operator==(const Register&, const Register&) = default;
};
/// `ply` echoes the request being answered; optional on input, and omitted
/// from the encoding when absent.
struct MoveReply {
  std::string game_id;
  Move move;
  std::optional<int> ply;
  friend bool operator==(const MoveReply&, const MoveReply&) = default;
};
struct Registered {
  std::string client_id;
  friend bool operator==(const Registered&, const Registered&) = default;
};
struct Ping {
  friend bool operator==(const Ping&, const Ping&) = default;
};
struct Pong {
  friend bool operator==(const Pong&, const Pong&) = default;
};
struct GameStart {
  std::string game_id;
  Color your_color = Color::Black;
  std::string opponent_name;
  friend bool operator==(const GameStart&, const GameStart&) = default;
};
struct MoveRequest {
  std::string game_id;
  GameState state;
  int deadline_ms = 0;
  int ply = 0;
  friend bool operator==(const MoveRequest&, const MoveRequest&) = default;
};
struct BadMove {
  std::string game_id;
  std::string reason;
  friend bool operator==(const BadMove&, const BadMove&) = default;
};
struct GameEnd {
  std::string game_id;
  GameResult result = GameResult::Draw;
  int black_count = 0;
  int white_count = 0;
  friend bool operator==(const GameEnd&, const GameEnd&) = default;
};
struct Error {
  int code = 0;
  std::string text;
  friend bool operator==(const Error&, const Error&) = default;
};

using Message =
    std::variant<Register, MoveReply, Registered, Ping, Pong, GameStart, MoveRequest, BadMove, GameEnd, Error>;

namespace error_code {
constexpr int kMalformed = 400;
constexpr int kExpectedRegister = 401;
constexpr int kRegisterTimeout = 408;
constexpr int kOversize = 413;
}  // namespace error_code

class DecodeError : public std::runtime_error {
 public:
  enum class Kind { Malformed, UnknownType, MissingField, Oversize };

  DecodeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

using ordered = nlohmann::ordered_json;

inline std::string dump(const ordered& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline ordered to_json(const Message& m) {
  ordered j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Register>) {
          j["type"] = "register";
          j["name"] = v.name;
        } else if constexpr (std::is_same_v<T, MoveReply>) {
          j["type"] = "move";
          j["game_id"] = v.game_id;
          j["move"] = v.move.to_string();
          if (v.ply) j["ply"] = *v.ply;
        } else if constexpr (std::is_same_v<T, Registered>) {
          j["type"] = "registered";
          j["client_id"] = v.client_id;
        } else if constexpr (std::is_same_v<T, Ping>) {
          j["type"] = "ping";
        } else if constexpr (std::is_same_v<T, Pong>) {
          j["type"] = "pong";
        } else if constexpr (std::is_same_v<T, GameStart>) {
          j["type"] = "game_start";
          j["game_id"] = v.game_id;
          j["your_color"] = color_name(v.your_color);
          j["opponent_name"] = v.opponent_name;
        } else if constexpr (std::is_same_v<T, MoveRequest>) {
          j["type"] = "move_request";
          j["game_id"] = v.game_id;
          j["state"] = serialize_state(v.state);
          j["deadline_ms"] = v.deadline_ms;
          j["ply"] = v.ply;
        } else if constexpr (std::is_same_v<T, BadMove>) {
          j["type"] = "bad_move";
          j["game_id"] = v.game_id;
          j["reason"] = v.reason;
        } else if constexpr (std::is_same_v<T, GameEnd>) {
          j["type"] = "game_end";
          j["game_id"] = v.game_id;
          j["result"] = result_name(v.result);
          j["black_count"] = v.black_count;
          j["white_count"] = v.white_count;
        } else if constexpr (std::is_same_v<T, Error>) {
          j["type"] = "error";
          j["code"] = v.code;
          j["text"] = v.text;
        }
      },
      m);
  return j;
}

// Typed field access for flat objects. Wrong type reads as malformed.
class Fields {
 public:
  explicit Fields(const nlohmann::json& j) : j_(j) {}

  const nlohmann::json& raw(const char* key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw DecodeError(DecodeError::Kind::MissingField, std::string("missing field: ") + key);
    return *it;
  }

  std::string str(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_string()) throw DecodeError(DecodeError::Kind::Malformed, std::string("not a string: ") + key);
    return v.get<std::string>();
  }

  int integer(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw DecodeError(DecodeError::Kind::Malformed, std::string("not an integer: ") + key);
    return v.get<int>();
  }

  std::optional<int> opt_integer(const char* key) const {
    if (!j_.contains(key)) return std::nullopt;
    return integer(key);
  }

 private:
  const nlohmann::json& j_;
};

[[noreturn]] inline void bad_value(const char* what) {
  throw DecodeError(DecodeError::Kind::Malformed, std::string("invalid value: ") + what);
}

}  // namespace detail

/// Canonical frame, LF-terminated.
inline std::string encode_message(const Message& m) {
  return detail::dump(detail::to_json(m)) + '\n';
}

/// Decodes one frame (trailing LF/CRLF optional). Accepts any key order and
/// insignificant whitespace; unknown extra keys are ignored.
inline Message decode_message(std::string_view frame) {
  if (frame.size() > kMaxFrameBytes)
    throw DecodeError(DecodeError::Kind::Oversize, "frame exceeds " + std::to_string(kMaxFrameBytes) + " bytes");
  if (!frame.empty() && frame.back() == '\n') frame.remove_suffix(1);
  if (!frame.empty() && frame.back() == '\r') frame.remove_suffix(1);
  if (frame.find('\n') != std::string_view::npos)
    throw DecodeError(DecodeError::Kind::Malformed, "interior line feed");

  nlohmann::json j = nlohmann::json::parse(frame, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DecodeError(DecodeError::Kind::Malformed, "not a JSON object");
  detail::Fields f(j);
  const std::string type = f.str("type");

  if (type == "register") return Register{f.str("name")};
  if (type == "move") {
    auto move = Move::parse(f.str("move"));
    if (!move) detail::bad_value("move");
    return MoveReply{f.str("game_id"), *move, f.opt_integer("ply")};
  }
  if (type == "registered") return Registered{f.str("client_id")};
  if (type == "ping") return Ping{};
  if (type == "pong") return Pong{};
  if (type == "game_start") {
    auto color = parse_color(f.str("your_color"));
    if (!color) detail::bad_value("your_color");
    return GameStart{f.str("game_id"), *color, f.str("opponent_name")};
  }
  if (type == "move_request") {
    auto state = parse_state(f.str("state"));
    if (!state) detail::bad_value("state");
    return MoveRequest{f.str("game_id"), *state, f.integer("deadline_ms"), f.integer("ply")};
  }
  if (type == "bad_move") return BadMove{f.str("game_id"), f.str("reason")};
  if (type == "game_end") {
    auto result = parse_result(f.str("result"));
    if (!result) detail::bad_value("result");
    return GameEnd{f.str("game_id"), *result, f.integer("black_count"), f.integer("white_count")};
  }
  if (type == "error") return Error{f.integer("code"), f.str("text")};
  throw DecodeError(DecodeError::Kind::UnknownType, "unknown message type: " + type);
}

// ---------------------------------------------------------------------------
// Stream reassembly

/// One LF-delimited frame cut from a byte stream. Oversized frames keep only
/// a prefix of their bytes and are flagged.
struct RawFrame {
  std::string bytes;
  bool oversize = false;
};

class FrameAssembler {
 public:
  void feed(std::string_view chunk) {
    for (char ch : chunk) {
      if (ch == '\n') {
        frames_.push_back({std::move(pending_), overflow_});
        pending_.clear();
        overflow_ = false;
        continue;
      }
      if (pending_.size() + 1 >= kMaxFrameBytes) {
        overflow_ = true;
        continue;
      }
      pending_.push_back(ch);
    }
  }

  std::optional<RawFrame> next() {
    if (frames_.empty()) return std::nullopt;
    RawFrame f = std::move(frames_.front());
    frames_.pop_front();
    return f;
  }

  bool has_frame() const noexcept { return !frames_.empty(); }
  std::size_t buffered() const noexcept { return pending_.size(); }

 private:
  std::deque<RawFrame> frames_;
  std::string pending_;
  bool overflow_ = false;
};

/// Decodes a reassembled frame, mapping the oversize flag to its error.
inline Message decode_frame(const RawFrame& f) {
  if (f.oversize) throw DecodeError(DecodeError::Kind::Oversize, "frame exceeds " + std::to_string(kMaxFrameBytes) + " bytes");
  return decode_message(f.bytes);
}

}  // namespace othello::protocol
