#pragma once

// Reference agents: move-selection strategies and the protocol client loop.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <variant>

#include "othello/game_core.hpp"
#include "othello/net.hpp"
#include "othello/protocol.hpp"
#include "othello/search.hpp"

namespace othello {

// ---------------------------------------------------------------------------
// Move choosers

inline Move choose_move_random(const GameState& s, std::mt19937_64& rng) {
  const auto moves = legal_moves(s);
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  return moves[pick(rng)];
}

/// Most flips; first in row-major order on ties.
inline Move choose_move_greedy(const GameState& s) {
  const auto moves = legal_moves(s);
  Move best = moves.front();
  std::size_t most = 0;
  for (Move m : moves) {
    if (m.is_pass()) break;
    const std::size_t n = flips_for(s, m.coord()).size();
    if (n > most) {
      most = n;
      best = m;
    }
  }
  return best;
}

inline Move choose_move_search(const GameState& s, const SearchLimits& limits, const Heuristic& h,
                               TranspositionTable& tt) {
  return iterative_deepening(s, limits, h, tt).best_move;
}

// ---------------------------------------------------------------------------
// Strategies

struct RandomStrategy {
  std::uint64_t seed = 0;
};
struct GreedyStrategy {};
struct AlphaBetaStrategy {
  SearchLimits limits = SearchLimits::depth(6);
  Heuristic heuristic = Heuristic::standard();
  std::size_t tt_entries = std::size_t{1} << 20;
};
struct MctsStrategy {
  SearchLimits limits{std::nullopt, std::nullopt, 10'000};
  double exploration = 1.41421356;
  std::uint64_t seed = 0;
};

using Strategy = std::variant<RandomStrategy, GreedyStrategy, AlphaBetaStrategy, MctsStrategy>;

inline const char* strategy_name(const Strategy& s) {
  switch (s.index()) {
    case 0: return "random";
    case 1: return "greedy";
    case 2: return "alphabeta";
    default: return "mcts";
  }
}

/// A strategy plus the state it keeps between turns: the random stream and,
/// for alpha-beta, a transposition table that lives for one game.
class Agent {
 public:
  explicit Agent(Strategy strategy) : strategy_(std::move(strategy)) {
    if (auto* r = std::get_if<RandomStrategy>(&strategy_)) rng_.seed(r->seed);
    if (auto* m = std::get_if<MctsStrategy>(&strategy_)) rng_.seed(m->seed);
    if (auto* a = std::get_if<AlphaBetaStrategy>(&strategy_)) {
      a->limits.validate();
      tt_ = std::make_unique<TranspositionTable>(a->tt_entries);
    }
  }

  const Strategy& strategy() const noexcept { return strategy_; }

  void new_game() {
    if (tt_) tt_->clear();
  }

  /// `budget` caps thinking time on top of the strategy's own limits.
  Move choose(const GameState& s, std::optional<std::chrono::milliseconds> budget = std::nullopt) {
    return std::visit(
        [&](auto& st) -> Move {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, RandomStrategy>) {
            return choose_move_random(s, rng_);
          } else if constexpr (std::is_same_v<T, GreedyStrategy>) {
            return choose_move_greedy(s);
          } else if constexpr (std::is_same_v<T, AlphaBetaStrategy>) {
            return choose_move_search(s, capped(st.limits, budget), st.heuristic, *tt_);
          } else {
            return mcts_choose(s, capped(st.limits, budget), st.exploration, rng_()).best_move;
          }
        },
        strategy_);
  }

 private:
  static SearchLimits capped(SearchLimits limits, std::optional<std::chrono::milliseconds> budget) {
    if (budget) {
      const auto b = std::max(*budget, std::chrono::milliseconds(0));
      limits.time_budget = limits.time_budget ? std::min(*limits.time_budget, b) : b;
    }
    return limits;
  }

  Strategy strategy_;
  std::mt19937_64 rng_;
  std::unique_ptr<TranspositionTable> tt_;
};

/// Plays one local game without a server; returns the final position.
inline GameState play_local_game(Agent& black, Agent& white) {
  black.new_game();
  white.new_game();
  GameState s = initial_state();
  while (!s.is_terminal()) {
    Agent& mover = s.to_move == Color::Black ? black : white;
    s = apply_move(s, mover.choose(s));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Protocol client

struct AgentConfig {
  std::string host = "127.0.0.1";
  int port = 8000;
  std::string name = "agent";
  Strategy strategy = RandomStrategy{};
  std::chrono::milliseconds reply_safety_margin{500};
  std::ostream* log = nullptr;
};

namespace agent_exit {
constexpr int kOk = 0;
constexpr int kLost = 1;  // connection ended before registration completed
constexpr int kConnectFailed = 2;
}  // namespace agent_exit

/// Connects, registers and answers requests until the server hangs up.
inline int agent_loop(const AgentConfig& config) {
  using namespace protocol;
  auto log = [&](const std::string& line) {
    if (config.log) *config.log << "[" << config.name << "] " << line << std::endl;
  };
  if (config.reply_safety_margin >= std::chrono::milliseconds(5000))
    throw std::invalid_argument("reply safety margin must be below 5000 ms");

  std::optional<net::Connection> conn;
  try {
    conn.emplace(net::connect_tcp(config.host, config.port));
  } catch (const net::NetError& e) {
    log(e.what());
    return agent_exit::kConnectFailed;
  }
  Agent agent(config.strategy);
  if (!conn->send(Register{config.name})) return agent_exit::kLost;

  bool registered = false;
  RawFrame frame;
  while (conn->read_frame(frame) == net::Connection::ReadStatus::Frame) {
    const auto received = std::chrono::steady_clock::now();
    Message msg;
    try {
      msg = decode_frame(frame);
    } catch (const DecodeError& e) {
      log(std::string("undecodable frame: ") + e.what());
      continue;
    }
    if (auto* req = std::get_if<MoveRequest>(&msg)) {
      if (req->state.is_terminal()) continue;
      const auto budget = std::chrono::milliseconds(req->deadline_ms) - config.reply_safety_margin -
                          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - received);
      const Move m = agent.choose(req->state, budget);
      conn->send(MoveReply{req->game_id, m, req->ply});
    } else if (std::holds_alternative<Ping>(msg)) {
      conn->send(Pong{});
    } else if (auto* reg = std::get_if<Registered>(&msg)) {
      registered = true;
      log("registered as " + reg->client_id);
    } else if (auto* start = std::get_if<GameStart>(&msg)) {
      agent.new_game();
      log("game " + start->game_id + " as " + color_name(start->your_color) + " vs " + start->opponent_name);
    } else if (auto* bad = std::get_if<BadMove>(&msg)) {
      log("bad move in " + bad->game_id + ": " + bad->reason);
    } else if (auto* end = std::get_if<GameEnd>(&msg)) {
      log("game " + end->game_id + " over: " + result_name(end->result) + " " + std::to_string(end->black_count) + "-" +
          std::to_string(end->white_count));
    } else if (auto* err = std::get_if<Error>(&msg)) {
      log("server error " + std::to_string(err->code) + ": " + err->text);
    }
  }
  log("connection closed");
  return registered ? agent_exit::kOk : agent_exit::kLost;
}

}  // namespace othello
