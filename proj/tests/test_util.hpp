#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "othello/game_core.hpp"
#include "othello/net.hpp"
#include "othello/protocol.hpp"

namespace testutil {

/// A position reached by `plies` uniformly random moves (fewer if the game
/// ends first; the last non-terminal position is returned).
inline othello::GameState random_position(std::mt19937_64& rng, int plies) {
  othello::GameState s = othello::initial_state();
  for (int i = 0; i < plies; ++i) {
    const auto moves = othello::legal_moves(s);
    const auto next = othello::apply_move(s, moves[rng() % moves.size()]);
    if (next.is_terminal()) break;
    s = next;
  }
  return s;
}

/// `n` non-terminal positions spread over the whole game.
inline std::vector<othello::GameState> random_positions(std::uint64_t seed, int n, int min_plies = 0, int max_plies = 58) {
  std::mt19937_64 rng(seed);
  std::vector<othello::GameState> out;
  std::uniform_int_distribution<int> plies(min_plies, max_plies);
  while (static_cast<int>(out.size()) < n) out.push_back(random_position(rng, plies(rng)));
  return out;
}

inline othello::GameState state(const std::string& text) { return *othello::protocol::parse_state(text); }

/// Hand-driven protocol client for server integration tests.
class RawClient {
 public:
  RawClient(int port, const std::string& name) : conn_(othello::net::connect_tcp("127.0.0.1", port)) {
    conn_.send(othello::protocol::Register{name});
  }

  /// Next decoded message, skipping nothing; nullopt on timeout or close.
  std::optional<othello::protocol::Message> next(std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    othello::protocol::RawFrame f;
    if (conn_.read_frame(f, timeout) != othello::net::Connection::ReadStatus::Frame) return std::nullopt;
    return othello::protocol::decode_frame(f);
  }

  template <class T>
  std::optional<T> next_of(std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    const auto until = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(until - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      auto m = next(left);
      if (!m) return std::nullopt;
      if (auto* v = std::get_if<T>(&*m)) return *v;
    }
  }

  bool send(const othello::protocol::Message& m) { return conn_.send(m); }
  bool send_raw(const std::string& bytes) { return conn_.send_raw(bytes); }
  void close() { conn_.shutdown(); }

 private:
  othello::net::Connection conn_;
};

/// A client run on its own thread that answers every move request through
/// `policy`. The policy may sleep; returning nullopt sends nothing.
class ScriptedClient {
 public:
  using Policy = std::function<std::optional<std::string>(const othello::protocol::MoveRequest&)>;

  ScriptedClient(int port, const std::string& name, Policy policy)
      : client_(port, name), thread_([this, policy = std::move(policy)] { run(policy); }) {}
  ~ScriptedClient() { stop(); }

  void stop() {
    client_.close();
    if (thread_.joinable()) thread_.join();
  }

  int requests() const { return requests_; }
  int bad_moves() const { return bad_moves_; }
  int games_ended() const { return games_ended_; }
  std::optional<std::string> client_id() const {
    std::lock_guard lock(mu_);
    return id_;
  }

 private:
  void run(const Policy& policy) {
    while (auto m = client_.next(std::chrono::seconds(60))) {
      if (auto* reg = std::get_if<othello::protocol::Registered>(&*m)) {
        std::lock_guard lock(mu_);
        id_ = reg->client_id;
      } else if (auto* req = std::get_if<othello::protocol::MoveRequest>(&*m)) {
        ++requests_;
        if (auto move = policy(*req)) {
          if (*move == "disconnect") return client_.close();
          client_.send_raw(*move);
        }
      } else if (std::holds_alternative<othello::protocol::BadMove>(*m)) {
        ++bad_moves_;
      } else if (std::holds_alternative<othello::protocol::GameEnd>(*m)) {
        ++games_ended_;
      }
    }
  }

  RawClient client_;
  mutable std::mutex mu_;
  std::optional<std::string> id_;
  std::atomic<int> requests_{0}, bad_moves_{0}, games_ended_{0};
  std::thread thread_;
};

/// Encoded reply for `req` carrying `move` and echoing the ply.
inline std::string reply(const othello::protocol::MoveRequest& req, const std::string& move) {
  return othello::protocol::encode_message(
      othello::protocol::MoveReply{req.game_id, *othello::Move::parse(move), req.ply});
}

/// Encoded reply with the first legal move.
inline std::string first_legal(const othello::protocol::MoveRequest& req) {
  return reply(req, othello::legal_moves(req.state).front().to_string());
}

}  // namespace testutil
