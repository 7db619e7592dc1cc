#pragma once

// Tournament server.
//
// Threads: one acceptor, one reader per connection, one game loop. Readers
// decode frames, answer pings and post move replies into the owning
// session's inbox; only the game loop touches game state, and it runs one
// game at a time from the queue.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "othello/agents.hpp"
#include "othello/game_core.hpp"
#include "othello/net.hpp"
#include "othello/protocol.hpp"
#include "othello/record.hpp"
#include "othello/replay.hpp"

namespace othello {

inline Millis wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct ServerConfig {
  std::string host = "0.0.0.0";
  int port = 8000;
  int time_limit_ms = 5000;
  std::filesystem::path log_dir;  // empty: keep records in memory only
  bool include_random_agent = false;
  std::uint64_t random_agent_seed = 0;
  int bad_move_cap = 10;
  int verbosity = 0;  // 1: game results, 2: board after every turn
  std::ostream* spectator = &std::cout;
  std::chrono::milliseconds register_timeout{10'000};

  void validate() const {
    if (time_limit_ms < 100) throw std::invalid_argument("time limit must be at least 100 ms");
    if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
    if (bad_move_cap < 1) throw std::invalid_argument("bad-move cap must be positive");
  }
};

/// What a reader thread hands to the game loop.
struct InboxItem {
  struct Malformed {
    std::string reason;
  };
  struct Disconnected {};
  std::variant<protocol::MoveReply, Malformed, Disconnected> payload;
  std::chrono::steady_clock::time_point received;
  Millis received_wall = 0;
};

struct ClientSession {
  std::string client_id;
  std::string name;
  Millis connected_at = 0;
  std::atomic<bool> alive{true};
  std::shared_ptr<net::Connection> conn;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<InboxItem> inbox;

  void post(InboxItem item) {
    {
      std::lock_guard lock(mu);
      inbox.push_back(std::move(item));
    }
    cv.notify_all();
  }

  bool send(const protocol::Message& m) { return alive && conn->send(m); }
};

/// Outcome of one requested turn. `disconnected` means the mover vanished
/// before a verdict could be reached; `record` is then meaningless.
struct TurnOutcome {
  MoveRecord record;
  bool disconnected = false;
};

class TournamentServer {
 public:
  explicit TournamentServer(ServerConfig config) : config_(std::move(config)) { config_.validate(); }
  TournamentServer(const TournamentServer&) = delete;
  TournamentServer& operator=(const TournamentServer&) = delete;
  ~TournamentServer() { stop(); }

  /// Binds and starts serving. Throws net::NetError when the bind fails.
  void start() {
    listener_ = net::listen_tcp(config_.host, config_.port);
    port_ = listener_.local_port();
    if (!config_.log_dir.empty()) std::filesystem::create_directories(config_.log_dir);
    started_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
    game_loop_ = std::thread([this] { game_loop(); });
    if (config_.include_random_agent) start_random_agent();
  }

  int port() const noexcept { return port_; }
  const ServerConfig& config() const noexcept { return config_; }

  /// Finishes the running game, cancels the queue, closes every connection
  /// and writes the summary.
  void stop() {
    if (!started_ || stopped_) return;
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
      cancelled_ += queue_.size();
      queue_.clear();
    }
    cv_.notify_all();
    if (game_loop_.joinable()) game_loop_.join();
    accepting_ = false;
    if (acceptor_.joinable()) acceptor_.join();
    {
      std::lock_guard lock(mu_);
      for (auto& c : connections_) c->shutdown();
    }
    std::vector<std::thread> readers;
    {
      std::lock_guard lock(mu_);
      readers.swap(readers_);
    }
    for (auto& t : readers) t.join();
    if (random_agent_.joinable()) random_agent_.join();
    listener_.close();
    write_summary();
    stopped_ = true;
  }

  std::vector<GameRecord> records() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  std::optional<std::string> random_agent_id() const {
    std::lock_guard lock(mu_);
    return random_id_;
  }

  std::vector<StandingsRow> standings() const {
    std::lock_guard lock(mu_);
    return compute_standings(records_, random_id_);
  }

  struct Counters {
    std::size_t scheduled = 0;
    std::size_t finished = 0;
    std::size_t running = 0;
    std::size_t cancelled = 0;
    std::size_t queued = 0;
  };

  Counters counters() const {
    std::lock_guard lock(mu_);
    return {scheduled_, records_.size(), running_ ? 1u : 0u, cancelled_, queue_.size()};
  }

  std::vector<std::pair<std::string, std::string>> clients() const {
    std::lock_guard lock(mu_);
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& id : order_) {
      const auto& s = sessions_.at(id);
      if (s->alive) out.emplace_back(s->client_id, s->name);
    }
    return out;
  }

  bool wait_for_clients(std::size_t n, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, timeout, [&] { return alive_count() >= n; });
  }

  bool wait_for_games(std::size_t n, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, timeout, [&] { return records_.size() >= n; });
  }

  /// True once nothing is queued or running.
  bool wait_idle(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, timeout, [&] { return queue_.empty() && !running_; });
  }

 private:
  // -------------------------------------------------------------------------
  // Connections

  void accept_loop() {
    while (accepting_) {
      auto sock = net::accept_for(listener_, std::chrono::milliseconds(100));
      if (!sock) continue;
      auto conn = std::make_shared<net::Connection>(std::move(*sock));
      std::lock_guard lock(mu_);
      if (stopping_) {
        conn->shutdown();
        continue;
      }
      connections_.push_back(conn);
      readers_.emplace_back([this, conn] { serve_connection(conn); });
    }
  }

  void serve_connection(std::shared_ptr<net::Connection> conn) {
    using namespace protocol;
    RawFrame frame;
    const auto st = conn->read_frame(frame, config_.register_timeout);
    auto reject = [&](int code, const std::string& text) {
      conn->send(Error{code, text});
      conn->shutdown();
    };
    if (st == net::Connection::ReadStatus::Timeout) return reject(error_code::kRegisterTimeout, "no register message received");
    if (st != net::Connection::ReadStatus::Frame) return conn->shutdown();

    std::string name;
    try {
      const Message m = decode_frame(frame);
      const auto* reg = std::get_if<Register>(&m);
      if (!reg) return reject(error_code::kExpectedRegister, "first message must be register");
      name = reg->name;
    } catch (const DecodeError& e) {
      return reject(e.kind() == DecodeError::Kind::Oversize ? error_code::kOversize : error_code::kMalformed, e.what());
    }

    auto session = register_client(name, conn);
    if (!session) return conn->shutdown();

    while (conn->read_frame(frame) == net::Connection::ReadStatus::Frame) {
      const auto now = std::chrono::steady_clock::now();
      const Millis wall = wall_clock_ms();
      try {
        Message m = decode_frame(frame);
        if (auto* reply = std::get_if<MoveReply>(&m)) {
          session->post({std::move(*reply), now, wall});
        } else if (std::holds_alternative<Ping>(m)) {
          conn->send(Pong{});
        } else if (std::holds_alternative<Pong>(m)) {
          // keep-alive answer, nothing to do
        } else {
          conn->send(Error{error_code::kMalformed, "unexpected message from client"});
        }
      } catch (const DecodeError& e) {
        session->post({InboxItem::Malformed{e.what()}, now, wall});
        conn->send(Error{e.kind() == DecodeError::Kind::Oversize ? error_code::kOversize : error_code::kMalformed,
                         e.what()});
      }
    }
    on_disconnect(session);
    conn->shutdown();
  }

  std::shared_ptr<ClientSession> register_client(const std::string& requested,
                                                 const std::shared_ptr<net::Connection>& conn) {
    auto session = std::make_shared<ClientSession>();
    session->conn = conn;
    session->connected_at = wall_clock_ms();
    {
      std::lock_guard lock(mu_);
      if (stopping_) return nullptr;
      session->client_id = "c" + std::to_string(++client_counter_);
      session->name = unique_name(requested.empty() ? std::string("anonymous") : requested);
    }
    // Registered goes out before any GameStart for this client.
    conn->send(protocol::Registered{session->client_id});
    {
      std::lock_guard lock(mu_);
      std::vector<std::string> existing;
      for (const auto& id : order_)
        if (sessions_.at(id)->alive) existing.push_back(id);
      sessions_[session->client_id] = session;
      order_.push_back(session->client_id);
      names_taken_[session->name] = true;
      if (awaiting_random_ && requested == "random") {
        random_id_ = session->client_id;
        awaiting_random_ = false;
      }
      auto added = pairings_for_newcomer(existing, session->client_id, game_counter_);
      scheduled_ += added.size();
      for (auto& p : added) queue_.push_back(std::move(p));
    }
    spectate(1, "client " + session->client_id + " registered as " + session->name);
    cv_.notify_all();
    return session;
  }

  std::string unique_name(const std::string& requested) const {
    if (!names_taken_.count(requested)) return requested;
    for (int k = 2;; ++k) {
      std::string candidate = requested + "-" + std::to_string(k);
      if (!names_taken_.count(candidate)) return candidate;
    }
  }

  void on_disconnect(const std::shared_ptr<ClientSession>& s) {
    s->alive = false;
    s->post({InboxItem::Disconnected{}, std::chrono::steady_clock::now(), wall_clock_ms()});
    {
      std::lock_guard lock(mu_);
      const auto before = queue_.size();
      std::erase_if(queue_, [&](const Pairing& p) { return p.black == s->client_id || p.white == s->client_id; });
      cancelled_ += before - queue_.size();
    }
    spectate(1, "client " + s->client_id + " (" + s->name + ") disconnected");
    cv_.notify_all();
  }

  void start_random_agent() {
    AgentConfig cfg;
    cfg.host = "127.0.0.1";
    cfg.port = port_;
    cfg.name = "random";
    cfg.strategy = RandomStrategy{config_.random_agent_seed};
    cfg.reply_safety_margin = std::chrono::milliseconds(0);
    {
      std::lock_guard lock(mu_);
      awaiting_random_ = true;
    }
    random_agent_ = std::thread([cfg] { agent_loop(cfg); });
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, std::chrono::seconds(5), [&] { return random_id_.has_value(); });
  }

  std::size_t alive_count() const {
    std::size_t n = 0;
    for (const auto& [id, s] : sessions_) n += s->alive ? 1 : 0;
    return n;
  }

  // -------------------------------------------------------------------------
  // Games

  void game_loop() {
    for (;;) {
      Pairing p;
      std::shared_ptr<ClientSession> black, white;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
        p = queue_.front();
        queue_.pop_front();
        black = sessions_.at(p.black);
        white = sessions_.at(p.white);
        if (!black->alive || !white->alive) {
          ++cancelled_;
          continue;
        }
        running_ = p;
      }
      GameRecord rec = run_game(p, *black, *white);
      persist(rec);
      {
        std::lock_guard lock(mu_);
        records_.push_back(std::move(rec));
        running_.reset();
      }
      write_summary();
      cv_.notify_all();
    }
  }

  GameRecord run_game(const Pairing& p, ClientSession& black, ClientSession& white) {
    GameRecord rec;
    rec.pairing = p;
    rec.black_name = black.name;
    rec.white_name = white.name;
    {
      std::lock_guard lock(mu_);
      rec.black_is_random = random_id_ && *random_id_ == p.black;
      rec.white_is_random = random_id_ && *random_id_ == p.white;
    }
    rec.bad_move_cap = config_.bad_move_cap;
    rec.started_at = wall_clock_ms();
    spectate(1, "game " + p.game_id + ": " + black.name + " (black) vs " + white.name + " (white)");

    black.send(protocol::GameStart{p.game_id, Color::Black, white.name});
    white.send(protocol::GameStart{p.game_id, Color::White, black.name});

    GameState s = initial_state();
    auto forfeit = [&](Color loser, EndReason why) {
      rec.reason = why;
      rec.forfeited_by = loser;
      rec.winner = opponent(loser);
    };
    bool forfeited = false;
    while (!s.is_terminal()) {
      ClientSession& mover = s.to_move == Color::Black ? black : white;
      ClientSession& other = s.to_move == Color::Black ? white : black;
      if (!mover.alive || !other.alive) {
        forfeit(mover.alive ? opponent(s.to_move) : s.to_move, EndReason::Disconnect);
        forfeited = true;
        break;
      }
      const TurnOutcome t = handle_turn(p.game_id, s, static_cast<int>(rec.moves.size()), mover);
      if (t.disconnected) {
        forfeit(s.to_move, EndReason::Disconnect);
        forfeited = true;
        break;
      }
      rec.moves.push_back(t.record);
      if (t.record.verdict == Verdict::Ok) {
        s = apply_move(s, *t.record.move);
      } else {
        const Color offender = s.to_move;
        const int count = ++rec.bad_moves[static_cast<int>(offender)];
        mover.send(protocol::BadMove{p.game_id, verdict_name(t.record.verdict)});
        spectate(1, "bad move by " + mover.name + ": " + verdict_name(t.record.verdict));
        s = forfeit_turn(s);
        if (count >= config_.bad_move_cap) {
          forfeit(offender, EndReason::BadMoveCap);
          forfeited = true;
          break;
        }
      }
      if (config_.verbosity >= 2) spectate(2, replay::render_ascii(s));
    }

    rec.final_state = s;
    const FinalScore sc = score(s);
    rec.black_count = sc.black_count;
    rec.white_count = sc.white_count;
    if (!forfeited) {
      rec.reason = EndReason::Normal;
      rec.winner = sc.winner;
    }
    rec.ended_at = wall_clock_ms();

    const protocol::GameEnd end{p.game_id, protocol::result_for(rec.winner), rec.black_count, rec.white_count};
    black.send(end);
    white.send(end);
    spectate(1, "game " + p.game_id + " over: " + protocol::result_name(end.result) + " " +
                    std::to_string(rec.black_count) + "-" + std::to_string(rec.white_count) + " (" +
                    end_reason_name(rec.reason) + ")");
    return rec;
  }

  /// Requests one move and waits, on the server's clock, for the verdict.
  TurnOutcome handle_turn(const std::string& game_id, const GameState& s, int ply, ClientSession& mover) {
    using Clock = std::chrono::steady_clock;
    TurnOutcome out;
    out.record.ply = ply;
    out.record.player = s.to_move;

    // Leftovers from earlier turns are stale; a disconnect is not.
    {
      std::lock_guard lock(mover.mu);
      for (const auto& item : mover.inbox)
        if (std::holds_alternative<InboxItem::Disconnected>(item.payload)) {
          out.disconnected = true;
          return out;
        }
      mover.inbox.clear();
    }

    const auto requested = Clock::now();
    const auto deadline = requested + std::chrono::milliseconds(config_.time_limit_ms);
    out.record.requested_at = wall_clock_ms();
    if (!mover.send(protocol::MoveRequest{game_id, s, config_.time_limit_ms, ply})) {
      out.disconnected = true;
      return out;
    }

    std::unique_lock lock(mover.mu);
    for (;;) {
      while (!mover.inbox.empty()) {
        InboxItem item = std::move(mover.inbox.front());
        mover.inbox.pop_front();
        if (std::holds_alternative<InboxItem::Disconnected>(item.payload)) {
          out.disconnected = true;
          return out;
        }
        if (item.received < requested) continue;
        if (auto* reply = std::get_if<protocol::MoveReply>(&item.payload)) {
          if (reply->game_id != game_id) continue;
          if (reply->ply && *reply->ply != ply) continue;
        }
        out.record.replied_at = item.received_wall;
        if (item.received > deadline) {
          out.record.verdict = Verdict::BadMoveTimeout;
          if (auto* reply = std::get_if<protocol::MoveReply>(&item.payload)) out.record.move = reply->move;
          return out;
        }
        if (auto* reply = std::get_if<protocol::MoveReply>(&item.payload)) {
          out.record.move = reply->move;
          out.record.verdict = is_legal(s, reply->move) ? Verdict::Ok : Verdict::BadMoveIllegal;
        } else {
          out.record.verdict = Verdict::BadMoveMalformed;
        }
        return out;
      }
      if (mover.cv.wait_until(lock, deadline) == std::cv_status::timeout && mover.inbox.empty()) {
        out.record.verdict = Verdict::BadMoveTimeout;
        return out;
      }
    }
  }

  // -------------------------------------------------------------------------
  // Output

  void persist(const GameRecord& rec) {
    if (config_.log_dir.empty()) return;
    try {
      replay::save_game_log(rec, config_.log_dir / (rec.pairing.game_id + ".log"));
    } catch (const std::exception& e) {
      spectate(0, std::string("failed to write game log: ") + e.what());
    }
  }

  void write_summary() {
    if (config_.log_dir.empty()) return;
    std::vector<GameRecord> snapshot;
    std::optional<std::string> random_id;
    {
      std::lock_guard lock(mu_);
      snapshot = records_;
      random_id = random_id_;
    }
    std::ofstream out(config_.log_dir / "summary.txt");
    out << replay::write_report(snapshot, random_id).text;
  }

  void spectate(int level, const std::string& text) {
    if (config_.verbosity < level || !config_.spectator) return;
    std::lock_guard lock(out_mu_);
    *config_.spectator << text;
    if (text.empty() || text.back() != '\n') *config_.spectator << '\n';
    config_.spectator->flush();
  }

  ServerConfig config_;
  net::Socket listener_;
  int port_ = 0;
  bool started_ = false;
  bool stopped_ = false;
  std::atomic<bool> accepting_{true};

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::map<std::string, std::shared_ptr<ClientSession>> sessions_;
  std::vector<std::string> order_;  // registration order
  std::map<std::string, bool> names_taken_;
  std::deque<Pairing> queue_;
  std::optional<Pairing> running_;
  std::vector<GameRecord> records_;
  std::optional<std::string> random_id_;
  bool awaiting_random_ = false;
  int client_counter_ = 0;
  int game_counter_ = 1;
  std::size_t scheduled_ = 0;
  std::size_t cancelled_ = 0;

  std::mutex out_mu_;
  std::thread acceptor_;
  std::thread game_loop_;
  std::thread random_agent_;
  std::vector<std::thread> readers_;
  std::vector<std::shared_ptr<net::Connection>> connections_;
};

}  // namespace othello
