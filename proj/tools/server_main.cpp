// othello-server: runs a round-robin tournament for every agent that connects.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "othello/config.hpp"
#include "othello/server.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

}  // namespace

int main(int argc, char** argv) {
  othello::ServerConfig cfg;
  std::string config_file;
  std::string log_dir;
  if (const char* env = std::getenv("OTHELLO_LOG_DIR")) log_dir = env;
  if (log_dir.empty()) log_dir = "tournament";

  CLI::App app{"Othello tournament server"};
  app.add_option("--config", config_file, "JSON file supplying values for flags not given")->check(CLI::ExistingFile);
  app.add_option("--host", cfg.host, "Bind address")->capture_default_str();
  app.add_option("--port", cfg.port, "TCP port")->check(CLI::Range(1, 65535))->capture_default_str();
  app.add_option("--time-limit-ms", cfg.time_limit_ms, "Per-move deadline in milliseconds")
      ->check(CLI::Range(100, 3'600'000))
      ->capture_default_str();
  app.add_option("--logs", log_dir, "Directory for game logs and summary (env OTHELLO_LOG_DIR)")->capture_default_str();
  app.add_flag("--random-agent", cfg.include_random_agent, "Keep a built-in random agent connected");
  app.add_option("--random-seed", cfg.random_agent_seed, "Seed of the built-in random agent")->capture_default_str();
  app.add_option("--bad-move-cap", cfg.bad_move_cap, "Bad moves in one game that forfeit it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("-v,--verbose", cfg.verbosity, "Spectator output; repeat (-vv) to print the board every turn");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_file.empty()) {
      const auto j = othello::config::load_json(config_file);
      auto take = [&](const char* flag, const char* key, auto& target) {
        if (app.count(flag) == 0 && j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
      };
      take("--host", "host", cfg.host);
      take("--port", "port", cfg.port);
      take("--time-limit-ms", "time_limit_ms", cfg.time_limit_ms);
      take("--logs", "logs", log_dir);
      take("--random-agent", "random_agent", cfg.include_random_agent);
      take("--random-seed", "random_seed", cfg.random_agent_seed);
      take("--bad-move-cap", "bad_move_cap", cfg.bad_move_cap);
      take("--verbose", "verbosity", cfg.verbosity);
    }
    cfg.log_dir = log_dir;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "othello-server: " << e.what() << "\n";
    return 2;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  othello::TournamentServer server(cfg);
  try {
    server.start();
  } catch (const std::exception& e) {
    std::cerr << "othello-server: " << e.what() << "\n";
    return 1;
  }
  std::cout << "listening on " << cfg.host << ":" << server.port() << ", deadline " << cfg.time_limit_ms
            << " ms, logs in " << cfg.log_dir.string() << std::endl;

  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));

  std::cout << "shutting down after the current game" << std::endl;
  server.stop();
  const auto c = server.counters();
  std::cout << c.finished << " games played, " << c.cancelled << " cancelled; summary in "
            << (cfg.log_dir / "summary.txt").string() << std::endl;
  return 0;
}
