// othello-agent: connects to a tournament server and plays with one strategy.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "othello/agents.hpp"
#include "othello/config.hpp"

int main(int argc, char** argv) {
  std::string connect = "127.0.0.1:8000";
  std::string name = "agent";
  std::string strategy = "alphabeta";
  std::string heuristic_file;
  std::string config_file;
  int max_depth = 6;
  int time_ms = 0;
  std::uint64_t nodes = 0;
  std::uint64_t playouts = 10'000;
  double exploration = 1.41421356;
  std::uint64_t seed = 0;
  int margin_ms = 500;
  bool quiet = false;

  CLI::App app{"Othello tournament agent"};
  app.add_option("--config", config_file, "JSON file supplying values for flags not given")->check(CLI::ExistingFile);
  app.add_option("--connect", connect, "Server address host:port")->capture_default_str();
  app.add_option("--name", name, "Name to register under")->capture_default_str();
  app.add_option("--strategy", strategy, "Move selection")
      ->check(CLI::IsMember({"random", "greedy", "alphabeta", "mcts"}))
      ->capture_default_str();
  app.add_option("--max-depth", max_depth, "alphabeta: deepest iteration")->check(CLI::Range(1, 64))->capture_default_str();
  app.add_option("--time-ms", time_ms, "alphabeta/mcts: own time cap per move, 0 = deadline only")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--nodes", nodes, "alphabeta: node budget per move, 0 = none")->capture_default_str();
  app.add_option("--playouts", playouts, "mcts: playouts per move")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--exploration", exploration, "mcts: UCB1 exploration constant")->capture_default_str();
  app.add_option("--heuristic", heuristic_file, "alphabeta: JSON heuristic weights")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random/mcts: RNG seed")->capture_default_str();
  app.add_option("--margin-ms", margin_ms, "Reply this long before the server deadline")
      ->check(CLI::Range(0, 4999))
      ->capture_default_str();
  app.add_flag("-q,--quiet", quiet, "Do not log game events to stderr");
  CLI11_PARSE(app, argc, argv);

  othello::AgentConfig cfg;
  try {
    if (!config_file.empty()) {
      const auto j = othello::config::load_json(config_file);
      auto take = [&](const char* flag, const char* key, auto& target) {
        if (app.count(flag) == 0 && j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
      };
      take("--connect", "connect", connect);
      take("--name", "name", name);
      take("--strategy", "strategy", strategy);
      take("--max-depth", "max_depth", max_depth);
      take("--time-ms", "time_ms", time_ms);
      take("--nodes", "nodes", nodes);
      take("--playouts", "playouts", playouts);
      take("--exploration", "exploration", exploration);
      take("--heuristic", "heuristic", heuristic_file);
      take("--seed", "seed", seed);
      take("--margin-ms", "margin_ms", margin_ms);
    }
    std::tie(cfg.host, cfg.port) = othello::net::split_host_port(connect);
    cfg.name = name;
    cfg.reply_safety_margin = std::chrono::milliseconds(margin_ms);
    if (!quiet) cfg.log = &std::cerr;

    if (strategy == "random") {
      cfg.strategy = othello::RandomStrategy{seed};
    } else if (strategy == "greedy") {
      cfg.strategy = othello::GreedyStrategy{};
    } else if (strategy == "alphabeta") {
      othello::AlphaBetaStrategy ab;
      ab.limits.max_depth = max_depth;
      if (time_ms > 0) ab.limits.time_budget = std::chrono::milliseconds(time_ms);
      if (nodes > 0) ab.limits.node_budget = nodes;
      if (!heuristic_file.empty()) ab.heuristic = othello::config::load_heuristic(heuristic_file);
      cfg.strategy = ab;
    } else if (strategy == "mcts") {
      othello::MctsStrategy m;
      m.limits.node_budget = playouts;
      if (time_ms > 0) m.limits.time_budget = std::chrono::milliseconds(time_ms);
      m.exploration = exploration;
      m.seed = seed;
      cfg.strategy = m;
    } else {
      std::cerr << "othello-agent: unknown strategy " << strategy << "\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "othello-agent: " << e.what() << "\n";
    return 2;
  }
  return othello::agent_loop(cfg);
}
