// othello-replay: verify, show and summarise tournament game logs.

#include <filesystem>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "othello/replay.hpp"

namespace fs = std::filesystem;
using namespace othello;

namespace {

// Expands directories to the logs they contain.
std::vector<fs::path> collect(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (auto& p : replay::log_files(in)) out.push_back(p);
    } else {
      out.emplace_back(in);
    }
  }
  return out;
}

int verify(const std::vector<std::string>& inputs) {
  int failures = 0;
  for (const auto& path : collect(inputs)) {
    try {
      const auto rep = replay::verify_replay(replay::load_game_log(path));
      if (rep.ok()) {
        std::cout << path.string() << ": ok\n";
        continue;
      }
      ++failures;
      std::cout << path.string() << ": " << rep.discrepancies.size() << " discrepancies\n";
      for (const auto& d : rep.discrepancies)
        std::cout << "  " << (d.ply ? "ply " + std::to_string(*d.ply) : std::string("game")) << ": " << d.message << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << path.string() << ": error: " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

int show(const std::string& path, int ply) {
  try {
    const auto rec = replay::load_game_log(fs::path(path));
    std::cout << rec.pairing.game_id << ": " << rec.black_name << " (black) vs " << rec.white_name << " (white)\n";
    const std::size_t last = ply >= 0 ? static_cast<std::size_t>(ply) : rec.moves.size();
    if (last > rec.moves.size()) {
      std::cerr << "othello-replay: game has only " << rec.moves.size() << " plies\n";
      return 1;
    }
    const std::size_t first = ply >= 0 ? last : 0;
    for (std::size_t i = first; i <= last; ++i) {
      if (i > 0) {
        const auto& m = rec.moves[i - 1];
        std::cout << "\nply " << i << ": " << color_name(m.player) << " "
                  << (m.move ? m.move->to_string() : std::string("-")) << " (" << verdict_name(m.verdict) << ")\n";
      } else {
        std::cout << "\nstart\n";
      }
      std::cout << replay::render_ascii(replay::state_after(rec, i));
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "othello-replay: " << e.what() << "\n";
    return 1;
  }
}

int report(const std::vector<std::string>& inputs) {
  try {
    std::vector<GameRecord> records;
    for (const auto& path : collect(inputs)) records.push_back(replay::load_game_log(path));
    std::cout << replay::write_report(records).text;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "othello-replay: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Othello game log tools"};
  app.require_subcommand(1);

  std::vector<std::string> verify_paths;
  auto* verify_cmd = app.add_subcommand("verify", "Re-simulate logs; exit 1 on any discrepancy");
  verify_cmd->add_option("logs", verify_paths, "Log files or directories")->required()->check(CLI::ExistingPath);

  std::string show_path;
  int show_ply = -1;
  auto* show_cmd = app.add_subcommand("show", "Render a game move by move");
  show_cmd->add_option("log", show_path, "Log file")->required()->check(CLI::ExistingFile);
  show_cmd->add_option("--ply", show_ply, "Only the board after this many plies")->check(CLI::NonNegativeNumber);

  std::vector<std::string> report_paths;
  auto* report_cmd = app.add_subcommand("report", "Standings and results matrix");
  report_cmd->add_option("logs", report_paths, "Tournament directory or log files")->required()->check(CLI::ExistingPath);

  CLI11_PARSE(app, argc, argv);
  if (*verify_cmd) return verify(verify_paths);
  if (*show_cmd) return show(show_path, show_ply);
  return report(report_paths);
}
