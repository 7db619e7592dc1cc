#pragma once

// JSON configuration files for heuristics, the server and agents.
//
// Heuristic file:
//   {"cell_weights": [[...8 ints...] x 8], "mobility_weight": 8,
//    "disc_weight": 1, "corner_weight": 25}
// Missing keys keep the standard values. Server and agent files are flat
// objects whose keys mirror the long command-line flags ("time_limit_ms",
// "max_depth", ...).

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "othello/search.hpp"

namespace othello::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
  return j;
}

inline Heuristic heuristic_from_json(const nlohmann::json& j) {
  Heuristic h = Heuristic::standard();
  try {
    if (j.contains("cell_weights")) {
      const auto& rows = j.at("cell_weights");
      if (!rows.is_array() || rows.size() != 8) throw ConfigError("cell_weights must be 8 rows");
      for (std::size_t r = 0; r < 8; ++r) {
        if (!rows[r].is_array() || rows[r].size() != 8) throw ConfigError("cell_weights rows must have 8 entries");
        for (std::size_t c = 0; c < 8; ++c) h.cell_weights[r][c] = rows[r][c].get<int>();
      }
    }
    if (j.contains("mobility_weight")) h.mobility_weight = j.at("mobility_weight").get<int>();
    if (j.contains("disc_weight")) h.disc_weight = j.at("disc_weight").get<int>();
    if (j.contains("corner_weight")) h.corner_weight = j.at("corner_weight").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("heuristic: ") + e.what());
  }
  return h;
}

inline nlohmann::ordered_json heuristic_to_json(const Heuristic& h) {
  nlohmann::ordered_json j;
  j["cell_weights"] = h.cell_weights;
  j["mobility_weight"] = h.mobility_weight;
  j["disc_weight"] = h.disc_weight;
  j["corner_weight"] = h.corner_weight;
  return j;
}

inline Heuristic load_heuristic(const std::filesystem::path& path) { return heuristic_from_json(load_json(path)); }

}  // namespace othello::config
