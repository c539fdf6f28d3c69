#pragma once

#include <optional>
#include <string>

#include "spg/leader.hpp"
#include "spg/scenario.hpp"
#include "spg/types.hpp"

namespace spg {

// A parsed document: either a raw game ("spg-game/1") or a charging scenario
// ("spg-scenario/1", also returned compiled into its game).
struct GameFile {
  std::string schema;
  PricingGame game;
  std::optional<ChargingScenario> scenario;
};

GameFile parse_game_text(const std::string& text);
GameFile parse_game_file(const std::string& path);

std::string game_to_text(const PricingGame& game);
std::string scenario_to_text(const ChargingScenario& s);
void write_game_file(const std::string& path, const PricingGame& game);
void write_scenario_file(const std::string& path, const ChargingScenario& s);

// Trace export. CSV columns, in order:
//   t, pi_1..pi_mL, JL, grad_norm, armijo_l, step, nash_iters, wall_ms
// JSON is an array of row objects carrying the same fields in the same order.
std::string trace_to_csv(const LeaderTrace& trace);
std::string trace_to_json_text(const LeaderTrace& trace);
void write_trace(const LeaderTrace& trace, const std::string& path,
                 const std::string& format);

}  // namespace spg
