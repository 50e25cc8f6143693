#pragma once

#include "divergent/maze/maze.hpp"
#include "divergent/maze/robot.hpp"
#include "divergent/neat/population.hpp"
#include "divergent/search/search.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace divergent::experiment {

struct RunConfig {
    std::filesystem::path maze_path;
    maze::MazeSpec maze;
    neat::NeatParams neat;
    maze::RobotParams robot;
    search::StrategyConfig strategy;
    int generations = 300;
    int steps = 400;
    std::uint64_t seed = 1;
    double heatmap_cell = 5.0;
    bool stop_on_success = false;  // end the run at the first solving generation
    bool record_behaviours = true; // keep every generation's final positions
    bool record_predictions = false; // keep surprise centroids and prediction points
    std::string preset = "auto";

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Per-maze budgets and strategy parameters.
struct Preset {
    std::string_view name;
    int generations;
    int steps;
    int k;
    int surprise_n;
    int novelty_n;
};

/// medium, hard, very_hard, extremely_hard, generated, or default.
std::optional<Preset> find_preset(std::string_view name);
/// Budgets, k, and the n that matches the configured strategy kind.
void apply_preset(RunConfig& config, const Preset& preset);

using Settings = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines; `[section]` prefixes the keys that follow with
/// "section."; `#` starts a comment. Throws ParseError naming the line.
Settings parse_settings(std::string_view text);

/// Throws ConfigError naming the key when it is unknown or its value is invalid.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Every key with its current value, in a stable order.
Settings describe(const RunConfig& config);

/// Resolves the preset (explicit, or from the maze file name under "auto"),
/// applies it, then every other setting in order, and loads the maze. Relative
/// maze paths are taken from base_dir.
RunConfig build_run_config(const Settings& settings, const std::filesystem::path& base_dir);

/// Reads a config file; overrides are applied after the file's own settings.
RunConfig load_run_config(const std::filesystem::path& path, const Settings& overrides = {});

} // namespace divergent::experiment
