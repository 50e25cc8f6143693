#pragma once

#include "divergent/experiment/config.hpp"
#include "divergent/maze/generator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace divergent::cli {

namespace fs = std::filesystem;

/// Where a run configuration comes from: an optional file plus flag overrides.
struct ConfigSource {
    std::optional<fs::path> config;
    std::optional<fs::path> maze;
    std::optional<std::string> strategy;
    std::optional<std::uint64_t> seed;
    experiment::Settings overrides; // applied last, in order
};

/// Builds the run configuration. Without a config file the maze must be given.
experiment::RunConfig resolve_config(const ConfigSource& source);

struct RunOptions {
    ConfigSource source;
    fs::path out = ".";
};

/// One run: <stem>.csv, <stem>.genome, <stem>_behaviours.csv when behaviours
/// are recorded and <stem>_predictions.csv when predictions are. Prints one
/// summary line. Returns the exit status.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct ManifestEntry {
    fs::path config;
    std::uint64_t seed = 0;
};

/// `run = <config> <seed>` or `run = <config> <first>-<last>` lines, plus
/// optional `output = <dir>` and `workers = <n>`. Relative paths are taken
/// from base_dir.
struct Manifest {
    std::vector<ManifestEntry> runs;
    fs::path output;
    int workers = 1;
};

Manifest parse_manifest(std::string_view text, const fs::path& base_dir);
Manifest load_manifest(const fs::path& path);

struct BatchOptions {
    fs::path manifest;
    std::optional<fs::path> out;
    std::optional<int> workers;
};

/// Every manifest run, then per-config efficiency, robustness and heatmap
/// files and a summary.csv. Failed runs are reported and make the exit
/// status nonzero without stopping the batch.
int cmd_batch(const BatchOptions& options, std::ostream& out, std::ostream& err);

/// `gen.*` keys of a settings file.
maze::GeneratorConfig generator_config(const experiment::Settings& settings);

struct GenerateOptions {
    std::optional<fs::path> config;
    int count = 1;
    fs::path out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> subdivisions;
};

/// gen_NN.maze files and manifest.txt. Maze i is drawn from stream i of the
/// seed, so any prefix of a suite is reproducible on its own.
int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err);

/// Mazes listed by a generated manifest, in order.
std::vector<fs::path> load_maze_list(const fs::path& manifest);

/// `k=<list>;n=<list>` where a list is comma-separated integers or
/// `<from>..<to>[/<step>]` ranges. Returns the (k, n) product, k-major.
std::vector<std::pair<int, int>> parse_grid(std::string_view spec);

struct SensitivityOptions {
    ConfigSource source;
    std::string grid;
    int runs = 1;
    int workers = 1;
    fs::path out = ".";
};

/// sweep.csv and the selected (k, n) on stdout.
int cmd_sensitivity(const SensitivityOptions& options, std::ostream& out, std::ostream& err);

struct BenchOptions {
    fs::path manifest;                       // as written by cmd_generate
    std::vector<fs::path> configs;           // strategy templates
    std::vector<std::string> strategies;     // shorthand templates on the generated preset
    std::optional<std::uint64_t> seed;
    experiment::Settings overrides;
    int runs = 1;
    int workers = 1;
    fs::path out = ".";
};

/// matrix.csv, successes.csv and per-strategy robustness curves.
int cmd_bench_generated(const BenchOptions& options, std::ostream& out, std::ostream& err);

} // namespace divergent::cli
