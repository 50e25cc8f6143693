#pragma once

#include "divergent/experiment/config.hpp"
#include "divergent/geometry.hpp"
#include "divergent/neat/genome.hpp"
#include "divergent/neat/population.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace divergent::experiment {

struct GenerationLog {
    int generation = 0;
    std::int64_t evaluations = 0; // cumulative at the end of this generation
    double max_fitness = 0.0;     // best 300 - d of this generation
    bool success = false;         // some member solved the maze this generation
    std::vector<Point> behaviours;
    std::vector<Point> centroids;   // clusters after this generation
    std::vector<Point> predictions; // points used to score the next generation
    std::vector<char> stale;
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::string maze;
    std::string strategy;
    int population = 0;
    int generation_budget = 0;
    int step_budget = 0;
    std::vector<GenerationLog> generations;
    /// (generation - 1) * P + position in the generation, counted from 1.
    std::optional<std::int64_t> first_success;
    neat::GenomicMetrics final_metrics;
    neat::Genome champion;
    double champion_fitness = 0.0;
    Settings config;

    std::int64_t evaluations() const { return generations.empty() ? 0 : generations.back().evaluations; }
};

/// Executes one evolutionary run. The optional callback sees each generation
/// as soon as it is logged.
RunRecord run(const RunConfig& config, const std::function<void(const GenerationLog&)>& progress = {});

/// One row per generation: generation,evaluation,max_fitness,success_flag,
/// followed by `# key=value` footer lines for the outcome, the final genomic
/// metrics, and the configuration echo.
std::string to_csv(const RunRecord& record);
/// Inverse of to_csv; behaviours and the champion are not part of the CSV.
RunRecord parse_run_csv(std::string_view text);

/// generation,index,x,y for every recorded behaviour.
std::string behaviours_csv(const RunRecord& record);

/// generation,kind,cluster,x,y,stale for every recorded centroid and prediction.
std::string predictions_csv(const RunRecord& record);

/// Reals at 12 significant digits.
std::string format_real(double value);

} // namespace divergent::experiment
