#pragma once

#include "divergent/experiment/run.hpp"
#include "divergent/maze/maze.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace divergent::experiment {

struct EfficiencyPoint {
    std::int64_t evaluations = 0;
    double mean = 0.0;
    double ci = 0.0; // 1.96 * sample standard deviation / sqrt(runs)
};

/// Running maximum of each record's logged fitness, averaged across records at
/// every generation boundary. Shorter records carry their last value forward.
std::vector<EfficiencyPoint> efficiency_curve(std::span<const RunRecord> records);

struct RobustnessStep {
    std::int64_t evaluations = 0;
    int successes = 0;
};

/// Cumulative count of records whose first success index is at most x, as the
/// list of points where it changes, starting from (0, 0).
std::vector<RobustnessStep> robustness_curve(std::span<const RunRecord> records);
int successes_at(std::span<const RobustnessStep> curve, std::int64_t evaluations);

struct Heatmap {
    int columns = 0;
    int rows = 0;
    double cell = 0.0;
    std::vector<std::int64_t> counts; // row-major from y = 0
    std::int64_t total = 0;
    double entropy = 0.0;

    std::size_t cells() const { return counts.size(); }
};

/// Normalized entropy H = -(1 / log C) sum (v_i / V) log(v_i / V) of the
/// positions binned on a grid of cell x cell squares covering the maze.
Heatmap heatmap_entropy(std::span<const Point> behaviours, const maze::MazeSpec& maze, double cell);
/// The same formula for raw counts; C is counts.size().
double normalized_entropy(std::span<const std::int64_t> counts);

/// Whitespace-separated counts, top row first.
std::string heatmap_text(const Heatmap& map);
/// Plain (P2) graymap, counts scaled so the busiest cell is white.
std::string heatmap_pgm(const Heatmap& map);

/// Every final position recorded by the given runs.
std::vector<Point> all_behaviours(std::span<const RunRecord> records);

struct JobResult {
    std::optional<RunRecord> record;
    std::string error;
};

/// Runs every config on up to `workers` threads. Results come back in input
/// order and do not depend on the worker count; an exception in one job is
/// captured in its result.
std::vector<JobResult> run_many(std::span<const RunConfig> configs, int workers,
                                const std::function<void(std::size_t, const JobResult&)>& done = {});

struct SweepCell {
    int k = 0;
    int n = 0;
    int runs = 0;
    int successes = 0;
    std::optional<double> mean_evaluations; // over successful runs
};

/// Most successes, then fewest mean evaluations; earlier cells win full ties.
std::size_t select_cell(std::span<const SweepCell> table);

/// For each (k, n) in the grid, `runs` runs with seeds base.seed .. base.seed + runs - 1.
std::vector<SweepCell> sensitivity_sweep(const RunConfig& base, std::span<const std::pair<int, int>> grid, int runs,
                                         int workers);

/// Percentage of mazes on which strategy a has strictly more successes than
/// strategy b; successes[s][m] is strategy s on maze m.
std::vector<std::vector<double>> strictly_greater_matrix(const std::vector<std::vector<int>>& successes);
/// Means of the off-diagonal entries of each row and of each column.
std::vector<double> row_means(const std::vector<std::vector<double>>& matrix);
std::vector<double> column_means(const std::vector<std::vector<double>>& matrix);

struct BenchmarkResult {
    std::vector<std::string> strategies;
    std::vector<std::string> mazes;
    std::vector<std::vector<int>> successes;
    std::vector<std::vector<double>> matrix;
    std::vector<double> row_mean;
    std::vector<double> column_mean;
    std::vector<std::vector<RobustnessStep>> robustness; // per strategy, across every run
    std::vector<std::string> failures;
};

/// Every strategy config on every maze, `runs` seeds each. Each template
/// supplies the strategy and budgets; its maze is replaced.
BenchmarkResult generated_benchmark(std::span<const maze::MazeSpec> mazes, std::span<const RunConfig> strategies,
                                    int runs, int workers);

/// CSV writers sharing the run CSV dialect.
std::string efficiency_csv(std::span<const EfficiencyPoint> curve);
std::string robustness_csv(std::span<const RobustnessStep> curve);
std::string sweep_csv(std::span<const SweepCell> table);
std::string matrix_csv(const BenchmarkResult& result);

} // namespace divergent::experiment
