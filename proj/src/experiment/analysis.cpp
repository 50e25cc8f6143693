#include "divergent/experiment/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace divergent::experiment {

std::vector<EfficiencyPoint> efficiency_curve(std::span<const RunRecord> records)
{
    if (records.empty())
        throw std::invalid_argument("efficiency_curve: no records");
    std::size_t length = 0;
    std::vector<std::vector<double>> best(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.generations.empty())
            throw std::invalid_argument("efficiency_curve: record without generations");
        if (rec.population != records[0].population)
            throw std::invalid_argument("efficiency_curve: records differ in population size");
        double running = -std::numeric_limits<double>::infinity();
        for (const auto& g : rec.generations) {
            running = std::max(running, g.max_fitness);
            best[r].push_back(running);
        }
        length = std::max(length, best[r].size());
    }
    const double runs = static_cast<double>(records.size());
    std::vector<EfficiencyPoint> curve(length);
    for (std::size_t g = 0; g < length; ++g) {
        double sum = 0.0;
        for (const auto& b : best)
            sum += b[std::min(g, b.size() - 1)];
        const double mean = sum / runs;
        double ss = 0.0;
        for (const auto& b : best) {
            const double d = b[std::min(g, b.size() - 1)] - mean;
            ss += d * d;
        }
        const double sd = records.size() > 1 ? std::sqrt(ss / (runs - 1.0)) : 0.0;
        curve[g] = {static_cast<std::int64_t>(g + 1) * records[0].population, mean, 1.96 * sd / std::sqrt(runs)};
    }
    return curve;
}

std::vector<RobustnessStep> robustness_curve(std::span<const RunRecord> records)
{
    std::vector<std::int64_t> firsts;
    for (const auto& r : records)
        if (r.first_success)
            firsts.push_back(*r.first_success);
    std::sort(firsts.begin(), firsts.end());
    std::vector<RobustnessStep> curve{{0, 0}};
    for (std::size_t i = 0; i < firsts.size(); ++i) {
        const int count = static_cast<int>(i) + 1;
        if (curve.back().evaluations == firsts[i])
            curve.back().successes = count;
        else
            curve.push_back({firsts[i], count});
    }
    return curve;
}

int successes_at(std::span<const RobustnessStep> curve, std::int64_t evaluations)
{
    int out = 0;
    for (const auto& s : curve) {
        if (s.evaluations > evaluations)
            break;
        out = s.successes;
    }
    return out;
}

double normalized_entropy(std::span<const std::int64_t> counts)
{
    if (counts.size() < 2)
        throw std::invalid_argument("normalized_entropy: need at least two cells");
    std::int64_t total = 0;
    for (auto v : counts) {
        if (v < 0)
            throw std::invalid_argument("normalized_entropy: negative count");
        total += v;
    }
    if (total < 1)
        throw std::invalid_argument("normalized_entropy: no visits");
    const double V = static_cast<double>(total);
    double h = 0.0;
    for (auto v : counts)
        if (v > 0) {
            const double p = static_cast<double>(v) / V;
            h -= p * std::log(p);
        }
    return h / std::log(static_cast<double>(counts.size()));
}

Heatmap heatmap_entropy(std::span<const Point> behaviours, const maze::MazeSpec& maze, double cell)
{
    if (!(cell > 0.0))
        throw std::invalid_argument("heatmap_entropy: cell size must be positive");
    Heatmap map;
    map.cell = cell;
    map.columns = static_cast<int>(std::ceil(maze.width / cell));
    map.rows = static_cast<int>(std::ceil(maze.height / cell));
    map.counts.assign(static_cast<std::size_t>(map.columns) * static_cast<std::size_t>(map.rows), 0);
    for (const auto& p : behaviours) {
        const int c = std::clamp(static_cast<int>(std::floor(p.x / cell)), 0, map.columns - 1);
        const int r = std::clamp(static_cast<int>(std::floor(p.y / cell)), 0, map.rows - 1);
        ++map.counts[static_cast<std::size_t>(r) * static_cast<std::size_t>(map.columns) + static_cast<std::size_t>(c)];
    }
    map.total = static_cast<std::int64_t>(behaviours.size());
    map.entropy = normalized_entropy(map.counts);
    return map;
}

std::string heatmap_text(const Heatmap& map)
{
    std::string out;
    for (int r = map.rows - 1; r >= 0; --r) {
        for (int c = 0; c < map.columns; ++c) {
            if (c > 0)
                out += ' ';
            out += std::to_string(map.counts[static_cast<std::size_t>(r * map.columns + c)]);
        }
        out += '\n';
    }
    return out;
}

std::string heatmap_pgm(const Heatmap& map)
{
    const std::int64_t peak = map.counts.empty() ? 0 : *std::max_element(map.counts.begin(), map.counts.end());
    std::string out = fmt::format("P2\n{} {}\n255\n", map.columns, map.rows);
    for (int r = map.rows - 1; r >= 0; --r) {
        for (int c = 0; c < map.columns; ++c) {
            const auto v = map.counts[static_cast<std::size_t>(r * map.columns + c)];
            const long level = peak > 0 ? std::lround(255.0 * static_cast<double>(v) / static_cast<double>(peak)) : 0;
            if (c > 0)
                out += ' ';
            out += std::to_string(level);
        }
        out += '\n';
    }
    return out;
}

std::vector<Point> all_behaviours(std::span<const RunRecord> records)
{
    std::vector<Point> out;
    for (const auto& r : records)
        for (const auto& g : r.generations)
            out.insert(out.end(), g.behaviours.begin(), g.behaviours.end());
    return out;
}

std::vector<JobResult> run_many(std::span<const RunConfig> configs, int workers,
                                const std::function<void(std::size_t, const JobResult&)>& done)
{
    std::vector<JobResult> results(configs.size());
    if (workers < 1)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(configs.size(), 1)));
    std::atomic<std::size_t> next{0};
    std::mutex report;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i].record = run(configs[i]);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
            if (done) {
                std::lock_guard lock(report);
                done(i, results[i]);
            }
        }
    };
    if (workers == 1) {
        worker();
        return results;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    return results;
}

std::size_t select_cell(std::span<const SweepCell> table)
{
    if (table.empty())
        throw std::invalid_argument("select_cell: empty table");
    auto evaluations = [](const SweepCell& c) {
        return c.mean_evaluations.value_or(std::numeric_limits<double>::infinity());
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& c = table[i];
        const auto& b = table[best];
        if (c.successes > b.successes || (c.successes == b.successes && evaluations(c) < evaluations(b)))
            best = i;
    }
    return best;
}

std::vector<SweepCell> sensitivity_sweep(const RunConfig& base, std::span<const std::pair<int, int>> grid, int runs,
                                         int workers)
{
    if (grid.empty())
        throw std::invalid_argument("sensitivity_sweep: empty grid");
    if (runs < 1)
        throw std::invalid_argument("sensitivity_sweep: runs must be at least 1");
    std::vector<RunConfig> configs;
    for (const auto& [k, n] : grid)
        for (int r = 0; r < runs; ++r) {
            RunConfig c = base;
            c.strategy.k = k;
            c.strategy.n = n;
            c.seed = base.seed + static_cast<std::uint64_t>(r);
            c.record_behaviours = false;
            c.stop_on_success = true;
            c.validate();
            configs.push_back(std::move(c));
        }
    const auto results = run_many(configs, workers);
    std::vector<SweepCell> table;
    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
        SweepCell s{grid[cell].first, grid[cell].second, runs, 0, std::nullopt};
        double sum = 0.0;
        for (int r = 0; r < runs; ++r) {
            const auto& res = results[cell * static_cast<std::size_t>(runs) + static_cast<std::size_t>(r)];
            if (!res.record)
                throw std::runtime_error(fmt::format("sweep run failed: {}", res.error));
            if (res.record->first_success) {
                ++s.successes;
                sum += static_cast<double>(*res.record->first_success);
            }
        }
        if (s.successes > 0)
            s.mean_evaluations = sum / s.successes;
        table.push_back(s);
    }
    return table;
}

std::vector<std::vector<double>> strictly_greater_matrix(const std::vector<std::vector<int>>& successes)
{
    const std::size_t S = successes.size();
    std::vector<std::vector<double>> m(S, std::vector<double>(S, 0.0));
    if (S == 0)
        return m;
    const std::size_t M = successes[0].size();
    for (const auto& row : successes)
        if (row.size() != M)
            throw std::invalid_argument("strictly_greater_matrix: ragged success table");
    if (M == 0)
        return m;
    for (std::size_t a = 0; a < S; ++a)
        for (std::size_t b = 0; b < S; ++b) {
            int wins = 0;
            for (std::size_t k = 0; k < M; ++k)
                if (successes[a][k] > successes[b][k])
                    ++wins;
            m[a][b] = 100.0 * wins / static_cast<double>(M);
        }
    return m;
}

std::vector<double> row_means(const std::vector<std::vector<double>>& matrix)
{
    const std::size_t S = matrix.size();
    std::vector<double> out(S, 0.0);
    if (S < 2)
        return out;
    for (std::size_t a = 0; a < S; ++a) {
        double sum = 0.0;
        for (std::size_t b = 0; b < S; ++b)
            if (a != b)
                sum += matrix[a][b];
        out[a] = sum / static_cast<double>(S - 1);
    }
    return out;
}

std::vector<double> column_means(const std::vector<std::vector<double>>& matrix)
{
    const std::size_t S = matrix.size();
    std::vector<double> out(S, 0.0);
    if (S < 2)
        return out;
    for (std::size_t b = 0; b < S; ++b) {
        double sum = 0.0;
        for (std::size_t a = 0; a < S; ++a)
            if (a != b)
                sum += matrix[a][b];
        out[b] = sum / static_cast<double>(S - 1);
    }
    return out;
}

BenchmarkResult generated_benchmark(std::span<const maze::MazeSpec> mazes, std::span<const RunConfig> strategies,
                                    int runs, int workers)
{
    if (mazes.empty() || strategies.empty() || runs < 1)
        throw std::invalid_argument("generated_benchmark: need mazes, strategies and runs >= 1");
    std::vector<RunConfig> configs;
    for (const auto& s : strategies)
        for (std::size_t m = 0; m < mazes.size(); ++m)
            for (int r = 0; r < runs; ++r) {
                RunConfig c = s;
                c.maze = mazes[m];
                c.seed = s.seed + m * static_cast<std::uint64_t>(runs) + static_cast<std::uint64_t>(r);
                c.record_behaviours = false;
                c.stop_on_success = true; // only the first success matters here
                configs.push_back(std::move(c));
            }
    const auto results = run_many(configs, workers);

    BenchmarkResult out;
    for (const auto& m : mazes)
        out.mazes.push_back(m.name);
    std::size_t job = 0;
    for (const auto& s : strategies) {
        out.strategies.emplace_back(search::to_string(s.strategy.kind));
        std::vector<int> row(mazes.size(), 0);
        std::vector<RunRecord> records;
        for (std::size_t m = 0; m < mazes.size(); ++m)
            for (int r = 0; r < runs; ++r, ++job) {
                const auto& res = results[job];
                if (!res.record) {
                    out.failures.push_back(fmt::format("{} on {} seed {}: {}", out.strategies.back(),
                                                       mazes[m].name, configs[job].seed, res.error));
                    continue;
                }
                if (res.record->first_success)
                    ++row[m];
                RunRecord brief;
                brief.first_success = res.record->first_success;
                records.push_back(std::move(brief));
            }
        out.successes.push_back(std::move(row));
        out.robustness.push_back(robustness_curve(records));
    }
    out.matrix = strictly_greater_matrix(out.successes);
    out.row_mean = row_means(out.matrix);
    out.column_mean = column_means(out.matrix);
    return out;
}

std::string efficiency_csv(std::span<const EfficiencyPoint> curve)
{
    std::string out = "evaluation,mean_max_fitness,ci95\n";
    for (const auto& p : curve)
        out += fmt::format("{},{},{}\n", p.evaluations, format_real(p.mean), format_real(p.ci));
    return out;
}

std::string robustness_csv(std::span<const RobustnessStep> curve)
{
    std::string out = "evaluation,successes\n";
    for (const auto& s : curve)
        out += fmt::format("{},{}\n", s.evaluations, s.successes);
    return out;
}

std::string sweep_csv(std::span<const SweepCell> table)
{
    std::string out = "k,n,runs,successes,mean_evaluations\n";
    for (const auto& c : table)
        out += fmt::format("{},{},{},{},{}\n", c.k, c.n, c.runs, c.successes,
                           c.mean_evaluations ? format_real(*c.mean_evaluations) : std::string());
    return out;
}

std::string matrix_csv(const BenchmarkResult& result)
{
    std::string out = "strategy";
    for (const auto& s : result.strategies)
        out += "," + s;
    out += ",row_mean\n";
    for (std::size_t a = 0; a < result.strategies.size(); ++a) {
        out += result.strategies[a];
        for (double v : result.matrix[a])
            out += "," + format_real(v);
        out += "," + format_real(result.row_mean[a]) + "\n";
    }
    out += "column_mean";
    for (double v : result.column_mean)
        out += "," + format_real(v);
    out += ",\n";
    return out;
}

} // namespace divergent::experiment
