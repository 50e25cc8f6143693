#include "divergent/cli/commands.hpp"

#include "divergent/errors.hpp"
#include "divergent/experiment/analysis.hpp"
#include "divergent/experiment/run.hpp"
#include "divergent/neat/genome.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>

namespace divergent::cli {

namespace {

using experiment::RunConfig;
using experiment::RunRecord;
using experiment::Settings;

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
}

void make_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
}

template <typename T>
T parse_number(std::string_view text, std::string_view what)
{
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw ConfigError(fmt::format("{}: bad number '{}'", what, text));
    return value;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto at = s.find(sep);
        out.push_back(trim(s.substr(0, at)));
        if (at == std::string_view::npos)
            return out;
        s.remove_prefix(at + 1);
    }
}

std::string run_stem(const RunRecord& r)
{
    return fmt::format("{}_{}_seed{}", r.maze, r.strategy, r.seed);
}

std::string summary_line(const RunRecord& r)
{
    return fmt::format("{} {} seed {}: solved={} evaluations={} max_fitness={}", r.maze, r.strategy, r.seed,
                       r.first_success ? "yes" : "no", r.first_success.value_or(r.evaluations()),
                       experiment::format_real(r.champion_fitness));
}

void write_run_files(const RunRecord& r, const RunConfig& c, const fs::path& dir, const std::string& stem)
{
    write_file(dir / (stem + ".csv"), experiment::to_csv(r));
    write_file(dir / (stem + ".genome"), neat::to_text(r.champion));
    if (c.record_behaviours)
        write_file(dir / (stem + "_behaviours.csv"), experiment::behaviours_csv(r));
    if (c.record_predictions)
        write_file(dir / (stem + "_predictions.csv"), experiment::predictions_csv(r));
}

void write_heatmap(const fs::path& dir, const std::string& stem, const experiment::Heatmap& map)
{
    write_file(dir / (stem + "_heatmap.txt"), experiment::heatmap_text(map));
    write_file(dir / (stem + "_heatmap.pgm"), experiment::heatmap_pgm(map));
}

std::vector<int> parse_int_list(std::string_view list, std::string_view what)
{
    std::vector<int> out;
    for (auto item : split(list, ',')) {
        if (item.empty())
            throw ConfigError(fmt::format("grid {}: empty item", what));
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(parse_number<int>(item, fmt::format("grid {}", what)));
            continue;
        }
        auto rest = item.substr(dots + 2);
        int step = 1;
        if (const auto slash = rest.find('/'); slash != std::string_view::npos) {
            step = parse_number<int>(rest.substr(slash + 1), fmt::format("grid {} step", what));
            rest = rest.substr(0, slash);
        }
        const int from = parse_number<int>(item.substr(0, dots), fmt::format("grid {}", what));
        const int to = parse_number<int>(rest, fmt::format("grid {}", what));
        if (step < 1 || to < from)
            throw ConfigError(fmt::format("grid {}: bad range '{}'", what, item));
        for (int v = from; v <= to; v += step)
            out.push_back(v);
    }
    return out;
}

} // namespace

RunConfig resolve_config(const ConfigSource& source)
{
    Settings overrides;
    if (source.maze)
        overrides.emplace_back("experiment.maze", fs::absolute(*source.maze).lexically_normal().string());
    if (source.strategy)
        overrides.emplace_back("strategy.kind", *source.strategy);
    if (source.seed)
        overrides.emplace_back("experiment.seed", std::to_string(*source.seed));
    overrides.insert(overrides.end(), source.overrides.begin(), source.overrides.end());
    if (source.config)
        return experiment::load_run_config(*source.config, overrides);
    if (!source.maze)
        throw ConfigError("experiment.maze: give --config or --maze");
    return experiment::build_run_config(overrides, fs::current_path());
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        const RunConfig config = resolve_config(options.source);
        make_dir(options.out);
        const RunRecord record = experiment::run(config);
        write_run_files(record, config, options.out, run_stem(record));
        out << summary_line(record) << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

Manifest parse_manifest(std::string_view text, const fs::path& base_dir)
{
    Manifest m;
    std::set<std::pair<std::string, std::uint64_t>> seen;
    for (const auto& [key, value] : experiment::parse_settings(text)) {
        if (key == "output") {
            m.output = base_dir / value;
        } else if (key == "workers") {
            m.workers = parse_number<int>(value, "workers");
            if (m.workers < 1)
                throw ConfigError("workers: must be at least 1");
        } else if (key == "run") {
            const auto space = value.find_last_of(" \t");
            if (space == std::string::npos)
                throw ConfigError(fmt::format("run: expected '<config> <seeds>', got '{}'", value));
            const fs::path config = (base_dir / std::string(trim(std::string_view(value).substr(0, space))))
                                        .lexically_normal();
            const std::string_view seeds = std::string_view(value).substr(space + 1);
            std::uint64_t first = 0;
            std::uint64_t last = 0;
            if (const auto dash = seeds.find('-'); dash != std::string_view::npos) {
                first = parse_number<std::uint64_t>(seeds.substr(0, dash), "run seeds");
                last = parse_number<std::uint64_t>(seeds.substr(dash + 1), "run seeds");
                if (last < first)
                    throw ConfigError(fmt::format("run seeds: empty range '{}'", seeds));
            } else {
                first = last = parse_number<std::uint64_t>(seeds, "run seeds");
            }
            for (auto s = first; s <= last; ++s) {
                if (!seen.emplace(config.string(), s).second)
                    throw ConfigError(fmt::format("run: '{}' seed {} listed twice", config.string(), s));
                m.runs.push_back({config, s});
            }
        } else {
            throw ConfigError(fmt::format("manifest: unknown key '{}'", key));
        }
    }
    if (m.runs.empty())
        throw ConfigError("manifest lists no runs");
    return m;
}

Manifest load_manifest(const fs::path& path)
{
    const std::string text = read_file(path);
    try {
        return parse_manifest(text, path.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

int cmd_batch(const BatchOptions& options, std::ostream& out, std::ostream& err)
{
    Manifest manifest;
    std::vector<RunConfig> configs;
    fs::path dir;
    int workers = 1;
    try {
        manifest = load_manifest(options.manifest);
        dir = options.out ? *options.out : manifest.output.empty() ? fs::path(".") : manifest.output;
        workers = options.workers.value_or(manifest.workers);
        make_dir(dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    auto stem_of = [&](std::size_t i) {
        return fmt::format("{}_seed{}", manifest.runs[i].config.stem().string(), manifest.runs[i].seed);
    };
    int failures = 0;

    // A config that fails to load fails its runs only.
    std::vector<experiment::JobResult> results(manifest.runs.size());
    std::vector<RunConfig> jobs;
    std::vector<std::size_t> entry_of;
    std::map<fs::path, std::variant<RunConfig, std::string>> loaded;
    configs.resize(manifest.runs.size());
    for (std::size_t i = 0; i < manifest.runs.size(); ++i) {
        const auto& entry = manifest.runs[i];
        auto it = loaded.find(entry.config);
        if (it == loaded.end()) {
            try {
                it = loaded.emplace(entry.config, experiment::load_run_config(entry.config)).first;
            } catch (const std::exception& e) {
                it = loaded.emplace(entry.config, std::string(e.what())).first;
            }
        }
        if (const auto* problem = std::get_if<std::string>(&it->second)) {
            ++failures;
            results[i].error = *problem;
            err << fmt::format("failed: {}: {}\n", stem_of(i), *problem);
            continue;
        }
        configs[i] = std::get<RunConfig>(it->second);
        configs[i].seed = entry.seed;
        jobs.push_back(configs[i]);
        entry_of.push_back(i);
    }

    auto done = [&](std::size_t j, const experiment::JobResult& res) {
        const std::size_t i = entry_of[j];
        if (!res.record) {
            ++failures;
            err << fmt::format("failed: {}: {}\n", stem_of(i), res.error);
            return;
        }
        try {
            write_run_files(*res.record, configs[i], dir, stem_of(i));
            out << summary_line(*res.record) << '\n';
        } catch (const std::exception& e) {
            ++failures;
            err << fmt::format("failed: {}: {}\n", stem_of(i), e.what());
        }
        out.flush();
    };
    const auto job_results = experiment::run_many(jobs, workers, done);
    for (std::size_t j = 0; j < job_results.size(); ++j)
        results[entry_of[j]] = job_results[j];

    // Aggregates per config file, in order of first appearance.
    std::vector<fs::path> groups;
    for (const auto& entry : manifest.runs)
        if (std::find(groups.begin(), groups.end(), entry.config) == groups.end())
            groups.push_back(entry.config);
    std::string summary = "config,seed,maze,strategy,solved,first_success_evaluation,evaluations,champion_fitness,"
                          "heatmap_entropy,mean_connections,mean_hidden_nodes,mean_compatibility\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].record)
            continue;
        const auto& r = *results[i].record;
        std::string entropy;
        if (configs[i].record_behaviours) {
            const auto points = experiment::all_behaviours(std::span(&r, 1));
            entropy = experiment::format_real(
                experiment::heatmap_entropy(points, configs[i].maze, configs[i].heatmap_cell).entropy);
        }
        summary += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", manifest.runs[i].config.stem().string(),
                               r.seed, r.maze, r.strategy, r.first_success ? 1 : 0,
                               r.first_success ? std::to_string(*r.first_success) : std::string(), r.evaluations(),
                               experiment::format_real(r.champion_fitness), entropy,
                               experiment::format_real(r.final_metrics.mean_connections),
                               experiment::format_real(r.final_metrics.mean_hidden_nodes),
                               experiment::format_real(r.final_metrics.mean_compatibility));
    }
    try {
        write_file(dir / "summary.csv", summary);
        for (const auto& group : groups) {
            std::vector<RunRecord> records;
            const RunConfig* config = nullptr;
            for (std::size_t i = 0; i < results.size(); ++i)
                if (manifest.runs[i].config == group && results[i].record) {
                    records.push_back(*results[i].record);
                    config = &configs[i];
                }
            if (records.empty())
                continue;
            const std::string stem = group.stem().string();
            write_file(dir / (stem + "_efficiency.csv"),
                       experiment::efficiency_csv(experiment::efficiency_curve(records)));
            const auto robustness = experiment::robustness_curve(records);
            write_file(dir / (stem + "_robustness.csv"), experiment::robustness_csv(robustness));
            if (config->record_behaviours) {
                const auto points = experiment::all_behaviours(records);
                write_heatmap(dir, stem, experiment::heatmap_entropy(points, config->maze, config->heatmap_cell));
            }
            out << fmt::format("{}: {}/{} solved\n", stem, robustness.back().successes, records.size());
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    if (failures > 0) {
        err << fmt::format("{} of {} runs failed\n", failures, results.size());
        return 1;
    }
    return 0;
}

maze::GeneratorConfig generator_config(const Settings& settings)
{
    maze::GeneratorConfig g;
    for (const auto& [key, value] : settings) {
        auto real = [&](double& field) { field = parse_number<double>(value, key); };
        auto integer = [&](int& field) { field = parse_number<int>(value, key); };
        if (key == "gen.width")
            real(g.width);
        else if (key == "gen.height")
            real(g.height);
        else if (key == "gen.min_subdivisions")
            integer(g.min_subdivisions);
        else if (key == "gen.max_subdivisions")
            integer(g.max_subdivisions);
        else if (key == "gen.corridor_min")
            real(g.corridor_min);
        else if (key == "gen.hole_width")
            real(g.hole_width);
        else if (key == "gen.inset")
            real(g.inset);
        else if (key == "gen.robot_radius")
            real(g.robot_radius);
        else if (key == "gen.cell_size")
            real(g.cell_size);
        else if (key == "gen.max_retries")
            integer(g.max_retries);
        else if (key == "gen.seed")
            g.seed = parse_number<std::uint64_t>(value, key);
        else
            throw ConfigError(fmt::format("{}: unknown key", key));
    }
    g.validate();
    return g;
}

int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        if (options.count < 1)
            throw ConfigError("count: must be at least 1");
        maze::GeneratorConfig g;
        if (options.config)
            g = generator_config(experiment::parse_settings(read_file(*options.config)));
        if (options.seed)
            g.seed = *options.seed;
        make_dir(options.out);
        const int digits = std::max(2, static_cast<int>(std::to_string(options.count).size()));
        const Rng root(g.seed);
        std::string manifest = fmt::format("# {} generated mazes, maze i drawn from stream i of the seed\n"
                                           "seed = {}\ncount = {}\n",
                                           options.count, g.seed, options.count);
        for (int i = 1; i <= options.count; ++i) {
            Rng rng = root.derive(static_cast<std::uint64_t>(i));
            auto generated = maze::generate(g, rng, options.subdivisions);
            const std::string name = fmt::format("gen_{:0{}}", i, digits);
            generated.maze.name = name;
            generated.maze.shortest_path = maze::shortest_path_estimate(generated.maze, g.cell_size, g.robot_radius);
            const fs::path file = options.out / (name + ".maze");
            maze::save_maze_file(generated.maze, file);
            if (maze::load_maze_file(file) != generated.maze)
                throw std::runtime_error(fmt::format("'{}' does not re-load to the generated maze", file.string()));
            manifest += fmt::format("maze = {}.maze # subdivisions {}, walls {}, path {}\n", name,
                                    generated.divisions.size(), generated.maze.walls.size(),
                                    generated.maze.shortest_path ? experiment::format_real(*generated.maze.shortest_path)
                                                                 : std::string("none"));
        }
        write_file(options.out / "manifest.txt", manifest);
        out << fmt::format("wrote {} mazes to {}\n", options.count, options.out.string());
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

std::vector<fs::path> load_maze_list(const fs::path& manifest)
{
    std::vector<fs::path> out;
    for (const auto& [key, value] : experiment::parse_settings(read_file(manifest))) {
        if (key == "maze")
            out.push_back((manifest.parent_path() / value).lexically_normal());
        else if (key != "seed" && key != "count")
            throw ConfigError(fmt::format("{}: unknown key '{}'", manifest.string(), key));
    }
    if (out.empty())
        throw ConfigError(fmt::format("{}: no mazes listed", manifest.string()));
    return out;
}

std::vector<std::pair<int, int>> parse_grid(std::string_view spec)
{
    std::optional<std::vector<int>> ks;
    std::optional<std::vector<int>> ns;
    for (auto part : split(spec, ';')) {
        if (part.empty())
            continue;
        const auto eq = part.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("grid: expected 'k=...' or 'n=...', got '{}'", part));
        const auto name = trim(part.substr(0, eq));
        auto values = parse_int_list(part.substr(eq + 1), name);
        if (name == "k" && !ks)
            ks = std::move(values);
        else if (name == "n" && !ns)
            ns = std::move(values);
        else
            throw ConfigError(fmt::format("grid: unexpected '{}'", name));
    }
    if (!ks || !ns)
        throw ConfigError("grid: both k and n are required");
    std::vector<std::pair<int, int>> grid;
    for (int k : *ks)
        for (int n : *ns) {
            if (k < 1 || n < 1)
                throw ConfigError(fmt::format("grid: k={} n={} must be positive", k, n));
            grid.emplace_back(k, n);
        }
    return grid;
}

int cmd_sensitivity(const SensitivityOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        if (options.runs < 1)
            throw ConfigError("runs: must be at least 1");
        const auto grid = parse_grid(options.grid);
        const RunConfig base = resolve_config(options.source);
        make_dir(options.out);
        const auto table = experiment::sensitivity_sweep(base, grid, options.runs, options.workers);
        write_file(options.out / "sweep.csv", experiment::sweep_csv(table));
        for (const auto& cell : table)
            out << fmt::format("k={} n={}: {}/{} solved, mean evaluations {}\n", cell.k, cell.n, cell.successes,
                               cell.runs,
                               cell.mean_evaluations ? experiment::format_real(*cell.mean_evaluations) : "none");
        const auto& best = table[experiment::select_cell(table)];
        out << fmt::format("selected k={} n={}\n", best.k, best.n);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_bench_generated(const BenchOptions& options, std::ostream& out, std::ostream& err)
{
    experiment::BenchmarkResult result;
    try {
        if (options.runs < 1)
            throw ConfigError("runs: must be at least 1");
        const auto files = load_maze_list(options.manifest);
        std::vector<maze::MazeSpec> mazes;
        for (const auto& f : files)
            mazes.push_back(maze::load_maze_file(f));

        std::vector<RunConfig> templates;
        std::vector<std::string> labels;
        for (const auto& path : options.configs) {
            templates.push_back(resolve_config({path, files.front(), std::nullopt, options.seed, options.overrides}));
            labels.push_back(path.stem().string());
        }
        for (const auto& kind : options.strategies) {
            templates.push_back(resolve_config({std::nullopt, files.front(), kind, options.seed, options.overrides}));
            labels.push_back(kind);
        }
        if (templates.empty())
            throw ConfigError("give at least one --config or --strategy");
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (labels[i] == labels[j])
                    labels[i] += fmt::format("_{}", i + 1);

        make_dir(options.out);
        result = experiment::generated_benchmark(mazes, templates, options.runs, options.workers);
        result.strategies = labels;

        write_file(options.out / "matrix.csv", experiment::matrix_csv(result));
        std::string successes = "strategy";
        for (const auto& m : result.mazes)
            successes += "," + m;
        successes += ",total\n";
        for (std::size_t s = 0; s < labels.size(); ++s) {
            successes += labels[s];
            int total = 0;
            for (int v : result.successes[s]) {
                successes += fmt::format(",{}", v);
                total += v;
            }
            successes += fmt::format(",{}\n", total);
            write_file(options.out / (labels[s] + "_robustness.csv"),
                       experiment::robustness_csv(result.robustness[s]));
            out << fmt::format("{}: {} successes; beats others on {}% of mazes, beaten on {}%\n", labels[s], total,
                               experiment::format_real(result.row_mean[s]),
                               experiment::format_real(result.column_mean[s]));
        }
        write_file(options.out / "successes.csv", successes);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    for (const auto& f : result.failures)
        err << "failed: " << f << '\n';
    return result.failures.empty() ? 0 : 1;
}

} // namespace divergent::cli
