#include "divergent/experiment/config.hpp"

#include "divergent/errors.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace divergent::experiment {

namespace {

constexpr std::array<Preset, 6> presets{{
    {"default", 300, 400, 200, 1, 15},
    {"medium", 300, 400, 200, 1, 15},
    {"hard", 300, 400, 100, 1, 15},
    {"very_hard", 1000, 500, 200, 2, 15},
    {"extremely_hard", 1000, 1000, 220, 2, 10},
    {"generated", 600, 200, 200, 2, 15},
}};

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected)
{
    throw ConfigError(fmt::format("{}: invalid value '{}' (expected {})", key, value, expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value)
{
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        bad_value(key, value, std::is_integral_v<T> ? "an integer" : "a number");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    bad_value(key, value, "true or false");
}

struct Key {
    std::string_view name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T, typename Ref>
Key number(std::string_view name, Ref ref)
{
    return {name,
            [name, ref](RunConfig& c, std::string_view v) { ref(c) = parse_number<T>(name, v); },
            [ref](const RunConfig& c) { return fmt::format("{}", ref(const_cast<RunConfig&>(c))); }};
}

template <typename Ref>
Key flag(std::string_view name, Ref ref)
{
    return {name, [name, ref](RunConfig& c, std::string_view v) { ref(c) = parse_bool(name, v); },
            [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

#define REF(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Key>& keys()
{
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back({"experiment.maze", [](RunConfig& c, std::string_view v) { c.maze_path = std::string(v); },
                     [](const RunConfig& c) { return c.maze_path.generic_string(); }});
        k.push_back({"experiment.preset", [](RunConfig& c, std::string_view v) { c.preset = std::string(v); },
                     [](const RunConfig& c) { return c.preset; }});
        k.push_back(number<std::uint64_t>("experiment.seed", REF(seed)));
        k.push_back(number<int>("experiment.generations", REF(generations)));
        k.push_back(number<int>("experiment.steps", REF(steps)));
        k.push_back(number<double>("experiment.heatmap_cell", REF(heatmap_cell)));
        k.push_back(flag("experiment.stop_on_success", REF(stop_on_success)));
        k.push_back(flag("experiment.record_behaviours", REF(record_behaviours)));
        k.push_back(flag("experiment.record_predictions", REF(record_predictions)));

        k.push_back({"strategy.kind",
                     [](RunConfig& c, std::string_view v) { c.strategy.kind = search::strategy_kind_from_string(v); },
                     [](const RunConfig& c) { return std::string(search::to_string(c.strategy.kind)); }});
        k.push_back(number<int>("strategy.n", REF(strategy.n)));
        k.push_back(number<int>("strategy.k", REF(strategy.k)));
        k.push_back(number<int>("strategy.history", REF(strategy.history)));
        k.push_back(number<double>("strategy.novelty_threshold", REF(strategy.archive.initial_threshold)));
        k.push_back(number<int>("strategy.archive_raise_above", REF(strategy.archive.raise_above)));
        k.push_back(number<double>("strategy.archive_raise_factor", REF(strategy.archive.raise_factor)));
        k.push_back(number<int>("strategy.archive_drought", REF(strategy.archive.drought_generations)));
        k.push_back(number<double>("strategy.archive_lower_factor", REF(strategy.archive.lower_factor)));
        k.push_back(number<int>("strategy.kmeans_max_iterations", REF(strategy.kmeans_max_iterations)));
        k.push_back(number<double>("strategy.objective_ceiling", REF(strategy.objective_ceiling)));

        k.push_back(number<int>("neat.population_size", REF(neat.population_size)));
        k.push_back(number<double>("neat.c1_excess", REF(neat.compatibility.c1_excess)));
        k.push_back(number<double>("neat.c2_disjoint", REF(neat.compatibility.c2_disjoint)));
        k.push_back(number<double>("neat.c3_weight", REF(neat.compatibility.c3_weight)));
        k.push_back(number<int>("neat.normalize_threshold", REF(neat.compatibility.normalize_threshold)));
        k.push_back(number<double>("neat.compat_threshold", REF(neat.compat_threshold)));
        k.push_back(number<double>("neat.compat_threshold_step", REF(neat.compat_threshold_step)));
        k.push_back(number<double>("neat.compat_threshold_min", REF(neat.compat_threshold_min)));
        k.push_back(number<int>("neat.target_species", REF(neat.target_species)));
        k.push_back(number<double>("neat.weight_init_range", REF(neat.weight_init_range)));
        k.push_back(number<double>("neat.weight_limit", REF(neat.weight_limit)));
        k.push_back(number<double>("neat.weight_mutation_prob", REF(neat.weight_mutation_prob)));
        k.push_back(number<double>("neat.weight_perturb_power", REF(neat.weight_perturb_power)));
        k.push_back(number<double>("neat.weight_replace_prob", REF(neat.weight_replace_prob)));
        k.push_back(number<double>("neat.add_connection_prob", REF(neat.add_connection_prob)));
        k.push_back(number<double>("neat.add_node_prob", REF(neat.add_node_prob)));
        k.push_back(flag("neat.allow_recurrent", REF(neat.allow_recurrent)));
        k.push_back(number<double>("neat.crossover_prob", REF(neat.crossover_prob)));
        k.push_back(number<double>("neat.interspecies_mating_prob", REF(neat.interspecies_mating_prob)));
        k.push_back(number<double>("neat.disabled_inherit_prob", REF(neat.disabled_inherit_prob)));
        k.push_back(number<int>("neat.elitism", REF(neat.elitism)));
        k.push_back(number<double>("neat.survival_threshold", REF(neat.survival_threshold)));
        k.push_back(number<int>("neat.stagnation_limit", REF(neat.stagnation_limit)));
        k.push_back(number<double>("neat.sigmoid_slope", REF(neat.sigmoid_slope)));

        k.push_back(number<double>("sim.robot_radius", REF(robot.radius)));
        k.push_back(number<double>("sim.rangefinder_range", REF(robot.rangefinder_range)));
        k.push_back(number<double>("sim.max_speed", REF(robot.max_speed)));
        k.push_back(number<double>("sim.max_angular_velocity", REF(robot.max_angular_velocity)));
        k.push_back(number<double>("sim.turn_scale", REF(robot.turn_scale)));
        k.push_back(number<double>("sim.speed_scale", REF(robot.speed_scale)));
        k.push_back(number<double>("sim.success_radius", REF(robot.success_radius)));
        k.push_back({"sim.collision",
                     [](RunConfig& c, std::string_view v) {
                         if (v == "slide")
                             c.robot.collision = maze::CollisionMode::slide;
                         else if (v == "stop")
                             c.robot.collision = maze::CollisionMode::stop;
                         else
                             bad_value("sim.collision", v, "slide or stop");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.robot.collision == maze::CollisionMode::slide ? "slide" : "stop");
                     }});
        return k;
    }();
    return table;
}

#undef REF

const Key& find_key(std::string_view key)
{
    for (const auto& k : keys())
        if (k.name == key)
            return k;
    throw ConfigError(fmt::format("{}: unknown configuration key", key));
}

std::string preset_for_maze(const std::filesystem::path& maze_path)
{
    const std::string stem = maze_path.stem().string();
    if (find_preset(stem))
        return stem;
    if (stem.rfind("gen", 0) == 0)
        return "generated";
    return "default";
}

} // namespace

void RunConfig::validate() const
{
    neat.validate();
    robot.validate();
    strategy.validate(neat.population_size);
    if (generations < 1)
        throw ConfigError(fmt::format("experiment.generations must be at least 1, got {}", generations));
    if (steps < 1)
        throw ConfigError(fmt::format("experiment.steps must be at least 1, got {}", steps));
    if (!(heatmap_cell > 0.0))
        throw ConfigError(fmt::format("experiment.heatmap_cell must be positive, got {}", heatmap_cell));
    if (auto problem = maze::check(maze); !problem.empty())
        throw ConfigError(fmt::format("experiment.maze: {}", problem));
}

std::optional<Preset> find_preset(std::string_view name)
{
    for (const auto& p : presets)
        if (p.name == name)
            return p;
    return std::nullopt;
}

void apply_preset(RunConfig& config, const Preset& preset)
{
    config.generations = preset.generations;
    config.steps = preset.steps;
    config.strategy.k = preset.k;
    config.strategy.n = config.strategy.kind == search::StrategyKind::novelty ? preset.novelty_n : preset.surprise_n;
}

Settings parse_settings(std::string_view text)
{
    Settings out;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParseError(fmt::format("malformed section header '{}'", line), line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(fmt::format("expected 'key = value', got '{}'", line), line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("empty key", line_no);
        std::string full = section.empty() || key.find('.') != std::string_view::npos
                               ? std::string(key)
                               : fmt::format("{}.{}", section, key);
        out.emplace_back(std::move(full), std::string(value));
    }
    return out;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value)
{
    find_key(key).set(config, value);
}

Settings describe(const RunConfig& config)
{
    Settings out;
    for (const auto& k : keys())
        out.emplace_back(std::string(k.name), k.get(config));
    return out;
}

RunConfig build_run_config(const Settings& settings, const std::filesystem::path& base_dir)
{
    RunConfig c;
    for (const auto& [key, value] : settings) {
        find_key(key); // reject unknown keys before anything else
        if (key == "strategy.kind" || key == "experiment.preset" || key == "experiment.maze")
            apply_setting(c, key, value);
    }
    const std::string preset_name = c.preset == "auto" ? preset_for_maze(c.maze_path) : c.preset;
    const auto preset = find_preset(preset_name);
    if (!preset)
        throw ConfigError(fmt::format("experiment.preset: unknown preset '{}'", preset_name));
    apply_preset(c, *preset);
    for (const auto& [key, value] : settings)
        apply_setting(c, key, value);
    if (c.maze_path.empty())
        throw ConfigError("experiment.maze: no maze file given");
    if (c.maze_path.is_relative())
        c.maze_path = base_dir / c.maze_path;
    c.maze = maze::load_maze_file(c.maze_path);
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const Settings& overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    Settings settings;
    try {
        settings = parse_settings(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
    settings.insert(settings.end(), overrides.begin(), overrides.end());
    return build_run_config(settings, path.parent_path());
}

} // namespace divergent::experiment
