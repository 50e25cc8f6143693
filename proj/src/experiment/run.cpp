#include "divergent/experiment/run.hpp"

#include "divergent/errors.hpp"
#include "divergent/maze/robot.hpp"
#include "divergent/search/search.hpp"

#include <fmt/format.h>

#include <charconv>
#include <sstream>

namespace divergent::experiment {

namespace {

constexpr std::string_view csv_header = "generation,evaluation,max_fitness,success_flag";

template <typename T>
T number(std::string_view text, int line)
{
    T out{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ParseError(fmt::format("bad number '{}'", text), line);
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos)
            return out;
        pos = next + 1;
    }
}

} // namespace

std::string format_real(double value)
{
    return fmt::format("{:.12g}", value);
}

RunRecord run(const RunConfig& config, const std::function<void(const GenerationLog&)>& progress)
{
    config.validate();
    const Rng root(config.seed);
    Rng neat_rng = root.derive(1);
    Rng search_rng = root.derive(2);

    RunRecord record;
    record.seed = config.seed;
    record.maze = config.maze.name;
    record.strategy = std::string(search::to_string(config.strategy.kind));
    record.population = config.neat.population_size;
    record.generation_budget = config.generations;
    record.step_budget = config.steps;
    record.config = describe(config);

    neat::Population pop = neat::init_population(config.neat, neat_rng);
    search::ScoringStrategy strategy(config.strategy, config.maze);
    const auto P = static_cast<std::int64_t>(pop.size());
    bool have_champion = false;
    std::vector<Point> behaviours(pop.size());

    for (int g = 1; g <= config.generations; ++g) {
        GenerationLog log;
        log.generation = g;
        log.evaluations = g * P;
        log.max_fitness = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const neat::Network net(pop.members[i], config.neat.sigmoid_slope);
            const auto result = maze::simulate(config.maze, net, config.steps, config.robot);
            behaviours[i] = result.behaviour;
            const double fitness = search::objective_score(result.behaviour, config.maze.goal, 300.0);
            log.max_fitness = std::max(log.max_fitness, fitness);
            if (result.solved && !log.success) {
                log.success = true;
                if (!record.first_success)
                    record.first_success = (g - 1) * P + static_cast<std::int64_t>(i) + 1;
            }
            if (!have_champion || fitness > record.champion_fitness) {
                record.champion = pop.members[i];
                record.champion_fitness = fitness;
                have_champion = true;
            }
        }
        if (config.record_behaviours)
            log.behaviours = behaviours;
        const auto scores = strategy.score(behaviours, search_rng);
        if (config.record_predictions) {
            if (const auto& model = strategy.latest_model())
                log.centroids = model->centroids;
            if (const auto& pred = strategy.predictions()) {
                log.predictions = pred->points;
                log.stale = pred->stale;
            }
        }
        const bool last = g == config.generations || (config.stop_on_success && log.success);
        record.generations.push_back(std::move(log));
        if (progress)
            progress(record.generations.back());
        if (last)
            break;
        pop = neat::reproduce(pop, scores, config.neat, neat_rng);
    }
    record.final_metrics = neat::genomic_metrics(pop.members, config.neat.compatibility);
    return record;
}

std::string to_csv(const RunRecord& r)
{
    std::string out(csv_header);
    out += '\n';
    for (const auto& g : r.generations)
        out += fmt::format("{},{},{},{}\n", g.generation, g.evaluations, format_real(g.max_fitness),
                           g.success ? 1 : 0);
    const auto& m = r.final_metrics;
    out += fmt::format("# seed={}\n", r.seed);
    out += fmt::format("# maze={}\n", r.maze);
    out += fmt::format("# strategy={}\n", r.strategy);
    out += fmt::format("# population={}\n", r.population);
    out += fmt::format("# generation_budget={}\n", r.generation_budget);
    out += fmt::format("# step_budget={}\n", r.step_budget);
    out += fmt::format("# first_success_evaluation={}\n",
                       r.first_success ? std::to_string(*r.first_success) : std::string("none"));
    out += fmt::format("# champion_fitness={}\n", format_real(r.champion_fitness));
    out += fmt::format("# mean_connections={}\n", format_real(m.mean_connections));
    out += fmt::format("# mean_hidden_nodes={}\n", format_real(m.mean_hidden_nodes));
    out += fmt::format("# mean_compatibility={}\n", format_real(m.mean_compatibility));
    out += fmt::format("# mean_disjoint={}\n", format_real(m.mean_disjoint));
    out += fmt::format("# mean_weight_difference={}\n", format_real(m.mean_weight_difference));
    out += fmt::format("# mean_excess={}\n", format_real(m.mean_excess));
    for (const auto& [key, value] : r.config)
        out += fmt::format("# config.{}={}\n", key, value);
    return out;
}

RunRecord parse_run_csv(std::string_view text)
{
    RunRecord r;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || line != csv_header)
        throw ParseError(fmt::format("expected header '{}'", csv_header), 1);
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        if (line.rfind("# ", 0) == 0) {
            const std::string_view body = std::string_view(line).substr(2);
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                throw ParseError("footer line without '='", line_no);
            const auto key = body.substr(0, eq);
            const auto value = body.substr(eq + 1);
            auto& m = r.final_metrics;
            if (key == "seed")
                r.seed = number<std::uint64_t>(value, line_no);
            else if (key == "maze")
                r.maze = std::string(value);
            else if (key == "strategy")
                r.strategy = std::string(value);
            else if (key == "population")
                r.population = number<int>(value, line_no);
            else if (key == "generation_budget")
                r.generation_budget = number<int>(value, line_no);
            else if (key == "step_budget")
                r.step_budget = number<int>(value, line_no);
            else if (key == "first_success_evaluation") {
                if (value != "none")
                    r.first_success = number<std::int64_t>(value, line_no);
            } else if (key == "champion_fitness")
                r.champion_fitness = number<double>(value, line_no);
            else if (key == "mean_connections")
                m.mean_connections = number<double>(value, line_no);
            else if (key == "mean_hidden_nodes")
                m.mean_hidden_nodes = number<double>(value, line_no);
            else if (key == "mean_compatibility")
                m.mean_compatibility = number<double>(value, line_no);
            else if (key == "mean_disjoint")
                m.mean_disjoint = number<double>(value, line_no);
            else if (key == "mean_weight_difference")
                m.mean_weight_difference = number<double>(value, line_no);
            else if (key == "mean_excess")
                m.mean_excess = number<double>(value, line_no);
            else if (key.rfind("config.", 0) == 0)
                r.config.emplace_back(std::string(key.substr(7)), std::string(value));
            else
                throw ParseError(fmt::format("unknown footer key '{}'", key), line_no);
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw ParseError(fmt::format("expected 4 fields, got {}", fields.size()), line_no);
        GenerationLog g;
        g.generation = number<int>(fields[0], line_no);
        g.evaluations = number<std::int64_t>(fields[1], line_no);
        g.max_fitness = number<double>(fields[2], line_no);
        const int flag = number<int>(fields[3], line_no);
        if (flag != 0 && flag != 1)
            throw ParseError("success_flag must be 0 or 1", line_no);
        g.success = flag == 1;
        r.generations.push_back(std::move(g));
    }
    return r;
}

std::string behaviours_csv(const RunRecord& record)
{
    std::string out = "generation,index,x,y\n";
    for (const auto& g : record.generations)
        for (std::size_t i = 0; i < g.behaviours.size(); ++i)
            out += fmt::format("{},{},{},{}\n", g.generation, i, format_real(g.behaviours[i].x),
                               format_real(g.behaviours[i].y));
    return out;
}

std::string predictions_csv(const RunRecord& record)
{
    std::string out = "generation,kind,cluster,x,y,stale\n";
    for (const auto& g : record.generations) {
        for (std::size_t i = 0; i < g.centroids.size(); ++i)
            out += fmt::format("{},centroid,{},{},{},0\n", g.generation, i, format_real(g.centroids[i].x),
                               format_real(g.centroids[i].y));
        for (std::size_t i = 0; i < g.predictions.size(); ++i)
            out += fmt::format("{},prediction,{},{},{},{}\n", g.generation, i, format_real(g.predictions[i].x),
                               format_real(g.predictions[i].y), i < g.stale.size() && g.stale[i] ? 1 : 0);
    }
    return out;
}

} // namespace divergent::experiment
