#include "divergent/search/search.hpp"

#include "divergent/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>
#include <utility>

namespace divergent::search {

namespace {

constexpr std::array<std::pair<StrategyKind, std::string_view>, 6> kind_names{{
    {StrategyKind::objective, "objective"},
    {StrategyKind::novelty, "novelty"},
    {StrategyKind::surprise, "surprise"},
    {StrategyKind::random, "random"},
    {StrategyKind::surprise_random, "surprise-random"},
    {StrategyKind::surprise_no_prediction, "surprise-no-prediction"},
}};

std::vector<int> assign(std::span<const Point> points, const std::vector<Point>& centroids)
{
    std::vector<int> out(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            const double d = squared_distance(points[i], centroids[c]);
            if (d < best) {
                best = d;
                out[i] = static_cast<int>(c);
            }
        }
    }
    return out;
}

void recentre(std::span<const Point> points, const std::vector<int>& assignment, std::vector<Point>& centroids)
{
    std::vector<Point> sum(centroids.size());
    std::vector<std::size_t> count(centroids.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignment[i]);
        sum[c] = sum[c] + points[i];
        ++count[c];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c)
        if (count[c] > 0)
            centroids[c] = sum[c] * (1.0 / static_cast<double>(count[c]));
}

std::vector<Point> uniform_points(int k, const maze::MazeSpec& maze, Rng& rng)
{
    std::vector<Point> out(static_cast<std::size_t>(k));
    for (auto& p : out) {
        p.x = rng.uniform(0.0, maze.width);
        p.y = rng.uniform(0.0, maze.height);
    }
    return out;
}

} // namespace

std::string_view to_string(StrategyKind kind)
{
    for (const auto& [k, name] : kind_names)
        if (k == kind)
            return name;
    return "unknown";
}

StrategyKind strategy_kind_from_string(std::string_view name)
{
    for (const auto& [k, n] : kind_names)
        if (n == name)
            return k;
    throw ConfigError(fmt::format("strategy.kind: unknown strategy '{}'", name));
}

bool is_surprise_variant(StrategyKind kind)
{
    return kind == StrategyKind::surprise || kind == StrategyKind::surprise_random ||
           kind == StrategyKind::surprise_no_prediction;
}

void StrategyConfig::validate(int population_size) const
{
    if (n < 1)
        throw ConfigError(fmt::format("strategy.n must be at least 1, got {}", n));
    if (history != 2)
        throw ConfigError(fmt::format("strategy.history must be 2, got {}", history));
    if (is_surprise_variant(kind) && (k < n || k > population_size))
        throw ConfigError(fmt::format("strategy.k must lie in [n, P] = [{}, {}], got {}", n, population_size, k));
    if (!(archive.initial_threshold > 0.0))
        throw ConfigError("strategy.novelty_threshold must be positive");
    if (archive.raise_above < 0)
        throw ConfigError("strategy.archive_raise_above must be non-negative");
    if (!(archive.raise_factor >= 1.0))
        throw ConfigError("strategy.archive_raise_factor must be at least 1");
    if (archive.drought_generations < 1)
        throw ConfigError("strategy.archive_drought must be at least 1");
    if (!(archive.lower_factor > 0.0 && archive.lower_factor <= 1.0))
        throw ConfigError("strategy.archive_lower_factor must lie in (0, 1]");
    if (kmeans_max_iterations < 1)
        throw ConfigError("strategy.kmeans_max_iterations must be at least 1");
    if (!(objective_ceiling > 0.0))
        throw ConfigError("strategy.objective_ceiling must be positive");
}

double objective_score(Point behaviour, Point goal, double ceiling)
{
    return std::max(0.0, ceiling - distance(behaviour, goal));
}

double mean_nearest_distance(Point p, std::span<const Point> candidates, int n, std::optional<std::size_t> skip)
{
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (!skip || *skip != i)
            d.emplace_back(distance(p, candidates[i]), i);
    if (d.empty())
        return 0.0;
    const auto m = std::min(d.size(), static_cast<std::size_t>(std::max(n, 1)));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(m - 1), d.end());
    std::sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(m));
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        sum += d[i].first;
    return sum / static_cast<double>(m);
}

double novelty_score(std::size_t index, std::span<const Point> behaviours, const NoveltyArchive& archive, int n)
{
    if (index >= behaviours.size())
        throw std::out_of_range("novelty_score: index out of range");
    std::vector<Point> pool(behaviours.begin(), behaviours.end());
    pool.insert(pool.end(), archive.points.begin(), archive.points.end());
    return mean_nearest_distance(behaviours[index], pool, n, index);
}

std::vector<double> novelty_scores(std::span<const Point> behaviours, const NoveltyArchive& archive, int n)
{
    std::vector<Point> pool(behaviours.begin(), behaviours.end());
    pool.insert(pool.end(), archive.points.begin(), archive.points.end());
    std::vector<double> out(behaviours.size());
    for (std::size_t i = 0; i < behaviours.size(); ++i)
        out[i] = mean_nearest_distance(behaviours[i], pool, n, i);
    return out;
}

int update_archive(NoveltyArchive& archive, std::span<const Point> behaviours, std::span<const double> scores,
                   const ArchiveParams& params)
{
    if (behaviours.size() != scores.size())
        throw std::invalid_argument("update_archive: behaviour and score counts differ");
    int admitted = 0;
    for (std::size_t i = 0; i < behaviours.size(); ++i)
        if (scores[i] > archive.threshold) {
            archive.points.push_back(behaviours[i]);
            ++admitted;
        }
    archive.admitted_last = admitted;
    if (admitted > params.raise_above)
        archive.threshold *= params.raise_factor;
    archive.drought = admitted == 0 ? archive.drought + 1 : 0;
    if (archive.drought >= params.drought_generations) {
        archive.threshold *= params.lower_factor;
        archive.drought = 0;
    }
    return admitted;
}

std::vector<Point> kmeans_plus_plus(std::span<const Point> points, int k, Rng& rng)
{
    if (k < 1 || points.empty())
        throw std::invalid_argument("kmeans_plus_plus: need k >= 1 and at least one point");
    std::vector<Point> seeds;
    seeds.reserve(static_cast<std::size_t>(k));
    seeds.push_back(points[rng.uniform_int<std::size_t>(0, points.size() - 1)]);
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        d2[i] = squared_distance(points[i], seeds[0]);
    while (static_cast<int>(seeds.size()) < k) {
        double total = 0.0;
        for (double d : d2)
            total += d;
        std::size_t pick = 0;
        if (total > 0.0) {
            const double r = rng.uniform(0.0, total);
            double acc = 0.0;
            pick = points.size();
            for (std::size_t i = 0; i < points.size(); ++i) {
                acc += d2[i];
                if (d2[i] > 0.0 && r < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick == points.size()) // rounding at the top end
                for (std::size_t i = points.size(); i-- > 0;)
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
        } else {
            pick = rng.uniform_int<std::size_t>(0, points.size() - 1);
        }
        seeds.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i)
            d2[i] = std::min(d2[i], squared_distance(points[i], points[pick]));
    }
    return seeds;
}

ClusterModel cluster_population(std::span<const Point> behaviours, int k, const ClusterModel* previous, Rng& rng,
                                int generation, int max_iterations)
{
    if (k < 1 || static_cast<std::size_t>(k) > behaviours.size())
        throw std::invalid_argument(fmt::format("cluster_population: k = {} outside [1, {}]", k, behaviours.size()));
    ClusterModel m;
    m.generation = generation;
    if (previous) {
        if (previous->k() != static_cast<std::size_t>(k))
            throw std::invalid_argument("cluster_population: previous model has a different k");
        m.centroids = previous->centroids;
        m.last_updated = previous->last_updated;
    } else {
        m.centroids = kmeans_plus_plus(behaviours, k, rng);
        m.last_updated.assign(static_cast<std::size_t>(k), 0);
    }
    m.assignment = assign(behaviours, m.centroids);
    bool converged = false;
    while (m.iterations < max_iterations) {
        recentre(behaviours, m.assignment, m.centroids);
        ++m.iterations;
        auto next = assign(behaviours, m.centroids);
        if (next == m.assignment) {
            converged = true;
            break;
        }
        m.assignment = std::move(next);
    }
    if (!converged)
        recentre(behaviours, m.assignment, m.centroids);
    m.stale.assign(static_cast<std::size_t>(k), 1);
    for (int c : m.assignment)
        m.stale[static_cast<std::size_t>(c)] = 0;
    for (std::size_t c = 0; c < m.k(); ++c)
        if (!m.stale[c])
            m.last_updated[c] = generation;
    return m;
}

PredictionSet predict(const ClusterModel& older, const ClusterModel& newer, const PredictionSet* previous)
{
    if (older.k() != newer.k() || (previous && previous->k() != newer.k()))
        throw std::invalid_argument("predict: models disagree on k");
    PredictionSet p;
    p.points.resize(newer.k());
    p.stale.assign(newer.k(), 0);
    for (std::size_t j = 0; j < newer.k(); ++j) {
        const bool stale = !newer.stale.empty() && newer.stale[j];
        if (stale) {
            p.points[j] = previous ? previous->points[j] : newer.centroids[j];
            p.stale[j] = 1;
        } else {
            const Point c1 = newer.centroids[j];
            const Point c0 = older.centroids[j];
            p.points[j] = {2.0 * c1.x - c0.x, 2.0 * c1.y - c0.y};
        }
    }
    return p;
}

double surprise_score(Point behaviour, std::span<const Point> predictions, int n)
{
    return mean_nearest_distance(behaviour, predictions, n);
}

std::vector<double> baseline_scores(StrategyKind kind, std::span<const Point> behaviours, const maze::MazeSpec& maze,
                                    Rng& rng, int k, int n, const ClusterModel* previous, ClusterModel* current)
{
    std::vector<double> out(behaviours.size());
    switch (kind) {
    case StrategyKind::random:
        for (auto& s : out)
            s = rng.uniform();
        return out;
    case StrategyKind::surprise_random: {
        const auto points = uniform_points(k, maze, rng);
        for (std::size_t i = 0; i < behaviours.size(); ++i)
            out[i] = surprise_score(behaviours[i], points, n);
        return out;
    }
    case StrategyKind::surprise_no_prediction: {
        auto model = cluster_population(behaviours, k, previous, rng);
        for (std::size_t i = 0; i < behaviours.size(); ++i)
            out[i] = surprise_score(behaviours[i], model.centroids, n);
        if (current)
            *current = std::move(model);
        return out;
    }
    default:
        throw std::invalid_argument(fmt::format("baseline_scores: '{}' is not a baseline", to_string(kind)));
    }
}

ScoringStrategy::ScoringStrategy(const StrategyConfig& config, const maze::MazeSpec& maze)
    : config_(config), maze_(maze), archive_(config.archive.initial_threshold)
{
}

std::vector<double> ScoringStrategy::random_scores(std::size_t count, Rng& rng) const
{
    std::vector<double> out(count);
    for (auto& s : out)
        s = rng.uniform();
    return out;
}

std::vector<double> ScoringStrategy::score(std::span<const Point> behaviours, Rng& rng)
{
    ++generation_;
    switch (config_.kind) {
    case StrategyKind::objective: {
        std::vector<double> out(behaviours.size());
        for (std::size_t i = 0; i < behaviours.size(); ++i)
            out[i] = objective_score(behaviours[i], maze_.goal, config_.objective_ceiling);
        return out;
    }
    case StrategyKind::novelty: {
        auto out = novelty_scores(behaviours, archive_, config_.n);
        update_archive(archive_, behaviours, out, config_.archive);
        return out;
    }
    case StrategyKind::random:
        return random_scores(behaviours.size(), rng);
    case StrategyKind::surprise_random:
        if (generation_ <= config_.history)
            return random_scores(behaviours.size(), rng);
        return baseline_scores(config_.kind, behaviours, maze_, rng, config_.k, config_.n);
    case StrategyKind::surprise_no_prediction: {
        ClusterModel current;
        // the clustering still runs in the warm-up generations so seeding carries over
        auto out = baseline_scores(config_.kind, behaviours, maze_, rng, config_.k, config_.n,
                                   newer_ ? &*newer_ : nullptr, &current);
        current.generation = generation_;
        newer_ = std::move(current);
        if (generation_ <= config_.history)
            return random_scores(behaviours.size(), rng);
        return out;
    }
    case StrategyKind::surprise:
        return surprise(behaviours, rng);
    }
    throw std::logic_error("unhandled strategy kind");
}

std::vector<double> ScoringStrategy::surprise(std::span<const Point> behaviours, Rng& rng)
{
    std::vector<double> out;
    if (older_ && newer_) {
        predictions_ = predict(*older_, *newer_, predictions_ ? &*predictions_ : nullptr);
        out.resize(behaviours.size());
        for (std::size_t i = 0; i < behaviours.size(); ++i)
            out[i] = surprise_score(behaviours[i], predictions_->points, config_.n);
    } else {
        out = random_scores(behaviours.size(), rng);
    }
    auto model = cluster_population(behaviours, config_.k, newer_ ? &*newer_ : nullptr, rng, generation_,
                                    config_.kmeans_max_iterations);
    older_ = std::move(newer_);
    newer_ = std::move(model);
    return out;
}

} // namespace divergent::search
