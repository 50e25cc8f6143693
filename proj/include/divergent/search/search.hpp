#pragma once

#include "divergent/geometry.hpp"
#include "divergent/maze/maze.hpp"
#include "divergent/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divergent::search {

enum class StrategyKind { objective, novelty, surprise, random, surprise_random, surprise_no_prediction };

std::string_view to_string(StrategyKind kind);
/// Accepts the names printed by to_string; throws ConfigError otherwise.
StrategyKind strategy_kind_from_string(std::string_view name);
bool is_surprise_variant(StrategyKind kind);

struct ArchiveParams {
    double initial_threshold = 6.0;
    int raise_above = 4;          // more admissions than this in a generation raise the threshold
    double raise_factor = 1.2;
    int drought_generations = 10; // this many generations without admissions lower it
    double lower_factor = 0.9;
};

struct StrategyConfig {
    StrategyKind kind = StrategyKind::surprise;
    int n = 1;
    int k = 200;
    int history = 2;
    ArchiveParams archive;
    int kmeans_max_iterations = 100;
    double objective_ceiling = 300.0;

    /// Throws ConfigError naming the offending strategy.* key.
    void validate(int population_size) const;
};

/// max(0, ceiling - distance to the goal).
double objective_score(Point behaviour, Point goal, double ceiling = 300.0);

/// Mean distance from p to its n nearest candidates (all of them when fewer),
/// skipping candidate `skip`. Ties are ordered by index. Zero with no candidates.
double mean_nearest_distance(Point p, std::span<const Point> candidates, int n,
                             std::optional<std::size_t> skip = std::nullopt);

struct NoveltyArchive {
    std::vector<Point> points;
    double threshold = 6.0;
    int admitted_last = 0; // admissions in the most recent update
    int drought = 0;       // consecutive updates without admissions

    NoveltyArchive() = default;
    explicit NoveltyArchive(double initial_threshold) : threshold(initial_threshold) {}
};

/// Mean distance to the n nearest among the other members and the archive.
double novelty_score(std::size_t index, std::span<const Point> behaviours, const NoveltyArchive& archive, int n);
std::vector<double> novelty_scores(std::span<const Point> behaviours, const NoveltyArchive& archive, int n);

/// Appends every behaviour scoring above the current threshold, then adapts the
/// threshold for the next generation. Returns the number admitted.
int update_archive(NoveltyArchive& archive, std::span<const Point> behaviours, std::span<const double> scores,
                   const ArchiveParams& params = {});

struct ClusterModel {
    std::vector<Point> centroids;
    std::vector<int> assignment;     // behaviour index -> cluster
    std::vector<char> stale;         // cluster received no members
    std::vector<int> last_updated;   // generation a cluster last had members, 0 if never
    int iterations = 0;
    int generation = 0;

    std::size_t k() const { return centroids.size(); }
};

/// k-means++ seeds; when every remaining squared distance is zero the next
/// seed is drawn uniformly.
std::vector<Point> kmeans_plus_plus(std::span<const Point> points, int k, Rng& rng);

/// Lloyd's iterations from the previous model's centroids, or from k-means++
/// seeds when there is none. Points go to the nearest centroid, lower index on
/// ties. Empty clusters keep their centroid and are flagged stale. Stops when
/// the assignment repeats or after max_iterations updates.
ClusterModel cluster_population(std::span<const Point> behaviours, int k, const ClusterModel* previous, Rng& rng,
                                int generation = 0, int max_iterations = 100);

struct PredictionSet {
    std::vector<Point> points;
    std::vector<char> stale;

    std::size_t k() const { return points.size(); }
};

/// Linear projection p = 2 c_{t-1} - c_{t-2} per cluster. A cluster stale at
/// t-1 keeps its previous prediction, or its centroid when it never had one.
PredictionSet predict(const ClusterModel& older, const ClusterModel& newer, const PredictionSet* previous = nullptr);

/// Mean distance to the n nearest predictions.
double surprise_score(Point behaviour, std::span<const Point> predictions, int n);

/// Scores for the three baselines. SS_np clusters the behaviours itself,
/// seeded from `previous`, and stores the model in `current` when given.
std::vector<double> baseline_scores(StrategyKind kind, std::span<const Point> behaviours, const maze::MazeSpec& maze,
                                    Rng& rng, int k, int n, const ClusterModel* previous = nullptr,
                                    ClusterModel* current = nullptr);

/// Per-run scoring state for any of the six strategies. Call score() once per
/// generation with that generation's behaviours.
class ScoringStrategy {
public:
    ScoringStrategy(const StrategyConfig& config, const maze::MazeSpec& maze);

    std::vector<double> score(std::span<const Point> behaviours, Rng& rng);

    const StrategyConfig& config() const { return config_; }
    int generation() const { return generation_; }
    const NoveltyArchive& archive() const { return archive_; }
    const std::optional<PredictionSet>& predictions() const { return predictions_; }
    const std::optional<ClusterModel>& latest_model() const { return newer_; }

private:
    std::vector<double> surprise(std::span<const Point> behaviours, Rng& rng);
    std::vector<double> random_scores(std::size_t count, Rng& rng) const;

    StrategyConfig config_;
    maze::MazeSpec maze_;
    int generation_ = 0;
    NoveltyArchive archive_;
    std::optional<ClusterModel> older_;
    std::optional<ClusterModel> newer_;
    std::optional<PredictionSet> predictions_;
};

} // namespace divergent::search
