#include "divergent/errors.hpp"
#include "divergent/search/search.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace divergent;
using namespace divergent::search;

namespace {

std::vector<Point> random_points(Rng& rng, std::size_t n, double scale = 100.0)
{
    std::vector<Point> out(n);
    for (auto& p : out)
        p = {rng.uniform(0, scale), rng.uniform(0, scale)};
    return out;
}

ClusterModel model_of(std::vector<Point> centroids, std::vector<char> stale = {})
{
    ClusterModel m;
    m.centroids = std::move(centroids);
    m.stale = stale.empty() ? std::vector<char>(m.centroids.size(), 0) : std::move(stale);
    m.last_updated.assign(m.centroids.size(), 1);
    return m;
}

const auto room = maze::empty_room(200, 100, {10, 10}, {190, 90});

} // namespace

TEST_CASE("objective score")
{
    CHECK(objective_score({5, 5}, {5, 5}) == 300.0);
    CHECK(objective_score({0, 0}, {3, 4}) == 295.0);
    CHECK(objective_score({0, 0}, {0, 40}) == 260.0);
    CHECK(objective_score({0, 0}, {0, 400}) == 0.0);
}

TEST_CASE("novelty score worked examples")
{
    const NoveltyArchive empty;
    const std::vector<Point> same(5, Point{3, 3});
    CHECK(novelty_score(2, same, empty, 3) == 0.0);

    const std::vector<Point> line{{0, 0}, {3, 4}, {6, 8}};
    CHECK(novelty_score(0, line, empty, 2) == 7.5);

    NoveltyArchive archive;
    archive.points = {{11, 10}, {10, 11}};
    const std::vector<Point> far{{10, 10}, {90, 90}};
    CHECK(novelty_score(0, far, archive, 2) == 1.0);

    // Fewer candidates than n: average over all of them.
    CHECK(novelty_score(0, line, empty, 10) == 7.5);
}

TEST_CASE("novelty and surprise agree with brute force")
{
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = static_cast<std::size_t>(rng.uniform_int(2, 20));
        const int k = rng.uniform_int(1, 5);
        const int n = rng.uniform_int(1, k);
        auto pop = random_points(rng, p);
        if (trial % 5 == 0)
            pop[1] = pop[0]; // coincident behaviours
        NoveltyArchive archive;
        archive.points = random_points(rng, static_cast<std::size_t>(rng.uniform_int(0, 6)));
        const auto scores = novelty_scores(pop, archive, n);
        for (std::size_t i = 0; i < p; ++i) {
            CHECK(std::abs(scores[i] - oracle::novelty(i, pop, archive.points, n)) <= 1e-12);
            CHECK(scores[i] == novelty_score(i, pop, archive, n));
        }
        const auto predictions = random_points(rng, static_cast<std::size_t>(k));
        for (const auto& b : pop)
            CHECK(std::abs(surprise_score(b, predictions, n) - oracle::surprise(b, predictions, n)) <= 1e-12);
    }
}

TEST_CASE("scores are invariant under permutation of the candidates")
{
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        auto preds = random_points(rng, 7);
        const Point b{rng.uniform(0, 100), rng.uniform(0, 100)};
        const double s = surprise_score(b, preds, 3);
        std::shuffle(preds.begin(), preds.end(), rng);
        CHECK(surprise_score(b, preds, 3) == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("surprise score worked examples")
{
    const std::vector<Point> preds{{0, 0}, {3, 4}, {100, 100}};
    CHECK(surprise_score({0, 0}, preds, 2) == 2.5);
    CHECK(surprise_score({0, 0}, std::vector<Point>{{0, 0}, {0, 0}}, 2) == 0.0);
    const double all = (0.0 + 5.0 + std::hypot(100.0, 100.0)) / 3.0;
    CHECK(surprise_score({0, 0}, preds, 3) == doctest::Approx(all).epsilon(1e-15));
}

TEST_CASE("archive adaptation")
{
    ArchiveParams params;
    NoveltyArchive archive(params.initial_threshold);
    const auto pts = std::vector<Point>{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};

    SUBCASE("nothing above threshold")
    {
        const std::vector<double> low(pts.size(), 1.0);
        CHECK(update_archive(archive, pts, low, params) == 0);
        CHECK(archive.points.empty());
        CHECK(archive.drought == 1);
        CHECK(archive.threshold == 6.0);
    }
    SUBCASE("one above threshold")
    {
        std::vector<double> s(pts.size(), 1.0);
        s[3] = 7.0;
        CHECK(update_archive(archive, pts, s, params) == 1);
        REQUIRE(archive.points.size() == 1);
        CHECK(archive.points[0] == pts[3]);
        CHECK(archive.threshold == 6.0);
    }
    SUBCASE("five admissions raise the threshold")
    {
        std::vector<double> s(pts.size(), 10.0);
        s[0] = 6.0; // equal to the threshold is not above it
        CHECK(update_archive(archive, pts, s, params) == 5);
        CHECK(archive.threshold == doctest::Approx(6.0 * 1.2));
    }
    SUBCASE("ten dry generations lower it")
    {
        const std::vector<double> low(pts.size(), 0.0);
        for (int g = 0; g < 9; ++g)
            update_archive(archive, pts, low, params);
        CHECK(archive.threshold == 6.0);
        update_archive(archive, pts, low, params);
        CHECK(archive.threshold == doctest::Approx(6.0 * 0.9));
        CHECK(archive.drought == 0);
    }
}

TEST_CASE("k-means")
{
    Rng rng(3);
    SUBCASE("k = 1 gives the mean")
    {
        const auto pts = random_points(rng, 30);
        const auto m = cluster_population(pts, 1, nullptr, rng);
        Point mean{0, 0};
        for (const auto& p : pts)
            mean = mean + p;
        mean = mean * (1.0 / 30.0);
        CHECK(m.centroids[0].x == doctest::Approx(mean.x));
        CHECK(m.centroids[0].y == doctest::Approx(mean.y));
    }
    SUBCASE("two separated groups")
    {
        const std::vector<Point> pts{{0, 0}, {2, 0}, {100, 100}, {100, 102}};
        const auto m = cluster_population(pts, 2, nullptr, rng);
        std::vector<Point> c = m.centroids;
        std::sort(c.begin(), c.end(), [](Point a, Point b) { return a.x < b.x; });
        CHECK(c[0] == Point{1, 0});
        CHECK(c[1] == Point{100, 101});
        CHECK(m.assignment[0] == m.assignment[1]);
        CHECK(m.assignment[2] == m.assignment[3]);
    }
    SUBCASE("a far centroid with no members stays put and is stale")
    {
        const std::vector<Point> pts{{0, 0}, {1, 0}, {0, 1}};
        const auto prev = model_of({{0, 0}, {1000, 1000}});
        const auto m = cluster_population(pts, 2, &prev, rng, 5);
        CHECK(m.centroids[1] == Point{1000, 1000});
        CHECK(m.stale[1]);
        CHECK_FALSE(m.stale[0]);
        CHECK(m.last_updated[0] == 5);
        CHECK(m.last_updated[1] == 1);
    }
    SUBCASE("k never changes and fresh centroids are member means")
    {
        for (int trial = 0; trial < 40; ++trial) {
            const int k = rng.uniform_int(1, 12);
            auto pts = random_points(rng, 40);
            const auto first = cluster_population(pts, k, nullptr, rng, 1);
            pts = random_points(rng, 40);
            const auto m = cluster_population(pts, k, &first, rng, 2);
            REQUIRE(m.k() == static_cast<std::size_t>(k));
            for (int c = 0; c < k; ++c) {
                Point sum{0, 0};
                int count = 0;
                for (std::size_t i = 0; i < pts.size(); ++i)
                    if (m.assignment[i] == c) {
                        sum = sum + pts[i];
                        ++count;
                    }
                CHECK(static_cast<bool>(m.stale[static_cast<std::size_t>(c)]) == (count == 0));
                if (count > 0 && m.iterations < 100) {
                    CHECK(m.centroids[static_cast<std::size_t>(c)].x == doctest::Approx(sum.x / count));
                    CHECK(m.centroids[static_cast<std::size_t>(c)].y == doctest::Approx(sum.y / count));
                }
            }
        }
    }
    SUBCASE("k-means++ handles coincident points")
    {
        const std::vector<Point> same(10, Point{4, 4});
        const auto seeds = kmeans_plus_plus(same, 3, rng);
        CHECK(seeds.size() == 3);
        for (const auto& s : seeds)
            CHECK(s == Point{4, 4});
    }
}

TEST_CASE("predict")
{
    const auto older = model_of({{1, 1}, {4, 4}, {0, 0}});
    const auto newer = model_of({{2, 3}, {4, 4}, {0, 0}}, {0, 0, 1});
    const auto p = predict(older, newer);
    CHECK(p.points[0] == Point{3, 5});
    CHECK(p.points[1] == Point{4, 4});
    CHECK(p.points[2] == Point{0, 0}); // stale without history: its centroid
    CHECK(p.stale[2]);

    PredictionSet previous;
    previous.points = {{9, 9}, {9, 9}, {7, 8}};
    previous.stale = {0, 0, 0};
    const auto q = predict(older, newer, &previous);
    CHECK(q.points[0] == Point{3, 5});
    CHECK(q.points[2] == Point{7, 8});

    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Point c0{rng.uniform(-500, 500), rng.uniform(-500, 500)};
        const Point c1{rng.uniform(-500, 500), rng.uniform(-500, 500)};
        const auto r = predict(model_of({c0}), model_of({c1}));
        CHECK(r.points[0].x == 2.0 * c1.x - c0.x);
        CHECK(r.points[0].y == 2.0 * c1.y - c0.y);
    }
}

TEST_CASE("stationary behaviours regress to their centroids")
{
    Rng rng(12);
    const std::vector<Point> pts{{10, 10}, {12, 10}, {50, 50}, {52, 52}, {90, 10}};
    StrategyConfig cfg;
    cfg.kind = StrategyKind::surprise;
    cfg.k = 3;
    cfg.n = 1;
    ScoringStrategy strategy(cfg, room);
    std::vector<double> scores;
    for (int g = 0; g < 4; ++g)
        scores = strategy.score(pts, rng);
    const auto& model = *strategy.latest_model();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point c = model.centroids[static_cast<std::size_t>(model.assignment[i])];
        CHECK(scores[i] == doctest::Approx(oracle::dist(pts[i], c)).epsilon(1e-12));
    }
}

TEST_CASE("strategy schedule")
{
    Rng rng(5);
    const auto pts = random_points(rng, 20);
    for (auto kind : {StrategyKind::surprise, StrategyKind::surprise_random, StrategyKind::surprise_no_prediction}) {
        StrategyConfig cfg;
        cfg.kind = kind;
        cfg.k = 4;
        cfg.n = 2;
        ScoringStrategy s(cfg, room);
        for (int g = 1; g <= 5; ++g) {
            const auto scores = s.score(pts, rng);
            CHECK(scores.size() == pts.size());
            for (double v : scores) {
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
                if (g <= 2)
                    CHECK(v <= 1.0);
            }
            if (kind == StrategyKind::surprise && g >= 3) {
                REQUIRE(s.predictions());
                CHECK(s.predictions()->k() == 4);
            }
        }
    }
}

TEST_CASE("baselines")
{
    Rng a(9);
    Rng b(9);
    const auto pts = random_points(a, 15);
    random_points(b, 15);
    CHECK(baseline_scores(StrategyKind::random, pts, room, a, 5, 1) ==
          baseline_scores(StrategyKind::random, pts, room, b, 5, 1));

    SUBCASE("SS_np with one cluster per behaviour scores zero")
    {
        std::vector<Point> distinct;
        for (int i = 0; i < 8; ++i)
            distinct.push_back({10.0 * i, 5.0 * i});
        const auto s = baseline_scores(StrategyKind::surprise_no_prediction, distinct, room, a, 8, 1);
        for (double v : s)
            CHECK(v == 0.0);
    }
    SUBCASE("SS_r varies across generations")
    {
        const auto s1 = baseline_scores(StrategyKind::surprise_random, pts, room, a, 5, 2);
        const auto s2 = baseline_scores(StrategyKind::surprise_random, pts, room, a, 5, 2);
        CHECK(s1 != s2);
        for (double v : s1)
            CHECK(v >= 0.0);
    }
}

TEST_CASE("strategy names and validation")
{
    for (auto kind : {StrategyKind::objective, StrategyKind::novelty, StrategyKind::surprise, StrategyKind::random,
                      StrategyKind::surprise_random, StrategyKind::surprise_no_prediction})
        CHECK(strategy_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS_AS(strategy_kind_from_string("curiosity"), ConfigError);

    StrategyConfig cfg;
    cfg.k = 300;
    CHECK_THROWS_AS(cfg.validate(250), ConfigError);
    cfg.k = 5;
    cfg.n = 6;
    CHECK_THROWS_AS(cfg.validate(250), ConfigError);
    cfg.n = 2;
    cfg.history = 3;
    CHECK_THROWS_AS(cfg.validate(250), ConfigError);
}
