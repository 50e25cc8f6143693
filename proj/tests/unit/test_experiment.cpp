#include "divergent/errors.hpp"
#include "divergent/experiment/analysis.hpp"
#include "divergent/experiment/config.hpp"
#include "divergent/experiment/run.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace divergent;
using namespace divergent::experiment;

namespace {

const std::filesystem::path data_dir = DIVERGENT_DATA_DIR;

RunConfig small_config(search::StrategyKind kind, std::uint64_t seed = 1)
{
    RunConfig c = build_run_config({{"experiment.maze", "mazes/medium.maze"}}, data_dir);
    c.strategy.kind = kind;
    c.neat.population_size = 30;
    c.strategy.k = 5;
    c.strategy.n = 1;
    c.generations = 6;
    c.steps = 120;
    c.seed = seed;
    return c;
}

RunRecord record_with(std::vector<double> fitness, int population = 10)
{
    RunRecord r;
    r.population = population;
    for (std::size_t g = 0; g < fitness.size(); ++g) {
        GenerationLog log;
        log.generation = static_cast<int>(g) + 1;
        log.evaluations = static_cast<std::int64_t>(g + 1) * population;
        log.max_fitness = fitness[g];
        r.generations.push_back(log);
    }
    return r;
}

RunRecord solved_at(std::optional<std::int64_t> first)
{
    auto r = record_with({1.0});
    r.first_success = first;
    return r;
}

} // namespace

TEST_CASE("settings parser")
{
    const auto s = parse_settings("# comment\n[experiment]\nseed = 7  # trailing\n\n[strategy]\nkind=novelty\nneat.elitism = 2\n");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == std::pair<std::string, std::string>{"experiment.seed", "7"});
    CHECK(s[1] == std::pair<std::string, std::string>{"strategy.kind", "novelty"});
    CHECK(s[2] == std::pair<std::string, std::string>{"neat.elitism", "2"});

    try {
        parse_settings("[a]\nx = 1\nnonsense\n");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_settings("[broken\n"), ParseError);
}

TEST_CASE("config building and presets")
{
    SUBCASE("preset follows the maze name")
    {
        const auto c = build_run_config({{"experiment.maze", "mazes/hard.maze"}}, data_dir);
        CHECK(c.generations == 300);
        CHECK(c.steps == 400);
        CHECK(c.strategy.k == 100);
        CHECK(c.strategy.n == 1);
        CHECK(c.maze.width == 200);
    }
    SUBCASE("novelty picks up the preset's novelty n regardless of key order")
    {
        const auto c = build_run_config({{"experiment.maze", "mazes/extremely_hard.maze"}, {"strategy.kind", "novelty"}},
                                        data_dir);
        CHECK(c.strategy.n == 10);
        CHECK(c.generations == 1000);
        CHECK(c.steps == 1000);
    }
    SUBCASE("explicit settings override the preset")
    {
        const auto c = build_run_config(
            {{"strategy.k", "50"}, {"experiment.maze", "mazes/very_hard.maze"}, {"experiment.steps", "77"}}, data_dir);
        CHECK(c.strategy.k == 50);
        CHECK(c.strategy.n == 2);
        CHECK(c.steps == 77);
    }
    SUBCASE("errors name the key")
    {
        auto expect_key = [](const Settings& s, const std::string& key) {
            try {
                build_run_config(s, data_dir);
                FAIL("no error");
            } catch (const ConfigError& e) {
                CHECK(std::string(e.what()).find(key) != std::string::npos);
            }
        };
        expect_key({{"experiment.maze", "mazes/medium.maze"}, {"neat.bogus", "1"}}, "neat.bogus");
        expect_key({{"experiment.maze", "mazes/medium.maze"}, {"strategy.k", "many"}}, "strategy.k");
        expect_key({{"experiment.maze", "mazes/medium.maze"}, {"strategy.k", "1000"}}, "strategy.k");
        expect_key({{"experiment.maze", "mazes/medium.maze"}, {"sim.collision", "bounce"}}, "sim.collision");
        expect_key({{"experiment.maze", "mazes/medium.maze"}, {"experiment.preset", "tiny"}}, "experiment.preset");
        expect_key({}, "experiment.maze");
    }
    SUBCASE("describe round trips through apply_setting")
    {
        auto c = build_run_config({{"experiment.maze", "mazes/medium.maze"}, {"sim.collision", "stop"}}, data_dir);
        RunConfig d;
        for (const auto& [k, v] : describe(c))
            apply_setting(d, k, v);
        CHECK(describe(d) == describe(c));
    }
}

TEST_CASE("runs")
{
    SUBCASE("deterministic for a seed, different across seeds")
    {
        for (auto kind : {search::StrategyKind::objective, search::StrategyKind::novelty, search::StrategyKind::surprise,
                          search::StrategyKind::surprise_no_prediction}) {
            const auto a = run(small_config(kind, 4));
            const auto b = run(small_config(kind, 4));
            CHECK(to_csv(a) == to_csv(b));
            CHECK(behaviours_csv(a) == behaviours_csv(b));
            const auto c = run(small_config(kind, 5));
            CHECK(behaviours_csv(a) != behaviours_csv(c));
        }
    }
    SUBCASE("one generation evaluates exactly P genomes")
    {
        auto cfg = small_config(search::StrategyKind::surprise);
        cfg.generations = 1;
        const auto r = run(cfg);
        REQUIRE(r.generations.size() == 1);
        CHECK(r.evaluations() == 30);
        CHECK(r.generations[0].behaviours.size() == 30);
    }
    SUBCASE("log invariants")
    {
        const auto cfg = small_config(search::StrategyKind::novelty, 9);
        const auto r = run(cfg);
        CHECK(r.generations.size() == 6);
        for (std::size_t g = 0; g < r.generations.size(); ++g) {
            const auto& log = r.generations[g];
            CHECK(log.generation == static_cast<int>(g) + 1);
            CHECK(log.evaluations == static_cast<std::int64_t>(g + 1) * 30);
            double best = 0.0;
            for (const auto& b : log.behaviours)
                best = std::max(best, 300.0 - oracle::dist(b, cfg.maze.goal));
            CHECK(log.max_fitness == doctest::Approx(best).epsilon(1e-12));
        }
        CHECK(r.champion_fitness >= r.generations.back().max_fitness - 1e-12);
    }
    SUBCASE("first success index matches the generation log")
    {
        auto cfg = small_config(search::StrategyKind::random, 2);
        cfg.generations = 40;
        cfg.steps = 400;
        cfg.stop_on_success = true;
        const auto r = run(cfg);
        if (r.first_success) {
            const auto g = (*r.first_success - 1) / 30 + 1;
            CHECK(r.generations.back().generation == g);
            CHECK(r.generations.back().success);
            for (std::size_t i = 0; i + 1 < r.generations.size(); ++i)
                CHECK_FALSE(r.generations[i].success);
        } else {
            CHECK(r.generations.size() == 40);
        }
    }
}

TEST_CASE("run CSV round trip")
{
    auto cfg = small_config(search::StrategyKind::surprise, 3);
    const auto r = run(cfg);
    const auto text = to_csv(r);
    CHECK(text.rfind("generation,evaluation,max_fitness,success_flag\n", 0) == 0);
    const auto back = parse_run_csv(text);
    CHECK(to_csv(back) == text);
    CHECK(back.seed == 3);
    CHECK(back.population == 30);
    CHECK(back.first_success == r.first_success);
    REQUIRE(back.generations.size() == r.generations.size());
    for (std::size_t g = 0; g < r.generations.size(); ++g)
        CHECK(back.generations[g].max_fitness == doctest::Approx(r.generations[g].max_fitness).epsilon(1e-11));
    CHECK(back.config == r.config);

    CHECK_THROWS_AS(parse_run_csv("gen,eval\n"), ParseError);
    try {
        parse_run_csv("generation,evaluation,max_fitness,success_flag\n1,30,12.5,1\n2,60,x,0\n");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("predictions CSV")
{
    auto cfg = small_config(search::StrategyKind::surprise, 3);
    cfg.record_predictions = true;
    const auto r = run(cfg);
    CHECK(r.generations[0].predictions.empty());
    CHECK(r.generations[0].centroids.size() == 5);
    CHECK(r.generations[2].predictions.size() == 5);
    const auto text = predictions_csv(r);
    CHECK(text.rfind("generation,kind,cluster,x,y,stale\n", 0) == 0);
}

TEST_CASE("efficiency curve")
{
    const std::vector<RunRecord> records{record_with({10, 5, 20}), record_with({30, 30, 30})};
    const auto curve = efficiency_curve(records);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].evaluations == 10);
    CHECK(curve[2].evaluations == 30);
    CHECK(curve[0].mean == 20.0);
    CHECK(curve[1].mean == 20.0); // running maximum keeps 10, not 5
    CHECK(curve[2].mean == 25.0);
    // two samples 10 and 30: sd = sqrt(200), ci = 1.96 sd / sqrt 2 = 19.6
    CHECK(curve[0].ci == doctest::Approx(19.6));

    const std::vector<RunRecord> ragged{record_with({10}), record_with({0, 40})};
    const auto r = efficiency_curve(ragged);
    REQUIRE(r.size() == 2);
    CHECK(r[1].mean == 25.0);

    for (const auto& p : efficiency_curve(std::vector<RunRecord>{record_with({3, 1, 4, 1, 5, 9, 2, 6})}))
        CHECK(p.ci == 0.0);
    CHECK_THROWS(efficiency_curve(std::vector<RunRecord>{}));
}

TEST_CASE("robustness curve")
{
    const std::vector<RunRecord> records{solved_at(500), solved_at(std::nullopt), solved_at(120), solved_at(500),
                                         solved_at(9000)};
    const auto curve = robustness_curve(records);
    REQUIRE(curve.size() == 4);
    CHECK(curve[0].evaluations == 0);
    CHECK(curve[0].successes == 0);
    CHECK(curve[1].evaluations == 120);
    CHECK(curve[1].successes == 1);
    CHECK(curve[2].evaluations == 500);
    CHECK(curve[2].successes == 3);
    CHECK(curve[3].successes == 4);
    CHECK(successes_at(curve, 0) == 0);
    CHECK(successes_at(curve, 119) == 0);
    CHECK(successes_at(curve, 120) == 1);
    CHECK(successes_at(curve, 8999) == 3);
    CHECK(successes_at(curve, 1'000'000) == 4);
}

TEST_CASE("normalized entropy")
{
    CHECK(normalized_entropy(std::vector<std::int64_t>{5, 0, 0, 0}) == 0.0);
    CHECK(normalized_entropy(std::vector<std::int64_t>{3, 3, 3, 3}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(normalized_entropy(std::vector<std::int64_t>{1, 1, 0, 0}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS(normalized_entropy(std::vector<std::int64_t>{0, 0}));
    CHECK_THROWS(normalized_entropy(std::vector<std::int64_t>{4}));

    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(rng.uniform_int(2, 60)));
        for (auto& c : counts)
            c = rng.bernoulli(0.4) ? rng.uniform_int(1, 50) : 0;
        counts[0] += 1;
        const double h = normalized_entropy(counts);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0 + 1e-12);
        CHECK(h == doctest::Approx(oracle::entropy(counts)).epsilon(1e-12));
        auto scaled = counts;
        for (auto& c : scaled)
            c *= 7;
        CHECK(normalized_entropy(scaled) == doctest::Approx(h).epsilon(1e-12));
        std::shuffle(counts.begin(), counts.end(), rng);
        CHECK(normalized_entropy(counts) == doctest::Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("heatmap")
{
    const auto medium = maze::load_maze_file(data_dir / "mazes/medium.maze");
    const std::vector<Point> pts{{0, 0}, {4.9, 4.9}, {299.9, 149.9}, {300, 150}, {150, 75}};
    const auto map = heatmap_entropy(pts, medium, 5.0);
    CHECK(map.columns == 60);
    CHECK(map.rows == 30);
    CHECK(map.cells() == 1800);
    CHECK(map.total == 5);
    CHECK(map.counts[0] == 2);
    CHECK(map.counts.back() == 2);
    CHECK(map.entropy == doctest::Approx(oracle::entropy(map.counts)));
    const auto text = heatmap_text(map);
    CHECK(std::count(text.begin(), text.end(), '\n') == 30);
    CHECK(heatmap_pgm(map).rfind("P2\n60 30\n", 0) == 0);
}

TEST_CASE("strictly greater matrix")
{
    const std::vector<std::vector<int>> successes{{3, 0, 5, 2}, {1, 0, 5, 4}, {0, 1, 0, 0}};
    const auto m = strictly_greater_matrix(successes);
    CHECK(m[0][0] == 0.0);
    CHECK(m[0][1] == 25.0);
    CHECK(m[1][0] == 25.0);
    CHECK(m[0][2] == 75.0);
    CHECK(m[2][0] == 25.0);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            CHECK(m[a][b] + m[b][a] <= 100.0);
    const auto rows = row_means(m);
    const auto cols = column_means(m);
    CHECK(rows[0] == doctest::Approx((25.0 + 75.0) / 2));
    CHECK(cols[0] == doctest::Approx((25.0 + 25.0) / 2));
    CHECK_THROWS(strictly_greater_matrix({{1, 2}, {1}}));
}

TEST_CASE("select_cell")
{
    const std::vector<SweepCell> table{
        {1, 1, 5, 3, 900.0}, {2, 1, 5, 4, 1200.0}, {3, 1, 5, 4, 800.0}, {4, 1, 5, 4, 800.0}, {5, 1, 5, 0, std::nullopt}};
    CHECK(select_cell(table) == 2);
    const std::vector<SweepCell> none{{1, 1, 5, 0, std::nullopt}, {2, 1, 5, 0, std::nullopt}};
    CHECK(select_cell(none) == 0);
}

TEST_CASE("run_many does not depend on the worker count")
{
    std::vector<RunConfig> configs;
    for (std::uint64_t s = 1; s <= 4; ++s)
        configs.push_back(small_config(search::StrategyKind::surprise, s));
    configs[2].generations = 0; // invalid: fails alone
    const auto one = run_many(configs, 1);
    const auto three = run_many(configs, 3);
    REQUIRE(one.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(one[i].record.has_value() == three[i].record.has_value());
        if (one[i].record)
            CHECK(to_csv(*one[i].record) == to_csv(*three[i].record));
    }
    CHECK_FALSE(one[2].record);
    CHECK(one[2].error.find("experiment.generations") != std::string::npos);
}
