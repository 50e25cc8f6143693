#include "divergent/errors.hpp"
#include "divergent/maze/generator.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace divergent;
using namespace divergent::maze;

namespace {

std::vector<oracle::Wall> walls_of(const MazeSpec& m)
{
    std::vector<oracle::Wall> out;
    for (const auto& w : m.walls)
        out.push_back({w.a, w.b});
    return out;
}

// Segments a division contributes: one on each side of its hole, unless the
// hole touches that end.
std::size_t expected_walls(const GeneratedMaze& g)
{
    std::size_t n = 4;
    for (const auto& d : g.divisions)
        n += (d.hole_from > d.from ? 1 : 0) + (d.hole_to < d.to ? 1 : 0);
    return n;
}

// p lies on a wall running across the given orientation.
bool rests_on_cross_wall(const MazeSpec& m, Point p, bool vertical)
{
    for (const auto& w : m.walls) {
        const bool horizontal_wall = w.a.y == w.b.y;
        if (horizontal_wall == vertical && oracle::point_segment(p, w.a, w.b) < 1e-9)
            return true;
    }
    return false;
}

} // namespace

TEST_CASE("forced subdivision counts")
{
    GeneratorConfig cfg;
    Rng rng(5);
    const auto empty = generate(cfg, rng, 0);
    CHECK(empty.maze.walls.size() == 4);
    CHECK(empty.divisions.empty());

    for (int seed = 0; seed < 50; ++seed) {
        Rng r(static_cast<std::uint64_t>(seed));
        const auto one = generate(cfg, r, 1);
        REQUIRE(one.divisions.size() == 1);
        const auto& d = one.divisions[0];
        CHECK(d.hole_to - d.hole_from == cfg.hole_width);
        CHECK(d.hole_from >= d.from);
        CHECK(d.hole_to <= d.to);
        CHECK(one.maze.walls.size() == expected_walls(one));
    }
}

TEST_CASE("generated mazes are solvable, well formed and reproducible")
{
    GeneratorConfig cfg;
    const Rng root(123);
    for (int i = 1; i <= 60; ++i) {
        Rng rng = root.derive(static_cast<std::uint64_t>(i));
        const auto g = generate(cfg, rng);
        CAPTURE(i);
        CHECK(g.target_subdivisions >= cfg.min_subdivisions);
        CHECK(g.target_subdivisions <= cfg.max_subdivisions);
        CHECK(static_cast<int>(g.divisions.size()) <= g.target_subdivisions);
        CHECK(g.maze.walls.size() == expected_walls(g));
        CHECK(check(g.maze).empty());
        CHECK(g.maze.start == Point{cfg.inset, cfg.inset});
        CHECK(g.maze.goal == Point{cfg.width - cfg.inset, cfg.height - cfg.inset});
        CHECK(verify_solvable(g.maze, cfg.cell_size, cfg.robot_radius).solvable);
        CHECK(oracle::grid_reachable(g.maze.width, g.maze.height, walls_of(g.maze), g.maze.start, g.maze.goal,
                                     cfg.cell_size, cfg.robot_radius));
        for (std::size_t w = 4; w < g.maze.walls.size(); ++w) {
            const auto& s = g.maze.walls[w];
            CHECK((s.a.x == s.b.x || s.a.y == s.b.y));
        }
        // Every division spans its area, so each end of the full wall rests on another wall.
        for (const auto& d : g.divisions) {
            const Point lo = d.vertical ? Point{d.position, d.from} : Point{d.from, d.position};
            const Point hi = d.vertical ? Point{d.position, d.to} : Point{d.to, d.position};
            CHECK(rests_on_cross_wall(g.maze, lo, d.vertical));
            CHECK(rests_on_cross_wall(g.maze, hi, d.vertical));
        }

        Rng again = root.derive(static_cast<std::uint64_t>(i));
        CHECK(generate(cfg, again).maze == g.maze);
        CHECK(load_maze(to_text(g.maze)) == g.maze);
    }
}

TEST_CASE("verify_solvable")
{
    const auto room = empty_room(200, 200, {20, 20}, {180, 180});
    CHECK(verify_solvable(room, 10.0).solvable);

    auto split = room;
    split.walls.push_back({{100, 0}, {100, 200}});
    const auto blocked = verify_solvable(split, 10.0);
    CHECK_FALSE(blocked.solvable);

    auto with_hole = room;
    with_hole.walls.push_back({{100, 0}, {100, 120}});
    with_hole.walls.push_back({{100, 150}, {100, 200}});
    CHECK(verify_solvable(with_hole, 10.0).solvable);

    auto boxed = room;
    boxed.walls.push_back({{0, 30}, {30, 30}});
    boxed.walls.push_back({{30, 0}, {30, 30}});
    const auto start_blocked = verify_solvable(boxed, 10.0);
    CHECK_FALSE(start_blocked.solvable);
    CHECK_FALSE(start_blocked.diagnostic.empty());
}

TEST_CASE("shortest path estimate")
{
    // Endpoints on cell centres, so the grid path is the straight diagonal.
    const auto room = empty_room(200, 200, {25, 25}, {185, 185});
    const auto est = shortest_path_estimate(room, 10.0);
    REQUIRE(est);
    CHECK(*est == doctest::Approx(160.0 * std::sqrt(2.0)).epsilon(1e-12));

    auto split = room;
    split.walls.push_back({{100, 0}, {100, 200}});
    CHECK_FALSE(shortest_path_estimate(split, 10.0));
}

TEST_CASE("generator config validation")
{
    GeneratorConfig cfg;
    cfg.corridor_min = 10.0; // below twice the robot radius
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.max_subdivisions = 21;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.min_subdivisions = 5;
    cfg.max_subdivisions = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
