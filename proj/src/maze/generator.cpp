#include "divergent/maze/generator.hpp"

#include "divergent/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

namespace divergent::maze {

void GeneratorConfig::validate() const
{
    auto require = [](bool ok, const char* key, double value) {
        if (!ok)
            throw ConfigError(fmt::format("gen.{} has invalid value {}", key, value));
    };
    require(width > 0.0, "width", width);
    require(height > 0.0, "height", height);
    require(min_subdivisions >= 0 && min_subdivisions <= 20, "min_subdivisions", min_subdivisions);
    require(max_subdivisions >= min_subdivisions && max_subdivisions <= 20, "max_subdivisions", max_subdivisions);
    require(robot_radius > 0.0, "robot_radius", robot_radius);
    require(corridor_min > 2.0 * robot_radius, "corridor_min", corridor_min);
    require(hole_width > 2.0 * robot_radius && hole_width <= corridor_min, "hole_width", hole_width);
    require(inset > robot_radius && 2.0 * inset < std::min(width, height), "inset", inset);
    require(cell_size > 0.0 && cell_size <= hole_width / 2.0, "cell_size", cell_size);
    require(max_retries >= 0, "max_retries", max_retries);
}

namespace {

using Span = std::pair<double, double>;

struct Area {
    double x0, y0, x1, y1;
    std::vector<Span> holes_x; // holes on the top/bottom sides, as x intervals
    std::vector<Span> holes_y; // holes on the left/right sides, as y intervals
};

bool inside_hole(const std::vector<Span>& holes, double p)
{
    return std::any_of(holes.begin(), holes.end(), [p](const Span& h) { return h.first < p && p < h.second; });
}

std::vector<Span> clip(const std::vector<Span>& holes, double lo, double hi)
{
    std::vector<Span> out;
    for (const auto& h : holes)
        if (h.second > lo && h.first < hi)
            out.push_back(h);
    return out;
}

std::vector<double> feasible_positions(double lo, double hi, double corridor, const std::vector<Span>& holes)
{
    std::vector<double> out;
    for (double p = std::ceil(lo + corridor); p <= hi - corridor; p += 1.0)
        if (!inside_hole(holes, p))
            out.push_back(p);
    return out;
}

GeneratedMaze attempt(const GeneratorConfig& cfg, Rng& rng, int target)
{
    GeneratedMaze out;
    out.target_subdivisions = target;
    out.maze = empty_room(cfg.width, cfg.height, {cfg.inset, cfg.inset},
                          {cfg.width - cfg.inset, cfg.height - cfg.inset});
    std::deque<Area> queue{{0.0, 0.0, cfg.width, cfg.height, {}, {}}};
    while (static_cast<int>(out.divisions.size()) < target && !queue.empty()) {
        Area a = std::move(queue.front());
        queue.pop_front();
        auto vertical = feasible_positions(a.x0, a.x1, cfg.corridor_min, a.holes_x);
        auto horizontal = feasible_positions(a.y0, a.y1, cfg.corridor_min, a.holes_y);
        if (vertical.empty() && horizontal.empty())
            continue;
        bool split_vertical = !vertical.empty();
        if (!vertical.empty() && !horizontal.empty())
            split_vertical = rng.bernoulli(0.5);
        const auto& options = split_vertical ? vertical : horizontal;
        Division d;
        d.vertical = split_vertical;
        d.position = options[rng.uniform_int<std::size_t>(0, options.size() - 1)];
        d.from = split_vertical ? a.y0 : a.x0;
        d.to = split_vertical ? a.y1 : a.x1;
        d.hole_from = std::floor(d.from + rng.uniform_int<long>(0, static_cast<long>(std::floor(d.to - d.from - cfg.hole_width))));
        d.hole_to = d.hole_from + cfg.hole_width;

        auto add = [&](double lo, double hi) {
            if (hi - lo <= 0.0)
                return;
            if (d.vertical)
                out.maze.walls.push_back({{d.position, lo}, {d.position, hi}});
            else
                out.maze.walls.push_back({{lo, d.position}, {hi, d.position}});
        };
        add(d.from, d.hole_from);
        add(d.hole_to, d.to);

        const Span hole{d.hole_from, d.hole_to};
        if (d.vertical) {
            Area left{a.x0, a.y0, d.position, a.y1, clip(a.holes_x, a.x0, d.position), a.holes_y};
            Area right{d.position, a.y0, a.x1, a.y1, clip(a.holes_x, d.position, a.x1), a.holes_y};
            left.holes_y.push_back(hole);
            right.holes_y.push_back(hole);
            queue.push_back(std::move(left));
            queue.push_back(std::move(right));
        } else {
            Area below{a.x0, a.y0, a.x1, d.position, a.holes_x, clip(a.holes_y, a.y0, d.position)};
            Area above{a.x0, d.position, a.x1, a.y1, a.holes_x, clip(a.holes_y, d.position, a.y1)};
            below.holes_x.push_back(hole);
            above.holes_x.push_back(hole);
            queue.push_back(std::move(below));
            queue.push_back(std::move(above));
        }
        out.divisions.push_back(d);
    }
    return out;
}

struct Grid {
    int nx = 0;
    int ny = 0;
    double cell = 0.0;
    std::vector<char> free;

    Point centre(int i, int j) const { return {(i + 0.5) * cell, (j + 0.5) * cell}; }
    int index(int i, int j) const { return j * nx + i; }
    std::pair<int, int> cell_of(Point p) const
    {
        return {std::clamp(static_cast<int>(p.x / cell), 0, nx - 1), std::clamp(static_cast<int>(p.y / cell), 0, ny - 1)};
    }
};

Grid occupancy(const MazeSpec& maze, double cell, double radius)
{
    Grid g;
    g.cell = cell;
    g.nx = std::max(1, static_cast<int>(std::ceil(maze.width / cell)));
    g.ny = std::max(1, static_cast<int>(std::ceil(maze.height / cell)));
    g.free.assign(static_cast<std::size_t>(g.nx * g.ny), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Point c = g.centre(i, j);
            if (!maze.inside(c))
                continue;
            bool clear = true;
            for (const auto& w : maze.walls)
                if (distance_to_segment(w, c) < radius) {
                    clear = false;
                    break;
                }
            g.free[static_cast<std::size_t>(g.index(i, j))] = clear ? 1 : 0;
        }
    return g;
}

} // namespace

GeneratedMaze generate(const GeneratorConfig& config, Rng& rng, std::optional<int> forced_subdivisions)
{
    config.validate();
    const int target = forced_subdivisions ? *forced_subdivisions
                                           : rng.uniform_int(config.min_subdivisions, config.max_subdivisions);
    if (target < 0)
        throw ConfigError("forced subdivision count must be non-negative");
    for (int retry = 0;; ++retry) {
        GeneratedMaze g = attempt(config, rng, target);
        g.retries = retry;
        if (verify_solvable(g.maze, config.cell_size, config.robot_radius).solvable)
            return g;
        if (retry >= config.max_retries)
            throw std::runtime_error(fmt::format("no solvable maze after {} retries", retry + 1));
    }
}

Solvability verify_solvable(const MazeSpec& maze, double cell_size, double robot_radius)
{
    if (!(cell_size > 0.0))
        return {false, "cell size must be positive"};
    const Grid g = occupancy(maze, cell_size, robot_radius);
    const auto [si, sj] = g.cell_of(maze.start);
    const auto [gi, gj] = g.cell_of(maze.goal);
    if (!g.free[static_cast<std::size_t>(g.index(si, sj))])
        return {false, fmt::format("start cell ({}, {}) is blocked", si, sj)};
    if (!g.free[static_cast<std::size_t>(g.index(gi, gj))])
        return {false, fmt::format("goal cell ({}, {}) is blocked", gi, gj)};
    std::vector<char> seen(g.free.size(), 0);
    std::vector<std::pair<int, int>> stack{{si, sj}};
    seen[static_cast<std::size_t>(g.index(si, sj))] = 1;
    constexpr int di[] = {1, -1, 0, 0};
    constexpr int dj[] = {0, 0, 1, -1};
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        if (i == gi && j == gj)
            return {true, {}};
        for (int k = 0; k < 4; ++k) {
            const int ni = i + di[k];
            const int nj = j + dj[k];
            if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny)
                continue;
            const auto idx = static_cast<std::size_t>(g.index(ni, nj));
            if (!g.free[idx] || seen[idx])
                continue;
            seen[idx] = 1;
            stack.emplace_back(ni, nj);
        }
    }
    return {false, "goal cell not reachable from start cell"};
}

std::optional<double> shortest_path_estimate(const MazeSpec& maze, double cell_size, double robot_radius)
{
    const Grid g = occupancy(maze, cell_size, robot_radius);
    const auto [si, sj] = g.cell_of(maze.start);
    const auto [gi, gj] = g.cell_of(maze.goal);
    const auto start = static_cast<std::size_t>(g.index(si, sj));
    const auto goal = static_cast<std::size_t>(g.index(gi, gj));
    if (!g.free[start] || !g.free[goal])
        return std::nullopt;
    std::vector<double> dist(g.free.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[start] = 0.0;
    open.emplace(0.0, start);
    while (!open.empty()) {
        const auto [d, idx] = open.top();
        open.pop();
        if (d > dist[idx])
            continue;
        if (idx == goal)
            break;
        const int i = static_cast<int>(idx) % g.nx;
        const int j = static_cast<int>(idx) / g.nx;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0)
                    continue;
                const int ni = i + di;
                const int nj = j + dj;
                if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny)
                    continue;
                const auto n = static_cast<std::size_t>(g.index(ni, nj));
                // diagonal moves must not cut a blocked corner
                if (!g.free[n] || (di != 0 && dj != 0 &&
                                   (!g.free[static_cast<std::size_t>(g.index(i + di, j))] ||
                                    !g.free[static_cast<std::size_t>(g.index(i, j + dj))])))
                    continue;
                const double nd = d + cell_size * std::hypot(di, dj);
                if (nd < dist[n]) {
                    dist[n] = nd;
                    open.emplace(nd, n);
                }
            }
    }
    if (!std::isfinite(dist[goal]))
        return std::nullopt;
    return dist[goal] + distance(maze.start, g.centre(si, sj)) + distance(maze.goal, g.centre(gi, gj));
}

} // namespace divergent::maze
