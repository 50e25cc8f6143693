#include "divergent/maze/maze.hpp"

#include "divergent/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace divergent::maze {

namespace {

constexpr double eps = 1e-9;

// Union of the wall intervals lying on one side covers [0, length].
bool side_covered(const std::vector<Segment>& walls, bool vertical, double line, double length)
{
    std::vector<std::pair<double, double>> spans;
    for (const auto& w : walls) {
        if (vertical && std::abs(w.a.x - line) < eps && std::abs(w.b.x - line) < eps)
            spans.emplace_back(std::min(w.a.y, w.b.y), std::max(w.a.y, w.b.y));
        else if (!vertical && std::abs(w.a.y - line) < eps && std::abs(w.b.y - line) < eps)
            spans.emplace_back(std::min(w.a.x, w.b.x), std::max(w.a.x, w.b.x));
    }
    std::sort(spans.begin(), spans.end());
    double reach = 0.0;
    for (const auto& [lo, hi] : spans) {
        if (lo > reach + eps)
            return false;
        reach = std::max(reach, hi);
    }
    return reach >= length - eps;
}

} // namespace

std::string check(const MazeSpec& maze)
{
    if (!(maze.width > 0.0) || !(maze.height > 0.0))
        return "maze size must be positive";
    if (!maze.inside(maze.start))
        return fmt::format("start ({}, {}) is not strictly inside the maze", maze.start.x, maze.start.y);
    if (!maze.inside(maze.goal))
        return fmt::format("goal ({}, {}) is not strictly inside the maze", maze.goal.x, maze.goal.y);
    if (maze.start == maze.goal)
        return "start and goal coincide";
    if (!side_covered(maze.walls, false, 0.0, maze.width))
        return "missing boundary wall along y = 0";
    if (!side_covered(maze.walls, false, maze.height, maze.width))
        return "missing boundary wall along the top side";
    if (!side_covered(maze.walls, true, 0.0, maze.height))
        return "missing boundary wall along x = 0";
    if (!side_covered(maze.walls, true, maze.width, maze.height))
        return "missing boundary wall along the right side";
    for (const auto& w : maze.walls) {
        for (Point p : {w.a, w.b})
            if (p.x < -eps || p.y < -eps || p.x > maze.width + eps || p.y > maze.height + eps)
                return fmt::format("wall endpoint ({}, {}) lies outside the maze", p.x, p.y);
    }
    return {};
}

MazeSpec load_maze(std::string_view text)
{
    MazeSpec maze;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    int size_line = 0;
    int start_line = 0;
    int goal_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::string kind;
        if (!(fields >> kind))
            continue;
        if (kind == "size") {
            if (!(fields >> maze.width >> maze.height))
                throw ParseError("expected 'size W H'", line_no);
            size_line = line_no;
        } else if (kind == "start") {
            if (!(fields >> maze.start.x >> maze.start.y))
                throw ParseError("expected 'start X Y'", line_no);
            start_line = line_no;
        } else if (kind == "goal") {
            if (!(fields >> maze.goal.x >> maze.goal.y))
                throw ParseError("expected 'goal X Y'", line_no);
            goal_line = line_no;
        } else if (kind == "wall") {
            Segment s;
            if (!(fields >> s.a.x >> s.a.y >> s.b.x >> s.b.y))
                throw ParseError("expected 'wall X1 Y1 X2 Y2'", line_no);
            maze.walls.push_back(s);
        } else if (kind == "name") {
            if (!(fields >> maze.name))
                throw ParseError("expected 'name N'", line_no);
        } else if (kind == "path") {
            double len = 0.0;
            if (!(fields >> len) || len <= 0.0)
                throw ParseError("expected 'path L' with L > 0", line_no);
            maze.shortest_path = len;
        } else {
            throw ParseError(fmt::format("unknown record '{}'", kind), line_no);
        }
        std::string extra;
        if (fields >> extra)
            throw ParseError(fmt::format("trailing field '{}'", extra), line_no);
    }
    if (size_line == 0)
        throw ParseError("missing 'size' line");
    if (start_line == 0)
        throw ParseError("missing 'start' line");
    if (goal_line == 0)
        throw ParseError("missing 'goal' line");
    if (!(maze.width > 0.0) || !(maze.height > 0.0))
        throw ParseError("maze size must be positive", size_line);
    if (!maze.inside(maze.start))
        throw ParseError("start is not strictly inside the maze", start_line);
    if (!maze.inside(maze.goal))
        throw ParseError("goal is not strictly inside the maze", goal_line);
    if (auto problem = check(maze); !problem.empty())
        throw ParseError(problem);
    return maze;
}

MazeSpec load_maze_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(fmt::format("cannot open maze file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        MazeSpec maze = load_maze(buf.str());
        if (maze.name.empty())
            maze.name = path.stem().string();
        return maze;
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string to_text(const MazeSpec& maze)
{
    std::string out;
    if (!maze.name.empty())
        out += fmt::format("name {}\n", maze.name);
    out += fmt::format("size {} {}\n", maze.width, maze.height);
    out += fmt::format("start {} {}\n", maze.start.x, maze.start.y);
    out += fmt::format("goal {} {}\n", maze.goal.x, maze.goal.y);
    if (maze.shortest_path)
        out += fmt::format("path {}\n", *maze.shortest_path);
    for (const auto& w : maze.walls)
        out += fmt::format("wall {} {} {} {}\n", w.a.x, w.a.y, w.b.x, w.b.y);
    return out;
}

void save_maze_file(const MazeSpec& maze, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write maze file '{}'", path.string()));
    out << to_text(maze);
    if (!out)
        throw std::runtime_error(fmt::format("failed writing maze file '{}'", path.string()));
}

MazeSpec empty_room(double width, double height, Point start, Point goal)
{
    MazeSpec m;
    m.width = width;
    m.height = height;
    m.start = start;
    m.goal = goal;
    m.walls = {
        {{0, 0}, {width, 0}},
        {{width, 0}, {width, height}},
        {{width, height}, {0, height}},
        {{0, height}, {0, 0}},
    };
    return m;
}

} // namespace divergent::maze
