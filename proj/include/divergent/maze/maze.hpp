#pragma once

#include "divergent/geometry.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace divergent::maze {

/// Axis-aligned rectangular arena [0, width] x [0, height] with wall segments.
struct MazeSpec {
    std::string name;
    double width = 0.0;
    double height = 0.0;
    std::vector<Segment> walls;
    Point start;
    Point goal;
    std::optional<double> shortest_path;

    friend bool operator==(const MazeSpec&, const MazeSpec&) = default;

    bool inside(Point p) const { return p.x > 0.0 && p.x < width && p.y > 0.0 && p.y < height; }
};

/// Empty string when valid: start != goal, both strictly inside, and the four
/// sides of the bounding box completely covered by walls.
std::string check(const MazeSpec& maze);

/// Parses `size W H`, `start X Y`, `goal X Y`, `wall X1 Y1 X2 Y2`, optional
/// `name N` and `path L`; `#` starts a comment. Throws ParseError.
MazeSpec load_maze(std::string_view text);
MazeSpec load_maze_file(const std::filesystem::path& path);

std::string to_text(const MazeSpec& maze);
void save_maze_file(const MazeSpec& maze, const std::filesystem::path& path);

/// Empty room of the given size with its four boundary walls.
MazeSpec empty_room(double width, double height, Point start, Point goal);

} // namespace divergent::maze
