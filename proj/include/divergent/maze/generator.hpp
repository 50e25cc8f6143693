#pragma once

#include "divergent/maze/maze.hpp"
#include "divergent/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace divergent::maze {

struct GeneratorConfig {
    double width = 200.0;
    double height = 200.0;
    int min_subdivisions = 2;
    int max_subdivisions = 6;
    double corridor_min = 40.0;
    double hole_width = 30.0;
    double inset = 20.0;       // start/goal distance from their corners on each axis
    double robot_radius = 8.0;
    double cell_size = 10.0;   // solvability grid
    int max_retries = 100;
    std::uint64_t seed = 1;

    void validate() const;
};

/// One dividing wall: the line it lies on and its hole.
struct Division {
    bool vertical = false; // wall along x = position
    double position = 0.0;
    double from = 0.0;     // extent along the wall
    double to = 0.0;
    double hole_from = 0.0;
    double hole_to = 0.0;
};

struct GeneratedMaze {
    MazeSpec maze;
    int target_subdivisions = 0;
    std::vector<Division> divisions;
    int retries = 0;
};

/// Recursive division of an empty width x height room, breadth first. Each
/// division draws an orientation and an integer split position uniformly among
/// the feasible ones, leaving corridor_min on both sides and never landing
/// inside a hole of the bounding walls, and cuts one hole of hole_width at a
/// uniform offset. Stops after the sampled number of divisions or when no area
/// can be split. Unsolvable results are regenerated from the same stream.
/// `forced_subdivisions` overrides the sampled count.
GeneratedMaze generate(const GeneratorConfig& config, Rng& rng, std::optional<int> forced_subdivisions = {});

struct Solvability {
    bool solvable = false;
    std::string diagnostic;
};

/// Flood fill over a grid of cell_size cells; a cell is free when its centre
/// is at least robot_radius from every wall.
Solvability verify_solvable(const MazeSpec& maze, double cell_size, double robot_radius = 8.0);

/// Shortest start-to-goal path for a robot of the given radius, approximated
/// by Dijkstra over an 8-connected grid of free cell centres. Empty when the
/// goal is unreachable.
std::optional<double> shortest_path_estimate(const MazeSpec& maze, double cell_size, double robot_radius = 8.0);

} // namespace divergent::maze
