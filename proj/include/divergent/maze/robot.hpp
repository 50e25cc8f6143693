#pragma once

#include "divergent/geometry.hpp"
#include "divergent/maze/maze.hpp"
#include "divergent/neat/genome.hpp"
#include "divergent/neat/network.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace divergent::maze {

inline constexpr int rangefinder_count = 6;
inline constexpr int radar_count = 4;
inline constexpr int sensor_count = rangefinder_count + radar_count;

/// What happens when a step would bring the robot within its radius of a wall:
/// slide pushes the centre back out along the contact normal, stop cancels
/// the move.
enum class CollisionMode { slide, stop };

struct RobotParams {
    double radius = 8.0;
    double rangefinder_range = 100.0;
    double max_speed = 3.0;
    double max_angular_velocity = 0.4244;
    double turn_scale = 0.4244;
    double speed_scale = 0.25;
    double success_radius = 5.0;
    CollisionMode collision = CollisionMode::slide;
    /// Rangefinder directions relative to the heading, radians.
    std::array<double, rangefinder_count> rangefinder_angles{-pi / 2, -pi / 4, 0.0, pi / 4, pi / 2, pi};

    void validate() const;
};

struct RobotState {
    Point position;
    double heading = 0.0; // radians, counter-clockwise from +x
    double speed = 0.0;   // units per step along the heading
    double angular_velocity = 0.0;
};

/// Final robot position: the behaviour characterization.
using BehaviourPoint = Point;

struct SimulationResult {
    BehaviourPoint behaviour;
    bool solved = false;
    int steps_used = 0;
    double distance_to_goal = 0.0;
    std::vector<Point> trail;
};

/// Ray from the robot centre at heading + relative_angle to the nearest wall,
/// clamped to the range and divided by it.
double rangefinder_reading(const RobotState& state, const MazeSpec& maze, double relative_angle,
                           const RobotParams& params = {});

/// Pie-slice goal sensors: front [-45, 45), left [45, 135), rear [135, 225),
/// right [225, 315) degrees relative to the heading. Exactly one reads 1.
/// They ignore walls.
std::array<double, radar_count> radar_reading(const RobotState& state, Point goal);

/// The 10 network inputs: six rangefinders then four radar slices.
std::array<double, sensor_count> sense(const RobotState& state, const MazeSpec& maze, const RobotParams& params);

/// One control step. Velocities integrate the centred actuator outputs and are
/// clamped; the heading turns, the robot advances, and any wall penetration is
/// resolved by pushing the centre back out along the contact normal. If that
/// cannot clear every wall the robot stays where it was.
RobotState step(const RobotState& state, double turn, double speed_change, const MazeSpec& maze,
                const RobotParams& params = {});

struct SimulationOptions {
    bool record_trail = false;
    /// Called before each control step with the state and the sensed inputs.
    std::function<void(const RobotState&, std::span<const double>)> observer;
};

/// Runs the controller from the maze start (heading +x, at rest) for up to
/// step_budget steps, stopping early once the goal is within the success radius.
SimulationResult simulate(const MazeSpec& maze, const neat::Network& controller, int step_budget,
                          const RobotParams& params = {}, const SimulationOptions& options = {});
SimulationResult simulate(const MazeSpec& maze, const neat::Genome& genome, int step_budget,
                          const RobotParams& params = {}, const SimulationOptions& options = {});

} // namespace divergent::maze
