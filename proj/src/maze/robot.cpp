#include "divergent/maze/robot.hpp"

#include "divergent/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace divergent::maze {

void RobotParams::validate() const
{
    auto require = [](bool ok, const char* key, double value) {
        if (!ok)
            throw ConfigError(fmt::format("sim.{} has invalid value {}", key, value));
    };
    require(radius > 0.0, "robot_radius", radius);
    require(rangefinder_range > 0.0, "rangefinder_range", rangefinder_range);
    require(max_speed > 0.0, "max_speed", max_speed);
    require(max_angular_velocity > 0.0, "max_angular_velocity", max_angular_velocity);
    require(turn_scale >= 0.0, "turn_scale", turn_scale);
    require(speed_scale >= 0.0, "speed_scale", speed_scale);
    require(success_radius >= 0.0, "success_radius", success_radius);
}

namespace {

double cast(Point origin, Point dir, const MazeSpec& maze, double range)
{
    double nearest = range;
    for (const auto& w : maze.walls)
        if (auto t = ray_hit(origin, dir, w); t && *t < nearest)
            nearest = *t;
    return nearest / range;
}

} // namespace

double rangefinder_reading(const RobotState& state, const MazeSpec& maze, double relative_angle,
                           const RobotParams& params)
{
    const double a = state.heading + relative_angle;
    return cast(state.position, {std::cos(a), std::sin(a)}, maze, params.rangefinder_range);
}

std::array<double, radar_count> radar_reading(const RobotState& state, Point goal)
{
    const Point d = goal - state.position;
    const double rel = wrap_angle(std::atan2(d.y, d.x) - state.heading + pi / 4);
    const int sector = std::min(radar_count - 1, static_cast<int>(rel / (pi / 2)));
    std::array<double, radar_count> out{};
    out[static_cast<std::size_t>(sector)] = 1.0;
    return out;
}

std::array<double, sensor_count> sense(const RobotState& state, const MazeSpec& maze, const RobotParams& params)
{
    std::array<double, sensor_count> in{};
    const double ch = std::cos(state.heading);
    const double sh = std::sin(state.heading);
    for (int r = 0; r < rangefinder_count; ++r) {
        const double a = params.rangefinder_angles[static_cast<std::size_t>(r)];
        const double ca = std::cos(a);
        const double sa = std::sin(a);
        const Point dir{ch * ca - sh * sa, sh * ca + ch * sa};
        in[static_cast<std::size_t>(r)] = cast(state.position, dir, maze, params.rangefinder_range);
    }
    const auto radar = radar_reading(state, maze.goal);
    std::copy(radar.begin(), radar.end(), in.begin() + rangefinder_count);
    return in;
}

RobotState step(const RobotState& state, double turn, double speed_change, const MazeSpec& maze,
                const RobotParams& params)
{
    RobotState next = state;
    next.angular_velocity = std::clamp(state.angular_velocity + (turn - 0.5) * params.turn_scale,
                                       -params.max_angular_velocity, params.max_angular_velocity);
    next.speed = std::clamp(state.speed + (speed_change - 0.5) * params.speed_scale, -params.max_speed,
                            params.max_speed);
    next.heading = wrap_angle(state.heading + next.angular_velocity);

    Point target = state.position + Point{std::cos(next.heading), std::sin(next.heading)} * next.speed;
    const double r = params.radius;
    if (params.collision == CollisionMode::stop) {
        for (const auto& w : maze.walls)
            if (distance_to_segment(w, target) < r) {
                target = state.position;
                break;
            }
        next.position = target;
        return next;
    }
    constexpr int max_passes = 8;
    constexpr double slack = 1e-12;
    for (int pass = 0; pass < max_passes; ++pass) {
        bool pushed = false;
        for (const auto& w : maze.walls) {
            const Point cp = closest_point(w, target);
            const double d = distance(target, cp);
            if (d >= r - slack)
                continue;
            if (d == 0.0) {
                target = state.position;
                break;
            }
            target = cp + (target - cp) * (r / d);
            pushed = true;
        }
        if (!pushed)
            break;
    }
    for (const auto& w : maze.walls) {
        if (distance_to_segment(w, target) < r - 1e-9) {
            target = state.position;
            break;
        }
    }
    next.position = target;
    return next;
}

SimulationResult simulate(const MazeSpec& maze, const neat::Network& controller, int step_budget,
                          const RobotParams& params, const SimulationOptions& options)
{
    if (step_budget < 1)
        throw std::invalid_argument("simulate: step budget must be at least 1");
    RobotState state;
    state.position = maze.start;
    SimulationResult result;
    if (options.record_trail)
        result.trail.push_back(state.position);
    std::array<double, 2> out{0.5, 0.5};
    int steps = 0;
    double d = distance(state.position, maze.goal);
    while (true) {
        if (d <= params.success_radius) {
            result.solved = true;
            break;
        }
        if (steps == step_budget)
            break;
        const auto in = sense(state, maze, params);
        if (options.observer)
            options.observer(state, in);
        controller.activate(in, out);
        state = step(state, out[0], out[1], maze, params);
        ++steps;
        if (options.record_trail)
            result.trail.push_back(state.position);
        d = distance(state.position, maze.goal);
    }
    result.behaviour = state.position;
    result.steps_used = steps;
    result.distance_to_goal = d;
    return result;
}

SimulationResult simulate(const MazeSpec& maze, const neat::Genome& genome, int step_budget,
                          const RobotParams& params, const SimulationOptions& options)
{
    const neat::Network net(genome);
    return simulate(maze, net, step_budget, params, options);
}

} // namespace divergent::maze
