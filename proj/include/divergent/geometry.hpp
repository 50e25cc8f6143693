#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace divergent {

inline constexpr double pi = 3.14159265358979323846;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
    Point operator+(Point o) const { return {x + o.x, y + o.y}; }
    Point operator-(Point o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double squared_distance(Point a, Point b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

struct Segment {
    Point a;
    Point b;

    friend bool operator==(const Segment&, const Segment&) = default;
    double length() const { return distance(a, b); }
};

inline Point closest_point(const Segment& s, Point p)
{
    const Point d = s.b - s.a;
    const double len2 = dot(d, d);
    if (len2 == 0.0)
        return s.a;
    const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return s.a + d * t;
}

inline double distance_to_segment(const Segment& s, Point p) { return distance(p, closest_point(s, p)); }

/// Distance along the ray origin + t*dir (t >= 0, |dir| = 1) to the segment, if hit.
inline std::optional<double> ray_hit(Point origin, Point dir, const Segment& s)
{
    const Point e = s.b - s.a;
    const double denom = cross(dir, e);
    if (denom == 0.0)
        return std::nullopt; // parallel; a grazing collinear hit is covered by the adjoining walls
    const Point w = s.a - origin;
    const double t = cross(w, e) / denom;
    const double u = cross(w, dir) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0)
        return std::nullopt;
    return t;
}

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a)
{
    a = std::fmod(a, 2.0 * pi);
    if (a < 0.0)
        a += 2.0 * pi;
    if (a >= 2.0 * pi)
        a = 0.0;
    return a;
}

} // namespace divergent
