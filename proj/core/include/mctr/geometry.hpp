#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mctr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;

    Vec2 position() const { return {x, y}; }
    Vec2 forward() const { return unit_from_angle(heading); }
};

/// Maps a world point into the vehicle frame of `pose`.
inline Vec2 world_to_vehicle(const Pose& pose, const Vec2& p) {
    return rotate(p - pose.position(), -pose.heading);
}

inline Vec2 vehicle_to_world(const Pose& pose, const Vec2& p) {
    return rotate(p, pose.heading) + pose.position();
}

/// Signed Menger curvature of the circle through three points.
/// Positive for a left (counterclockwise) turn, zero for collinear points.
inline double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ab = b - a;
    const Vec2 bc = c - b;
    const Vec2 ac = c - a;
    const double denom = ab.norm() * bc.norm() * ac.norm();
    if (denom <= 0.0) return 0.0;
    return 2.0 * cross(ab, bc) / denom;
}

/// Distance from point p to segment [a, b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 == 0.0) return distance(p, a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

inline double normalize_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

using Polyline = std::vector<Vec2>;

inline double polyline_length(const Polyline& pts, bool closed = false) {
    double len = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
    if (closed && pts.size() > 1) len += distance(pts.back(), pts.front());
    return len;
}

inline double point_polyline_distance(const Vec2& p, const Polyline& poly, bool closed = true) {
    double best = std::numeric_limits<double>::infinity();
    const size_t n = poly.size();
    if (n == 0) return best;
    if (n == 1) return distance(p, poly[0]);
    const size_t segs = closed ? n : n - 1;
    for (size_t i = 0; i < segs; ++i) {
        best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    }
    return best;
}

}  // namespace mctr
