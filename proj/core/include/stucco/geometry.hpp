#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace stucco {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double squared_norm() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const;
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

using Point2 = Vec2;

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

/// Planar rigid pose: rotate by yaw, then translate.
struct Pose2 {
    Vec2 translation;
    double yaw = 0.0;

    Vec2 apply(const Vec2& local) const {
        const double c = std::cos(yaw), s = std::sin(yaw);
        return {c * local.x - s * local.y + translation.x,
                s * local.x + c * local.y + translation.y};
    }
    Vec2 inverse_apply(const Vec2& world) const {
        const double c = std::cos(yaw), s = std::sin(yaw);
        const Vec2 d = world - translation;
        return {c * d.x + s * d.y, -s * d.x + c * d.y};
    }
    Vec2 rotate(const Vec2& v) const {
        const double c = std::cos(yaw), s = std::sin(yaw);
        return {c * v.x - s * v.y, s * v.x + c * v.y};
    }
    Vec2 inverse_rotate(const Vec2& v) const {
        const double c = std::cos(yaw), s = std::sin(yaw);
        return {c * v.x + s * v.y, -s * v.x + c * v.y};
    }
};

/// Component-wise pose change: translation added in world frame, yaw added to yaw.
/// This is the motion convention used by the tracker dynamics and the simulator.
struct PoseDelta {
    Vec2 translation;
    double yaw = 0.0;
};

inline Pose2 advance(const Pose2& x, const PoseDelta& d) {
    return {x.translation + d.translation, normalize_angle(x.yaw + d.yaw)};
}

inline PoseDelta delta_between(const Pose2& from, const Pose2& to) {
    return {to.translation - from.translation, normalize_angle(to.yaw - from.yaw)};
}

struct Aabb {
    Vec2 min;
    Vec2 max;
    Vec2 extent() const { return max - min; }
    Vec2 center() const { return (min + max) * 0.5; }
};

struct Circle {
    double radius = 0.0;
};

/// Counter-clockwise, strictly convex vertex loop.
struct ConvexPolygon {
    std::vector<Vec2> vertices;
};

/// A rigid planar shape in its own local frame. Either a circle centered at the
/// origin or a strictly convex CCW polygon. Construction validates the geometry.
class Shape {
public:
    static Shape circle(double radius);
    static Shape polygon(std::vector<Vec2> vertices);
    /// Axis-aligned rectangle of the given full extents, centered at the origin.
    static Shape box(double size_x, double size_y);

    bool is_circle() const { return std::holds_alternative<Circle>(rep_); }
    const Circle& as_circle() const { return std::get<Circle>(rep_); }
    const ConvexPolygon& as_polygon() const { return std::get<ConvexPolygon>(rep_); }

    /// Signed distance to the boundary at a local-frame point; negative inside.
    double signed_distance(const Vec2& local) const;
    bool contains(const Vec2& local) const { return signed_distance(local) <= 0.0; }

    Aabb bounding_box() const;
    double perimeter() const;

    /// Points on the boundary (local frame) spaced at most `spacing` apart.
    std::vector<Vec2> boundary_samples(double spacing) const;

    /// Yaw period under which the shape maps to itself: 0 for circles (free),
    /// pi for centrally symmetric polygons, 2*pi otherwise.
    double yaw_symmetry() const;

private:
    explicit Shape(Circle c) : rep_(c) {}
    explicit Shape(ConvexPolygon p) : rep_(std::move(p)) {}
    std::variant<Circle, ConvexPolygon> rep_;
};

/// Unsigned distance from a world-frame point to the boundary of a posed shape.
/// Zero on the boundary, positive on both sides.
double surface_distance(const Point2& p, const Shape& shape, const Pose2& shape_pose);

}  // namespace stucco
