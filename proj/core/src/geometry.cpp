#include "stucco/geometry.hpp"

#include <algorithm>
#include <limits>

namespace stucco {

Vec2 Vec2::normalized() const {
    const double n = norm();
    if (n <= 0.0) return {0.0, 0.0};
    return {x / n, y / n};
}

double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a > kPi) a -= 2.0 * kPi;
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

void validate_polygon(const std::vector<Vec2>& v) {
    if (v.size() < 3)
        throw std::invalid_argument("polygon needs at least 3 vertices");
    const size_t n = v.size();
    double area2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        const Vec2& c = v[(i + 2) % n];
        if (!std::isfinite(a.x) || !std::isfinite(a.y))
            throw std::invalid_argument("polygon vertex not finite");
        const double cr = (b - a).cross(c - b);
        if (cr <= 1e-12)
            throw std::invalid_argument("polygon must be strictly convex and CCW");
        area2 += a.cross(b);
    }
    if (area2 <= 0.0)
        throw std::invalid_argument("polygon must be counter-clockwise");
}

}  // namespace

Shape Shape::circle(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
    return Shape(Circle{radius});
}

Shape Shape::polygon(std::vector<Vec2> vertices) {
    validate_polygon(vertices);
    return Shape(ConvexPolygon{std::move(vertices)});
}

Shape Shape::box(double size_x, double size_y) {
    if (!(size_x > 0.0) || !(size_y > 0.0))
        throw std::invalid_argument("box extents must be positive");
    const double hx = 0.5 * size_x, hy = 0.5 * size_y;
    return polygon({{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}});
}

double Shape::signed_distance(const Vec2& p) const {
    if (is_circle()) return p.norm() - as_circle().radius;
    const auto& v = as_polygon().vertices;
    const size_t n = v.size();
    bool inside = true;
    double min_boundary = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        if ((b - a).cross(p - a) < 0.0) inside = false;
        min_boundary = std::min(min_boundary, point_segment_distance(p, a, b));
    }
    return inside ? -min_boundary : min_boundary;
}

Aabb Shape::bounding_box() const {
    if (is_circle()) {
        const double r = as_circle().radius;
        return {{-r, -r}, {r, r}};
    }
    Aabb box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
             {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const Vec2& p : as_polygon().vertices) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
    }
    return box;
}

double Shape::perimeter() const {
    if (is_circle()) return 2.0 * kPi * as_circle().radius;
    const auto& v = as_polygon().vertices;
    double len = 0.0;
    for (size_t i = 0; i < v.size(); ++i) len += (v[(i + 1) % v.size()] - v[i]).norm();
    return len;
}

std::vector<Vec2> Shape::boundary_samples(double spacing) const {
    if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
    std::vector<Vec2> out;
    if (is_circle()) {
        const double r = as_circle().radius;
        const int n = std::max(3, static_cast<int>(std::ceil(2.0 * kPi * r / spacing)));
        out.reserve(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * kPi * k / n;
            out.push_back({r * std::cos(a), r * std::sin(a)});
        }
        return out;
    }
    const auto& v = as_polygon().vertices;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        const double len = (b - a).norm();
        const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / n));
    }
    return out;
}

double Shape::yaw_symmetry() const {
    if (is_circle()) return 0.0;
    const auto& v = as_polygon().vertices;
    const size_t n = v.size();
    if (n % 2 != 0) return 2.0 * kPi;
    Vec2 centroid{0.0, 0.0};
    for (const Vec2& p : v) centroid += p;
    centroid = centroid / static_cast<double>(n);
    for (size_t i = 0; i < n / 2; ++i) {
        const Vec2 mirrored = centroid * 2.0 - v[i + n / 2];
        if ((v[i] - mirrored).norm() > 1e-9) return 2.0 * kPi;
    }
    return kPi;
}

double surface_distance(const Point2& p, const Shape& shape, const Pose2& shape_pose) {
    return std::abs(shape.signed_distance(shape_pose.inverse_apply(p)));
}

}  // namespace stucco
