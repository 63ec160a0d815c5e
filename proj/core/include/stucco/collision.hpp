#pragma once

#include <optional>

#include "stucco/geometry.hpp"

namespace stucco {

/// Minimum translation that separates B from A: moving B by normal * depth
/// removes the overlap. Normal is a world-frame unit vector pointing from A
/// toward B.
struct Mtv {
    Vec2 normal;
    double depth = 0.0;
};

std::optional<Mtv> penetration_mtv(const Shape& a, const Pose2& pa,
                                   const Shape& b, const Pose2& pb);

struct ClosestPair {
    Point2 on_a;
    Point2 on_b;
    double distance = 0.0;
};

/// Closest boundary points between two non-overlapping shapes. For overlapping
/// shapes returns distance 0 and a representative point of the contact patch
/// (midpoint of the contact segment for face-face contacts).
ClosestPair closest_points(const Shape& a, const Pose2& pa,
                           const Shape& b, const Pose2& pb);

/// Separation distance; 0 when the shapes overlap or touch.
double shape_clearance(const Shape& a, const Pose2& pa,
                       const Shape& b, const Pose2& pb);

}  // namespace stucco
