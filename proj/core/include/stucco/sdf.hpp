#pragma once

#include <vector>

#include "stucco/geometry.hpp"

namespace stucco {

/// Discretized signed distance field of a shape in its link frame, sampled at
/// cell centers from the analytic distance. Immutable after construction;
/// concurrent reads are safe. Queries use nearest-cell lookup.
class SdfGrid {
public:
    SdfGrid(const Shape& shape, double resolution, double padding);

    double resolution() const { return resolution_; }
    const Vec2& origin() const { return origin_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell_value(int ix, int iy) const { return values_[static_cast<size_t>(iy) * nx_ + ix]; }

    /// Signed distance at a link-frame point. Outside the grid: boundary cell
    /// value plus the euclidean distance to that cell center, always positive
    /// far away.
    double query(const Vec2& link_point) const;

    /// Boundary samples of the source shape (link frame), spaced at most one
    /// resolution apart.
    const std::vector<Vec2>& surface_samples() const { return surface_samples_; }

private:
    Vec2 origin_;        // link-frame position of cell (0, 0) center
    double resolution_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> values_;
    std::vector<Vec2> surface_samples_;
};

/// Penetration depth of world point p into the robot body at end-effector pose
/// `pose`: 0 outside, else distance to the nearest surface point, with the
/// first `offset` meters of depth ignored.
double penetration_cx(const Pose2& pose, const Point2& p, const SdfGrid& grid,
                      double offset = 0.0);

}  // namespace stucco
