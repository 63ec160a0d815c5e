#include "stucco/sdf.hpp"

#include <algorithm>
#include <cmath>

namespace stucco {

SdfGrid::SdfGrid(const Shape& shape, double resolution, double padding) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
    if (padding < resolution) throw std::invalid_argument("padding must be at least one resolution");
    resolution_ = resolution;
    const Aabb box = shape.bounding_box();
    const Vec2 lo = box.min - Vec2{padding, padding};
    const Vec2 hi = box.max + Vec2{padding, padding};
    nx_ = static_cast<int>(std::ceil((hi.x - lo.x) / resolution)) + 1;
    ny_ = static_cast<int>(std::ceil((hi.y - lo.y) / resolution)) + 1;
    origin_ = lo;
    values_.resize(static_cast<size_t>(nx_) * ny_);
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            const Vec2 p{origin_.x + ix * resolution, origin_.y + iy * resolution};
            values_[static_cast<size_t>(iy) * nx_ + ix] = shape.signed_distance(p);
        }
    }
    surface_samples_ = shape.boundary_samples(resolution);
}

double SdfGrid::query(const Vec2& p) const {
    const double fx = (p.x - origin_.x) / resolution_;
    const double fy = (p.y - origin_.y) / resolution_;
    const int ix = std::clamp(static_cast<int>(std::lround(fx)), 0, nx_ - 1);
    const int iy = std::clamp(static_cast<int>(std::lround(fy)), 0, ny_ - 1);
    const double v = cell_value(ix, iy);
    const Vec2 cell{origin_.x + ix * resolution_, origin_.y + iy * resolution_};
    const double ex = std::max({p.x - (origin_.x + (nx_ - 1) * resolution_), origin_.x - p.x, 0.0});
    const double ey = std::max({p.y - (origin_.y + (ny_ - 1) * resolution_), origin_.y - p.y, 0.0});
    if (ex > 0.0 || ey > 0.0) return v + (p - cell).norm();
    return v;
}

double penetration_cx(const Pose2& pose, const Point2& p, const SdfGrid& grid,
                      double offset) {
    const double sd = grid.query(pose.inverse_apply(p));
    if (sd >= 0.0) return 0.0;
    return std::max(0.0, -sd - offset);
}

}  // namespace stucco
