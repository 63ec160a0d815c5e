#include "stucco/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stucco {

ResidualModel calibrate_precision(std::span<const Wrench2> samples,
                                  double configured_threshold) {
    if (samples.size() < 10)
        throw CalibrationError("calibration needs at least 10 free-space samples");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const Wrench2& w : samples) mean += w.vec();
    mean /= static_cast<double>(samples.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Wrench2& w : samples) {
        const Eigen::Vector3d d = w.vec() - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(samples.size() - 1);
    cov += Eigen::Matrix3d::Identity() * (1e-9 * cov.trace() / 3.0);
    const double det = cov.determinant();
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det))
        throw CalibrationError("free-space residual covariance is singular");
    ResidualModel model;
    model.precision = cov.inverse();
    model.threshold = configured_threshold * kSigmaGate * kSigmaGate;
    return model;
}

bool detect_contact(const Wrench2& gamma, const ResidualModel& model) {
    const Eigen::Vector3d g = gamma.vec();
    return g.dot(model.precision * g) > model.threshold;
}

namespace {

struct Candidate {
    Vec2 point;   // link frame
    Vec2 normal;  // outward
};

// Intersections of the torque-balance line {r : r x f = tau} with the shape
// boundary, with outward normals.
std::vector<Candidate> line_boundary_intersections(const Shape& shape,
                                                   const Vec2& f, double tau) {
    std::vector<Candidate> out;
    const double f2 = f.squared_norm();
    if (shape.is_circle()) {
        const double R = shape.as_circle().radius;
        const Vec2 r0{tau * f.y / f2, -tau * f.x / f2};
        const double disc = R * R - r0.squared_norm();
        if (disc < 0.0) return out;
        const Vec2 dir = f.normalized();
        const double s = std::sqrt(std::max(0.0, disc));
        for (const double sign : {-1.0, 1.0}) {
            const Vec2 p = r0 + dir * (sign * s);
            out.push_back({p, p.normalized()});
            if (s == 0.0) break;
        }
        return out;
    }
    const auto& v = shape.as_polygon().vertices;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i];
        const Vec2 e = v[(i + 1) % v.size()] - a;
        const double denom = e.cross(f);
        if (std::abs(denom) < 1e-15) continue;  // edge parallel to the line
        const double t = (tau - a.cross(f)) / denom;
        if (t < -1e-9 || t > 1.0 + 1e-9) continue;
        const Vec2 p = a + e * std::clamp(t, 0.0, 1.0);
        out.push_back({p, Vec2{e.y, -e.x}.normalized()});
    }
    // Deduplicate points produced by adjacent edges at shared vertices.
    std::vector<Candidate> unique;
    for (const auto& c : out) {
        bool dup = false;
        for (const auto& u : unique)
            if ((u.point - c.point).norm() < 1e-12) dup = true;
        if (!dup) unique.push_back(c);
    }
    return unique;
}

// Boundary point nearest the torque-balance line, used when no intersection
// admits an inward force.
Vec2 nearest_boundary_to_line(const Shape& shape, const Vec2& f, double tau) {
    const double fn = f.norm();
    auto line_dist = [&](const Vec2& p) { return std::abs(p.cross(f) - tau) / fn; };
    if (shape.is_circle()) {
        const double R = shape.as_circle().radius;
        const Vec2 r0{tau * f.y / f.squared_norm(), -tau * f.x / f.squared_norm()};
        if (r0.norm() < 1e-12) return {R, 0.0};
        return r0.normalized() * R;
    }
    const auto& v = shape.as_polygon().vertices;
    Vec2 best = v[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (const Vec2& p : v) {
        const double d = line_dist(p);
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

}  // namespace

IsolationResult isolate_contact(const Wrench2& gamma, const Pose2& pose, const Shape& shape) {
    const Vec2 f_world{gamma.fx, gamma.fy};
    const Vec2 f = pose.inverse_rotate(f_world);  // planar torque is rotation invariant
    const double tau = gamma.tau;
    if (f.norm() < 1e-12) {
        const Vec2 p = nearest_boundary_to_line(shape, {1.0, 0.0}, 0.0);
        return {pose.apply(p), true};
    }
    auto candidates = line_boundary_intersections(shape, f, tau);
    const Candidate* best = nullptr;
    for (const auto& c : candidates) {
        if (c.normal.dot(f) >= 0.0) continue;  // force must point into the body
        if (best == nullptr ||
            c.point.squared_norm() < best->point.squared_norm() - 1e-18)
            best = &c;
    }
    if (best != nullptr) return {pose.apply(best->point), false};
    return {pose.apply(nearest_boundary_to_line(shape, f, tau)), true};
}

}  // namespace stucco
