#include "stucco/collision.hpp"

#include <algorithm>
#include <limits>

namespace stucco {

namespace {

std::vector<Vec2> world_vertices(const Shape& s, const Pose2& pose) {
    std::vector<Vec2> out;
    const auto& v = s.as_polygon().vertices;
    out.reserve(v.size());
    for (const Vec2& p : v) out.push_back(pose.apply(p));
    return out;
}

Vec2 world_centroid(const Shape& s, const Pose2& pose) {
    if (s.is_circle()) return pose.translation;
    Vec2 c{0.0, 0.0};
    const auto& v = s.as_polygon().vertices;
    for (const Vec2& p : v) c += p;
    return pose.apply(c / static_cast<double>(v.size()));
}

void project_onto(const Shape& s, const Pose2& pose, const Vec2& axis,
                  double& lo, double& hi) {
    if (s.is_circle()) {
        const double c = pose.translation.dot(axis);
        const double r = s.as_circle().radius;
        lo = c - r;
        hi = c + r;
        return;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const Vec2& p : s.as_polygon().vertices) {
        const double d = pose.apply(p).dot(axis);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
}

// Interval of tangent coordinates covered by the shape's support set along +axis.
void support_interval(const Shape& s, const Pose2& pose, const Vec2& axis,
                      const Vec2& tangent, double& t_lo, double& t_hi) {
    if (s.is_circle()) {
        const Vec2 p = pose.translation + axis * s.as_circle().radius;
        t_lo = t_hi = p.dot(tangent);
        return;
    }
    const auto verts = world_vertices(s, pose);
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : verts) best = std::max(best, p.dot(axis));
    t_lo = std::numeric_limits<double>::infinity();
    t_hi = -t_lo;
    for (const Vec2& p : verts) {
        if (p.dot(axis) >= best - 1e-7) {
            const double t = p.dot(tangent);
            t_lo = std::min(t_lo, t);
            t_hi = std::max(t_hi, t);
        }
    }
}

std::optional<Mtv> mtv_circle_circle(const Circle& a, const Pose2& pa,
                                     const Circle& b, const Pose2& pb) {
    const Vec2 d = pb.translation - pa.translation;
    const double dist = d.norm();
    const double depth = a.radius + b.radius - dist;
    if (depth <= 0.0) return std::nullopt;
    const Vec2 n = dist > 1e-12 ? d / dist : Vec2{1.0, 0.0};
    return Mtv{n, depth};
}

// Normal points from the polygon toward the circle.
std::optional<Mtv> mtv_poly_circle(const Shape& poly, const Pose2& ppose,
                                   const Shape& circ, const Pose2& cpose) {
    const double r = circ.as_circle().radius;
    const Vec2 local = ppose.inverse_apply(cpose.translation);
    const double sd = poly.signed_distance(local);
    const double depth = r - sd;
    if (depth <= 0.0) return std::nullopt;

    // Closest boundary point of the polygon to the center, local frame.
    const auto& v = poly.as_polygon().vertices;
    Vec2 best{0.0, 0.0};
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % v.size()];
        const Vec2 ab = b - a;
        const double t = std::clamp((local - a).dot(ab) / ab.squared_norm(), 0.0, 1.0);
        const Vec2 q = a + ab * t;
        const double d = (local - q).norm();
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    Vec2 dir_local = sd > 0.0 ? (local - best) : (best - local);
    if (dir_local.norm() <= 1e-12) dir_local = {1.0, 0.0};
    return Mtv{ppose.rotate(dir_local.normalized()), depth};
}

std::optional<Mtv> mtv_poly_poly(const Shape& a, const Pose2& pa,
                                 const Shape& b, const Pose2& pb) {
    const auto va = world_vertices(a, pa);
    const auto vb = world_vertices(b, pb);
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_axis{1.0, 0.0};
    auto test_axes = [&](const std::vector<Vec2>& verts) -> bool {
        for (size_t i = 0; i < verts.size(); ++i) {
            const Vec2 edge = verts[(i + 1) % verts.size()] - verts[i];
            const Vec2 axis = Vec2{edge.y, -edge.x}.normalized();
            double alo, ahi, blo, bhi;
            alo = ahi = va[0].dot(axis);
            for (const Vec2& p : va) {
                alo = std::min(alo, p.dot(axis));
                ahi = std::max(ahi, p.dot(axis));
            }
            blo = bhi = vb[0].dot(axis);
            for (const Vec2& p : vb) {
                blo = std::min(blo, p.dot(axis));
                bhi = std::max(bhi, p.dot(axis));
            }
            const double overlap = std::min(ahi, bhi) - std::max(alo, blo);
            if (overlap <= 0.0) return false;
            if (overlap < best) {
                best = overlap;
                best_axis = axis;
            }
        }
        return true;
    };
    if (!test_axes(va)) return std::nullopt;
    if (!test_axes(vb)) return std::nullopt;
    const Vec2 ca = world_centroid(a, pa);
    const Vec2 cb = world_centroid(b, pb);
    if ((cb - ca).dot(best_axis) < 0.0) best_axis = -best_axis;
    return Mtv{best_axis, best};
}

// Ericson-style closest points between segments, with a midpoint refinement
// for parallel overlapping segments so face-face contacts report the middle
// of the shared span.
ClosestPair seg_seg_closest(const Vec2& p1, const Vec2& q1,
                            const Vec2& p2, const Vec2& q2) {
    const Vec2 d1 = q1 - p1;
    const Vec2 d2 = q2 - p2;
    const Vec2 r = p1 - p2;
    const double a = d1.squared_norm();
    const double e = d2.squared_norm();
    const double f = d2.dot(r);
    double s = 0.0, t = 0.0;
    constexpr double kEps = 1e-18;

    if (a <= kEps && e <= kEps) {
        return {p1, p2, (p1 - p2).norm()};
    }
    if (a <= kEps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= kEps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            if (std::abs(d1.cross(d2)) <= 1e-9 * std::sqrt(a * e)) {
                // Parallel: use midpoint of the projected overlap when any.
                double t0 = (p2 - p1).dot(d1) / a;
                double t1 = (q2 - p1).dot(d1) / a;
                if (t0 > t1) std::swap(t0, t1);
                const double lo = std::max(0.0, t0);
                const double hi = std::min(1.0, t1);
                if (lo <= hi) {
                    s = 0.5 * (lo + hi);
                    const Vec2 c1 = p1 + d1 * s;
                    t = std::clamp((c1 - p2).dot(d2) / e, 0.0, 1.0);
                    const Vec2 c2 = p2 + d2 * t;
                    return {c1, c2, (c1 - c2).norm()};
                }
            }
            if (denom > 0.0) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    const Vec2 c1 = p1 + d1 * s;
    const Vec2 c2 = p2 + d2 * t;
    return {c1, c2, (c1 - c2).norm()};
}

ClosestPair overlap_representative(const Shape& a, const Pose2& pa,
                                   const Shape& b, const Pose2& pb,
                                   const Mtv& mtv) {
    const Vec2 n = mtv.normal;
    const Vec2 tangent = n.perp();
    double a_lo, a_hi, b_lo, b_hi;
    support_interval(a, pa, n, tangent, a_lo, a_hi);
    support_interval(b, pb, -n, tangent, b_lo, b_hi);
    const double lo = std::max(a_lo, b_lo);
    const double hi = std::min(a_hi, b_hi);
    const double t_mid = lo <= hi ? 0.5 * (lo + hi)
                                  : 0.25 * (a_lo + a_hi + b_lo + b_hi);
    double na_lo, na_hi, nb_lo, nb_hi;
    project_onto(a, pa, n, na_lo, na_hi);
    project_onto(b, pb, n, nb_lo, nb_hi);
    const double n_mid = 0.5 * (na_hi + nb_lo);
    const Vec2 p = tangent * t_mid + n * n_mid;
    return {p, p, 0.0};
}

ClosestPair separated_closest(const Shape& a, const Pose2& pa,
                              const Shape& b, const Pose2& pb) {
    if (a.is_circle() && b.is_circle()) {
        const double ra = a.as_circle().radius;
        const double rb = b.as_circle().radius;
        const Vec2 d = pb.translation - pa.translation;
        const double dist = d.norm();
        const Vec2 u = dist > 1e-12 ? d / dist : Vec2{1.0, 0.0};
        return {pa.translation + u * ra, pb.translation - u * rb,
                std::max(0.0, dist - ra - rb)};
    }
    if (a.is_circle() || b.is_circle()) {
        const bool a_is_circle = a.is_circle();
        const Shape& circ = a_is_circle ? a : b;
        const Pose2& cpose = a_is_circle ? pa : pb;
        const Shape& poly = a_is_circle ? b : a;
        const Pose2& ppose = a_is_circle ? pb : pa;
        const double r = circ.as_circle().radius;
        const Vec2 c = cpose.translation;
        ClosestPair best{{}, {}, std::numeric_limits<double>::infinity()};
        const auto verts = world_vertices(poly, ppose);
        for (size_t i = 0; i < verts.size(); ++i) {
            const auto pair = seg_seg_closest(verts[i], verts[(i + 1) % verts.size()], c, c);
            if (pair.distance < best.distance) best = pair;
        }
        const Vec2 q = best.on_a;  // point on polygon boundary
        const Vec2 dir = (c - q).normalized();
        const Vec2 on_circle = c - dir * r;
        const double dist = std::max(0.0, best.distance - r);
        if (a_is_circle) return {on_circle, q, dist};
        return {q, on_circle, dist};
    }
    const auto va = world_vertices(a, pa);
    const auto vb = world_vertices(b, pb);
    ClosestPair best{{}, {}, std::numeric_limits<double>::infinity()};
    for (size_t i = 0; i < va.size(); ++i) {
        for (size_t j = 0; j < vb.size(); ++j) {
            const auto pair = seg_seg_closest(va[i], va[(i + 1) % va.size()],
                                              vb[j], vb[(j + 1) % vb.size()]);
            if (pair.distance < best.distance) best = pair;
        }
    }
    return best;
}

}  // namespace

std::optional<Mtv> penetration_mtv(const Shape& a, const Pose2& pa,
                                   const Shape& b, const Pose2& pb) {
    if (a.is_circle() && b.is_circle())
        return mtv_circle_circle(a.as_circle(), pa, b.as_circle(), pb);
    if (a.is_circle()) {
        auto m = mtv_poly_circle(b, pb, a, pa);
        if (!m) return std::nullopt;
        return Mtv{-m->normal, m->depth};
    }
    if (b.is_circle()) return mtv_poly_circle(a, pa, b, pb);
    return mtv_poly_poly(a, pa, b, pb);
}

ClosestPair closest_points(const Shape& a, const Pose2& pa,
                           const Shape& b, const Pose2& pb) {
    if (auto mtv = penetration_mtv(a, pa, b, pb))
        return overlap_representative(a, pa, b, pb, *mtv);
    return separated_closest(a, pa, b, pb);
}

double shape_clearance(const Shape& a, const Pose2& pa,
                       const Shape& b, const Pose2& pb) {
    return closest_points(a, pa, b, pb).distance;
}

}  // namespace stucco
