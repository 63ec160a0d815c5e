#include "stucco/retrieval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "stucco/rng.hpp"

namespace stucco {

ModelPoints make_model_points(const Shape& shape, double spacing) {
    if (!(spacing > 0.0) || spacing > 0.005)
        throw std::invalid_argument("model spacing must be in (0, 5 mm]");
    return {shape.boundary_samples(spacing), spacing};
}

namespace {

Pose2 align_svd(const std::vector<Point2>& model_pts, std::span<const Point2> world_pts) {
    // Closed-form rigid fit T minimizing sum |T(m_i) - s_i|^2.
    Vec2 mbar{0, 0}, sbar{0, 0};
    const double n = static_cast<double>(model_pts.size());
    for (size_t i = 0; i < model_pts.size(); ++i) {
        mbar += model_pts[i];
        sbar += world_pts[i];
    }
    mbar = mbar / n;
    sbar = sbar / n;
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (size_t i = 0; i < model_pts.size(); ++i) {
        const Vec2 m = model_pts[i] - mbar;
        const Vec2 s = world_pts[i] - sbar;
        h(0, 0) += m.x * s.x;
        h(0, 1) += m.x * s.y;
        h(1, 0) += m.y * s.x;
        h(1, 1) += m.y * s.y;
    }
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2d r = svd.matrixV() * svd.matrixU().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix2d d = Eigen::Matrix2d::Identity();
        d(1, 1) = -1.0;
        r = svd.matrixV() * d * svd.matrixU().transpose();
    }
    const double yaw = std::atan2(r(1, 0), r(0, 0));
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {{sbar.x - (c * mbar.x - s * mbar.y), sbar.y - (s * mbar.x + c * mbar.y)}, yaw};
}

}  // namespace

IcpEstimate icp(std::span<const Point2> source, const ModelPoints& model, const Pose2& init,
                int max_iters) {
    IcpEstimate est;
    est.pose = init;
    if (source.size() < 2 || model.points.empty() || max_iters < 1) return est;
    // All-coincident sources cannot constrain a pose.
    bool coincident = true;
    for (const Point2& p : source)
        if ((p - source[0]).norm() > 1e-12) coincident = false;
    if (coincident) {
        est.converged = false;
        return est;
    }
    std::vector<Point2> matched(source.size());
    for (int it = 0; it < max_iters; ++it) {
        // Nearest model point (world frame) per source point.
        for (size_t i = 0; i < source.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Point2& m : model.points) {
                const Point2 w = est.pose.apply(m);
                const double d = (w - source[i]).squared_norm();
                if (d < best) {
                    best = d;
                    matched[i] = m;
                }
            }
        }
        const Pose2 next = align_svd(matched, source);
        double err = 0.0;
        for (size_t i = 0; i < source.size(); ++i)
            err += (next.apply(matched[i]) - source[i]).squared_norm();
        err /= static_cast<double>(source.size());
        est.iteration_errors.push_back(err);
        est.error = err;
        const double dt = (next.translation - est.pose.translation).norm();
        const double dyaw = std::abs(normalize_angle(next.yaw - est.pose.yaw));
        est.pose = next;
        if (dt < 1e-6 && dyaw < 1e-6) {
            est.converged = true;
            break;
        }
    }
    return est;
}

std::vector<IcpEstimate> estimate_object(std::span<const Point2> points, const ModelPoints& model,
                                         int restarts, uint64_t seed, int max_iters) {
    Rng rng(seed);
    Aabb box{{points[0].x, points[0].y}, {points[0].x, points[0].y}};
    for (const Point2& p : points) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
    }
    double diameter = 0.0;
    for (const Point2& m : model.points)
        for (const Point2& q : model.points) diameter = std::max(diameter, (m - q).norm());
    std::vector<IcpEstimate> out;
    out.reserve(static_cast<size_t>(restarts));
    for (int r = 0; r < restarts; ++r) {
        Pose2 init;
        init.translation = {rng.uniform(box.min.x - diameter, box.max.x + diameter),
                            rng.uniform(box.min.y - diameter, box.max.y + diameter)};
        init.yaw = rng.uniform(-kPi, kPi);
        out.push_back(icp(points, model, init, max_iters));
    }
    return out;
}

namespace {

double robot_penetration_into(const Shape& object, const Pose2& object_pose, const Pose2& x_t,
                              const SdfGrid& grid) {
    double total = 0.0;
    for (const Vec2& s : grid.surface_samples()) {
        const Point2 world = x_t.apply(s);
        const double sd = object.signed_distance(object_pose.inverse_apply(world));
        if (sd < 0.0) total += -sd;
    }
    return total;
}

}  // namespace

std::optional<SelectResult> select_target(std::span<const std::vector<Point2>> segments,
                                          const Shape& target_shape, const ModelPoints& model,
                                          const Pose2& x_t, const SdfGrid& grid, uint64_t seed,
                                          int restarts) {
    SelectResult result;
    result.all_variance_scores.assign(segments.size(), -1.0);
    std::vector<IcpEstimate> best_estimates;
    double best_score = std::numeric_limits<double>::infinity();
    for (size_t si = 0; si < segments.size(); ++si) {
        if (segments[si].size() < 2) continue;
        auto ests = estimate_object(segments[si], model, restarts, child_seed(seed, si));
        Vec2 mean{0, 0};
        for (const auto& e : ests) mean += e.pose.translation;
        mean = mean / static_cast<double>(ests.size());
        double var = 0.0;
        for (const auto& e : ests) var += (e.pose.translation - mean).squared_norm();
        var /= static_cast<double>(ests.size());
        result.all_variance_scores[si] = var;
        if (var < best_score) {
            best_score = var;
            result.segment_index = static_cast<int>(si);
            best_estimates = std::move(ests);
        }
    }
    if (result.segment_index < 0) return std::nullopt;
    result.variance_score = best_score;
    int pick = -1;
    double pick_pen = 0.0;
    for (size_t e = 0; e < best_estimates.size(); ++e) {
        const double pen =
            robot_penetration_into(target_shape, best_estimates[e].pose, x_t, grid);
        if (pick < 0 || pen < pick_pen ||
            (pen == pick_pen && best_estimates[e].error <
                                    best_estimates[static_cast<size_t>(pick)].error)) {
            pick = static_cast<int>(e);
            pick_pen = pen;
        }
    }
    result.pose = best_estimates[static_cast<size_t>(pick)].pose;
    return result;
}

bool grasp_check(const Pose2& estimate, const EnvState& env) {
    const ObjectSpec* target = env.find(env.target_id);
    if (target == nullptr) return false;
    const double dt = (estimate.translation - target->pose.translation).norm();
    if (dt > 0.02) return false;
    const double symmetry = target->shape.yaw_symmetry();
    if (symmetry == 0.0) return true;  // rotationally free
    double dyaw = normalize_angle(estimate.yaw - target->pose.yaw);
    // Reduce modulo the symmetry period into (-period/2, period/2].
    dyaw = std::remainder(dyaw, symmetry);
    return std::abs(dyaw) <= 15.0 * kPi / 180.0;
}

}  // namespace stucco
