#include "stucco/gmphd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stucco/baselines.hpp"

namespace stucco {

namespace {

double gaussian2(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                 const Eigen::Matrix2d& cov) {
    const Eigen::Matrix2d inv = cov.inverse();
    const double det = cov.determinant();
    const Eigen::Vector2d d = x - mean;
    return std::exp(-0.5 * d.dot(inv * d)) / (2.0 * kPi * std::sqrt(det));
}

void symmetrize(Eigen::Matrix2d& m) { m = 0.5 * (m + m.transpose()).eval(); }

GmphdState prune_and_merge(GmphdState state, const GmphdParams& params) {
    std::vector<GmphdComponent> pool;
    for (auto& c : state.components)
        if (c.weight >= params.prune_weight) pool.push_back(c);
    std::vector<GmphdComponent> merged;
    std::vector<bool> used(pool.size(), false);
    for (;;) {
        int best = -1;
        double best_w = -1.0;
        for (size_t i = 0; i < pool.size(); ++i) {
            if (!used[i] && pool[i].weight > best_w) {
                best_w = pool[i].weight;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) break;
        const Eigen::Matrix2d inv = pool[static_cast<size_t>(best)].cov.inverse();
        std::vector<size_t> group;
        for (size_t j = 0; j < pool.size(); ++j) {
            if (used[j]) continue;
            const Eigen::Vector2d d = pool[j].mean - pool[static_cast<size_t>(best)].mean;
            if (d.dot(inv * d) <= params.merge_mahal2) group.push_back(j);
        }
        GmphdComponent out;
        for (size_t j : group) out.weight += pool[j].weight;
        Eigen::Vector2d mean = Eigen::Vector2d::Zero();
        for (size_t j : group) mean += pool[j].weight * pool[j].mean;
        out.mean = mean / out.weight;
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        for (size_t j : group) {
            const Eigen::Vector2d d = pool[j].mean - out.mean;
            cov += pool[j].weight * (pool[j].cov + d * d.transpose());
        }
        out.cov = cov / out.weight;
        symmetrize(out.cov);
        merged.push_back(out);
        for (size_t j : group) used[j] = true;
    }
    state.components = std::move(merged);
    return state;
}

}  // namespace

GmphdState gmphd_step(GmphdState state, const std::optional<Point2>& measurement,
                      const PoseDelta& dx, const GmphdParams& params) {
    // Predict: survival scaling plus a little diffusion; targets are
    // stationary except the one nearest the contact, which moves with it.
    for (auto& c : state.components) {
        c.weight *= params.survival_prob;
        c.cov += params.process_var * Eigen::Matrix2d::Identity();
    }
    if (measurement.has_value()) {
        const Eigen::Vector2d z(measurement->x, measurement->y);
        const Eigen::Vector2d touch = z - Eigen::Vector2d(dx.translation.x, dx.translation.y);
        if (!state.components.empty()) {
            int nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < state.components.size(); ++i) {
                const double d = (state.components[i].mean - touch).norm();
                if (d < best) {
                    best = d;
                    nearest = static_cast<int>(i);
                }
            }
            state.components[static_cast<size_t>(nearest)].mean +=
                Eigen::Vector2d(dx.translation.x, dx.translation.y);
        }
        GmphdComponent birth;
        birth.weight = params.birth_weight;
        birth.mean = z;
        birth.cov = params.birth_var * Eigen::Matrix2d::Identity();
        state.components.push_back(birth);

        const Eigen::Matrix2d meas_cov = params.measurement_var * Eigen::Matrix2d::Identity();
        std::vector<double> likelihood(state.components.size());
        double denom = params.clutter_density;
        for (size_t i = 0; i < state.components.size(); ++i) {
            likelihood[i] = gaussian2(z, state.components[i].mean,
                                      state.components[i].cov + meas_cov);
            denom += params.detection_prob * state.components[i].weight * likelihood[i];
        }
        std::vector<GmphdComponent> updated;
        updated.reserve(2 * state.components.size());
        for (size_t i = 0; i < state.components.size(); ++i) {
            const GmphdComponent& c = state.components[i];
            GmphdComponent missed = c;
            missed.weight = (1.0 - params.detection_prob) * c.weight;
            updated.push_back(missed);
            const Eigen::Matrix2d s = c.cov + meas_cov;
            const Eigen::Matrix2d k = c.cov * s.inverse();
            GmphdComponent det;
            det.weight = params.detection_prob * c.weight * likelihood[i] / denom;
            det.mean = c.mean + k * (z - c.mean);
            det.cov = (Eigen::Matrix2d::Identity() - k) * c.cov;
            symmetrize(det.cov);
            updated.push_back(det);
        }
        state.components = std::move(updated);
    } else {
        // Empty measurement set: only the missed-detection terms remain.
        for (auto& c : state.components) c.weight *= (1.0 - params.detection_prob);
    }
    return prune_and_merge(std::move(state), params);
}

std::vector<int> gmphd_assign(const GmphdState& state, std::span<const Point2> points,
                              const GmphdParams& params) {
    std::vector<const GmphdComponent*> targets;
    for (const auto& c : state.components)
        if (c.weight > params.extract_weight) targets.push_back(&c);
    std::vector<int> labels(points.size(), 0);
    if (targets.empty()) return labels;
    for (size_t i = 0; i < points.size(); ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < targets.size(); ++t) {
            const double d = std::hypot(points[i].x - targets[t]->mean.x(),
                                        points[i].y - targets[t]->mean.y());
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(t);
            }
        }
        labels[i] = best;
    }
    return labels;
}

void GmphdTracker::step_contact(std::span<const ContactObservation> contacts) {
    for (const ContactObservation& c : contacts) {
        points_.push_back({c.p, c.x});
        const Point2 z = c.p + c.dx.translation;  // post-step contact location
        state_ = gmphd_step(std::move(state_), z, c.dx, params_);
        std::vector<Point2> positions;
        positions.reserve(points_.size());
        for (const TrackedPoint& tp : points_) positions.push_back(tp.p);
        const std::vector<int> labels = gmphd_assign(state_, positions, params_);
        const int moving = labels.back();
        for (size_t i = 0; i < points_.size(); ++i) {
            if (labels[i] != moving) continue;
            points_[i].p += c.dx.translation;
            points_[i].x = advance(points_[i].x, c.dx);
        }
    }
}

const SingleEstimate GmphdTracker::current() const {
    SingleEstimate out;
    out.points = points_;
    std::vector<Point2> positions;
    positions.reserve(points_.size());
    for (const TrackedPoint& tp : points_) positions.push_back(tp.p);
    out.labels = gmphd_assign(state_, positions, params_);
    return out;
}

}  // namespace stucco
