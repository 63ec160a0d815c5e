#include "stucco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "stucco/collision.hpp"

namespace stucco {

std::optional<double> contact_error(std::span<const TrackedPoint> points, const EnvState& env) {
    if (points.empty() || env.objects.empty()) return std::nullopt;
    double total = 0.0;
    for (const TrackedPoint& tp : points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& o : env.objects)
            best = std::min(best, surface_distance(tp.p, o.shape, o.pose));
        total += best;
    }
    return total / static_cast<double>(points.size());
}

double fmi(const Labeling& labeling) {
    if (labeling.predicted.size() != labeling.truth.size())
        throw std::invalid_argument("labeling length mismatch");
    const size_t n = labeling.predicted.size();
    // Pair counts from the contingency table.
    std::map<std::pair<int, int>, long long> cells;
    std::map<int, long long> pred_sizes, true_sizes;
    for (size_t i = 0; i < n; ++i) {
        ++cells[{labeling.predicted[i], labeling.truth[i]}];
        ++pred_sizes[labeling.predicted[i]];
        ++true_sizes[labeling.truth[i]];
    }
    auto choose2 = [](long long m) { return m * (m - 1) / 2; };
    long long tp = 0, pred_pairs = 0, true_pairs = 0;
    for (const auto& [key, c] : cells) tp += choose2(c);
    for (const auto& [key, c] : pred_sizes) pred_pairs += choose2(c);
    for (const auto& [key, c] : true_sizes) true_pairs += choose2(c);
    if (pred_pairs == 0 || true_pairs == 0) return 0.0;
    return static_cast<double>(tp) /
           std::sqrt(static_cast<double>(pred_pairs) * static_cast<double>(true_pairs));
}

double ambiguity_score(std::span<const StepRecord> records, const EnvState& env) {
    if (env.objects.size() < 2 || records.empty()) return 0.0;
    double total = 0.0;
    for (const StepRecord& rec : records) {
        std::vector<double> dists;
        dists.reserve(env.objects.size());
        for (size_t i = 0; i < env.objects.size(); ++i) {
            const Pose2& pose = i < rec.object_poses.size() ? rec.object_poses[i]
                                                            : env.objects[i].pose;
            dists.push_back(
                shape_clearance(env.gripper, rec.realized_pose, env.objects[i].shape, pose));
        }
        std::nth_element(dists.begin(), dists.begin() + 1, dists.end());
        const double d2 = dists[1];
        total += std::clamp(1.0 - d2 / 0.15, 0.0, 1.0);
    }
    return total / static_cast<double>(records.size());
}

}  // namespace stucco
