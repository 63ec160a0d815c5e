#pragma once

#include <span>
#include <vector>

#include "stucco/rng.hpp"
#include "stucco/tracker.hpp"

namespace stucco {

/// Single-estimate tracker state: one copy of every contact point plus its
/// current cluster labels (dense in [0, k)).
struct SingleEstimate {
    std::vector<TrackedPoint> points;
    std::vector<int> labels;
};

/// Density clustering. With min_neighbors = 1 (neighborhoods include the point
/// itself) this is exactly connected components of the eps-graph.
std::vector<int> dbscan(std::span<const Point2> points, double eps, int min_neighbors);

/// k-means that starts at k = 1 and grows while the inertia improves by more
/// than `ratio`. Seeding is k-means++ style from the given stream, 10 restarts
/// per k.
std::vector<int> kmeans_grow(std::span<const Point2> points, double ratio, Rng& rng);

enum class ClusterMethod { kDbscan, kKmeansGrow };

struct BaselineParams {
    double dbscan_eps = 0.05;
    int dbscan_min_neighbors = 1;
    double kmeans_ratio = 5.0;
};

/// Append the observation, recluster every stored point position, then move
/// all points sharing the new point's cluster by the linear part of dx.
SingleEstimate baseline_step(SingleEstimate state, const ContactObservation& contact,
                             ClusterMethod method, const BaselineParams& params, Rng& rng);

/// Clustering baseline driven by the same observation stream as the tracker.
class BaselineTracker {
public:
    BaselineTracker(ClusterMethod method, const BaselineParams& params, uint64_t seed)
        : method_(method), params_(params), rng_(seed) {}

    void step_contact(std::span<const ContactObservation> contacts) {
        for (const ContactObservation& c : contacts)
            state_ = baseline_step(std::move(state_), c, method_, params_, rng_);
    }
    void step_free(const Pose2&) {}  // clustering baselines only act in contact

    const SingleEstimate& state() const { return state_; }

private:
    ClusterMethod method_;
    BaselineParams params_;
    Rng rng_;
    SingleEstimate state_;
};

}  // namespace stucco
