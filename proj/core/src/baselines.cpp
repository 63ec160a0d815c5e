#include "stucco/baselines.hpp"

#include <algorithm>
#include <limits>

namespace stucco {

std::vector<int> dbscan(std::span<const Point2> points, double eps, int min_neighbors) {
    const size_t n = points.size();
    std::vector<int> labels(n, -1);
    const double eps2 = eps * eps;
    auto neighbors_of = [&](size_t i) {
        std::vector<size_t> out;
        for (size_t j = 0; j < n; ++j)
            if ((points[i] - points[j]).squared_norm() <= eps2) out.push_back(j);
        return out;
    };
    int cluster = 0;
    std::vector<size_t> queue;
    for (size_t i = 0; i < n; ++i) {
        if (labels[i] != -1) continue;
        auto nb = neighbors_of(i);
        if (static_cast<int>(nb.size()) < min_neighbors) continue;  // noise for now
        labels[i] = cluster;
        queue.assign(nb.begin(), nb.end());
        while (!queue.empty()) {
            const size_t j = queue.back();
            queue.pop_back();
            if (labels[j] != -1) continue;
            labels[j] = cluster;
            auto nj = neighbors_of(j);
            if (static_cast<int>(nj.size()) >= min_neighbors)
                for (size_t k : nj)
                    if (labels[k] == -1) queue.push_back(k);
        }
        ++cluster;
    }
    return labels;
}

namespace {

double assign_labels(std::span<const Point2> points, const std::vector<Point2>& centers,
                     std::vector<int>& labels) {
    double inertia = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < centers.size(); ++c) {
            const double d = (points[i] - centers[c]).squared_norm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[i] = best;
        inertia += best_d;
    }
    return inertia;
}

std::vector<Point2> plus_plus_seed(std::span<const Point2> points, int k, Rng& rng) {
    std::vector<Point2> centers;
    centers.push_back(points[rng.below(points.size())]);
    std::vector<double> d2(points.size());
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Point2& c : centers)
                best = std::min(best, (points[i] - c).squared_norm());
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(points[rng.below(points.size())]);
            continue;
        }
        double r = rng.uniform01() * total;
        size_t pick = points.size() - 1;
        for (size_t i = 0; i < points.size(); ++i) {
            r -= d2[i];
            if (r <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(points[pick]);
    }
    return centers;
}

double lloyd(std::span<const Point2> points, int k, Rng& rng, std::vector<int>& labels) {
    std::vector<Point2> centers = plus_plus_seed(points, k, rng);
    labels.assign(points.size(), 0);
    double inertia = assign_labels(points, centers, labels);
    for (int it = 0; it < 50; ++it) {
        std::vector<Point2> sums(static_cast<size_t>(k), {0.0, 0.0});
        std::vector<int> counts(static_cast<size_t>(k), 0);
        for (size_t i = 0; i < points.size(); ++i) {
            sums[static_cast<size_t>(labels[i])] += points[i];
            ++counts[static_cast<size_t>(labels[i])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<size_t>(c)] > 0) {
                centers[static_cast<size_t>(c)] =
                    sums[static_cast<size_t>(c)] / counts[static_cast<size_t>(c)];
            } else {
                // Re-seat an empty cluster at the point farthest from its center.
                size_t far = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < points.size(); ++i) {
                    const double d =
                        (points[i] - centers[static_cast<size_t>(labels[i])]).squared_norm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers[static_cast<size_t>(c)] = points[far];
            }
        }
        const double next = assign_labels(points, centers, labels);
        if (next >= inertia - 1e-15) {
            inertia = next;
            break;
        }
        inertia = next;
    }
    return inertia;
}

double kmeans_best(std::span<const Point2> points, int k, Rng& rng,
                   std::vector<int>& labels, int restarts = 10) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> trial;
    for (int r = 0; r < restarts; ++r) {
        const double inertia = lloyd(points, k, rng, trial);
        if (inertia < best) {
            best = inertia;
            labels = trial;
        }
    }
    return best;
}

std::vector<int> relabel_dense(std::vector<int> labels) {
    std::vector<int> remap;
    for (int& l : labels) {
        int found = -1;
        for (size_t r = 0; r < remap.size(); ++r)
            if (remap[r] == l) found = static_cast<int>(r);
        if (found == -1) {
            remap.push_back(l);
            found = static_cast<int>(remap.size()) - 1;
        }
        l = found;
    }
    return labels;
}

}  // namespace

std::vector<int> kmeans_grow(std::span<const Point2> points, double ratio, Rng& rng) {
    if (!(ratio > 1.0)) throw std::invalid_argument("growth ratio must exceed 1");
    if (points.empty()) return {};
    std::vector<int> labels;
    double inertia = kmeans_best(points, 1, rng, labels);
    int k = 1;
    while (k < static_cast<int>(points.size())) {
        if (inertia <= 0.0) break;  // perfect fit, 0/0 counts as no improvement
        std::vector<int> next_labels;
        const double next = kmeans_best(points, k + 1, rng, next_labels);
        const bool improves = next <= 0.0 || inertia / next > ratio;
        if (!improves) break;
        labels = std::move(next_labels);
        inertia = next;
        ++k;
    }
    return relabel_dense(std::move(labels));
}

SingleEstimate baseline_step(SingleEstimate state, const ContactObservation& contact,
                             ClusterMethod method, const BaselineParams& params, Rng& rng) {
    state.points.push_back({contact.p, contact.x});
    std::vector<Point2> positions;
    positions.reserve(state.points.size());
    for (const TrackedPoint& tp : state.points) positions.push_back(tp.p);
    state.labels = method == ClusterMethod::kDbscan
                       ? relabel_dense(dbscan(positions, params.dbscan_eps,
                                              params.dbscan_min_neighbors))
                       : kmeans_grow(positions, params.kmeans_ratio, rng);
    const int moving = state.labels.back();
    for (size_t i = 0; i < state.points.size(); ++i) {
        if (state.labels[i] != moving) continue;
        state.points[i].p += contact.dx.translation;
        state.points[i].x = advance(state.points[i].x, contact.dx);
    }
    return state;
}

}  // namespace stucco
