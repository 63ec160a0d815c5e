#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "stucco/baselines.hpp"
#include "stucco/tracker.hpp"

namespace stucco {

struct GmphdComponent {
    double weight = 0.0;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

struct GmphdParams {
    double birth_weight = 0.001;
    double spawn_weight = 0.0;
    double detection_prob = 0.3;
    double survival_prob = 0.99;
    double clutter_density = 1e-6;   // expected clutter per square meter
    double merge_mahal2 = 4.0;
    double prune_weight = 1e-5;
    double extract_weight = 0.5;
    double measurement_var = 2.5e-5; // (5 mm)^2 position noise
    double process_var = 4e-6;      // (2 mm)^2 per-step diffusion
    double birth_var = 4e-4;        // (20 mm)^2 birth spread
};

/// Gaussian mixture intensity over target positions.
struct GmphdState {
    std::vector<GmphdComponent> components;

    double total_mass() const {
        double m = 0.0;
        for (const auto& c : components) m += c.weight;
        return m;
    }
};

/// One predict/update/prune/merge cycle of the Gaussian-mixture intensity
/// recursion with a position measurement model. Targets are stationary except
/// the component nearest the measurement, whose mean translates by the linear
/// part of dx before the update; births are placed at the measurement.
GmphdState gmphd_step(GmphdState state, const std::optional<Point2>& measurement,
                      const PoseDelta& dx, const GmphdParams& params);

/// Labels each point by its nearest extracted target (weight > extract
/// threshold); all points get label 0 when nothing extracts.
std::vector<int> gmphd_assign(const GmphdState& state, std::span<const Point2> points,
                              const GmphdParams& params);

/// PHD-filter baseline over the shared observation stream: keeps a single
/// estimate of all contact points, labels them against extracted targets, and
/// moves the labeled cluster of the newest point like the clustering baselines.
class GmphdTracker {
public:
    explicit GmphdTracker(const GmphdParams& params) : params_(params) {}

    void step_contact(std::span<const ContactObservation> contacts);
    void step_free(const Pose2&) {}

    const SingleEstimate current() const;
    const GmphdState& filter_state() const { return state_; }

private:
    GmphdParams params_;
    GmphdState state_;
    std::vector<TrackedPoint> points_;
};

}  // namespace stucco
