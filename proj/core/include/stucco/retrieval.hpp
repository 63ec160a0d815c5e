#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stucco/geometry.hpp"
#include "stucco/sdf.hpp"
#include "stucco/sim.hpp"

namespace stucco {

/// Boundary samples of the known target shape, object frame.
struct ModelPoints {
    std::vector<Point2> points;
    double spacing = 0.005;
};

ModelPoints make_model_points(const Shape& shape, double spacing = 0.005);

struct IcpEstimate {
    Pose2 pose;             // maps model frame into the world
    double error = 0.0;     // mean squared correspondence distance, m^2
    bool converged = false;
    std::vector<double> iteration_errors;  // error after each alignment
};

/// Point-to-point planar ICP with the closed-form cross-covariance SVD
/// alignment. Stops when the pose change drops below 1e-6 or at the
/// iteration cap. Coincident sources are flagged non-converged.
IcpEstimate icp(std::span<const Point2> source, const ModelPoints& model, const Pose2& init,
                int max_iters = 50);

/// 30 (by default) ICP runs from uniformly random yaws and translations within
/// the source bounding box inflated by the model diameter.
std::vector<IcpEstimate> estimate_object(std::span<const Point2> points, const ModelPoints& model,
                                         int restarts, uint64_t seed, int max_iters = 50);

struct SelectResult {
    int segment_index = -1;
    Pose2 pose;
    double variance_score = 0.0;             // trace of restart translation covariance
    std::vector<double> all_variance_scores; // per input segment; -1 for skipped
};

/// Picks the segment whose restarts agree most in translation, then the
/// estimate that penetrates the robot least at x_t (ties by match error).
/// Segments with fewer than two points are skipped; returns nullopt when none
/// qualify.
std::optional<SelectResult> select_target(std::span<const std::vector<Point2>> segments,
                                          const Shape& target_shape, const ModelPoints& model,
                                          const Pose2& x_t, const SdfGrid& grid, uint64_t seed,
                                          int restarts = 30);

/// Pose check against the simulator's ground truth: translation within 2 cm
/// and yaw within 15 degrees after reducing by the target's symmetry.
bool grasp_check(const Pose2& estimate, const EnvState& env);

}  // namespace stucco
