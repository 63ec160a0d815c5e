#pragma once

#include <optional>
#include <span>
#include <vector>

#include "stucco/sim.hpp"
#include "stucco/tracker.hpp"

namespace stucco {

/// Predicted labels paired with ground-truth object ids, aligned by point index.
struct Labeling {
    std::vector<int> predicted;
    std::vector<int> truth;
};

/// Mean over tracked points of the distance to the nearest object surface
/// (walls included), against the environment's current poses. Empty input is
/// a missing datum.
std::optional<double> contact_error(std::span<const TrackedPoint> points, const EnvState& env);

/// Fowlkes-Mallows index over unordered point pairs: TP/sqrt((TP+FP)(TP+FN)),
/// 0 when the denominator vanishes. Throws on length mismatch.
double fmi(const Labeling& labeling);

/// Mean over steps of clamp(1 - d2/0.15, 0, 1) where d2 is the distance from
/// the gripper to the second closest object. Fewer than two objects scores 0.
double ambiguity_score(std::span<const StepRecord> records, const EnvState& env);

}  // namespace stucco
