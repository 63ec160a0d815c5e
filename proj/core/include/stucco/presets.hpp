#pragma once

#include <string>
#include <vector>

#include "stucco/sim.hpp"

namespace stucco {

/// One runnable scenario: the environment plus either an authored action
/// sequence (retrieval presets) or a rummaging goal (training presets).
struct Scenario {
    EnvState env;
    std::vector<ActionStep> trajectory;  // authored; empty for training presets
    Point2 policy_goal;                  // training presets only
    bool training = false;
};

/// Known presets: retrieval tasks FB, BC, IB, TC, the two-box ambiguity task
/// gap2, and training1..training4. Training presets randomize gripper start
/// and goal from the seed; all layouts are otherwise deterministic.
Scenario make_scenario(const std::string& preset, uint64_t seed);

std::vector<std::string> preset_names();
bool is_training_preset(const std::string& preset);

/// Straight-line waypoint compiler producing per-axis bounded action steps.
class TrajectoryBuilder {
public:
    explicit TrajectoryBuilder(Point2 start) : cursor_(start) {}

    /// Straight segment to (x, y), split into steps no longer than `cap` per axis.
    TrajectoryBuilder& move_to(double x, double y, double cap = 0.03);
    /// n identical steps of (dx, dy).
    TrajectoryBuilder& nudge(double dx, double dy, int n);

    const std::vector<ActionStep>& actions() const { return actions_; }
    std::vector<ActionStep> take() { return std::move(actions_); }
    const Point2& cursor() const { return cursor_; }

private:
    Point2 cursor_;
    std::vector<ActionStep> actions_;
};

// JSON round trip for environments, trajectories, and step records
// (line-delimited in files; one record per line).
std::string env_to_json(const EnvState& env);
EnvState env_from_json(const std::string& text);
std::string trajectory_to_json(const std::vector<ActionStep>& actions);
std::vector<ActionStep> trajectory_from_json(const std::string& text);
std::string step_record_to_json(const StepRecord& rec);
StepRecord step_record_from_json(const std::string& line);

}  // namespace stucco
