#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stucco/collision.hpp"
#include "stucco/contact.hpp"
#include "stucco/geometry.hpp"
#include "stucco/rng.hpp"

namespace stucco {

struct ObjectSpec {
    int id = 0;
    std::string name;
    Shape shape = Shape::box(0.05, 0.05);
    Pose2 pose;
    bool movable = true;
    double mass_class = 1.0;  // display / push priority only
};

struct EnvState {
    std::vector<ObjectSpec> objects;
    Shape gripper = Shape::box(0.06, 0.04);
    Pose2 gripper_pose;
    int target_id = -1;
    Aabb workspace{{-0.4, -0.4}, {0.4, 0.4}};

    const ObjectSpec* find(int id) const {
        for (const auto& o : objects)
            if (o.id == id) return &o;
        return nullptr;
    }
};

struct ActionStep {
    double dx = 0.0;
    double dy = 0.0;
};

struct TrueContact {
    Point2 point;  // on the gripper boundary, world frame
    int object_id = 0;
};

struct StepRecord {
    int index = 0;
    ActionStep commanded;       // command actually issued (after perturbation)
    Pose2 realized_pose;        // gripper pose after the step
    PoseDelta realized_delta;   // pose change over the step
    Wrench2 wrench;             // simulated measurement, noise included
    std::vector<TrueContact> contacts;
    std::vector<Pose2> object_poses;  // by env object order
    std::vector<int> moved_ids;       // objects displaced this step
};

struct SimParams {
    double stiffness = 500.0;        // N per meter of resolved push
    double force_noise = 0.05;       // N, per axis
    double torque_noise = 0.005;     // N*m
    double max_action = 0.03;        // m per axis per step
    double substep = 0.001;          // m of gripper advance per projection round
    int max_project_iters = 20;
    double slop = 1e-5;              // separation left after a projection
    double touch_tolerance = 1e-4;   // clearance counted as touching
};

struct SimFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic quasi-static pushing: the gripper translates, movable objects
/// are projected out of penetration along minimum-translation directions
/// (chains propagate), walls stop objects, and infeasible motion truncates the
/// gripper. Objects never rotate.
class Simulator {
public:
    Simulator(EnvState env, const SimParams& params, uint64_t noise_seed);

    StepRecord step(const ActionStep& action);
    const EnvState& env() const { return env_; }
    const SimParams& params() const { return params_; }

private:
    struct BlockInfo {
        Vec2 normal;   // gripper -> object
        Point2 point;
        double amount = 0.0;
    };

    bool try_advance(const Vec2& delta, std::map<int, Vec2>& push_vec,
                     std::map<int, Vec2>& push_normal, std::map<int, Point2>& push_point,
                     std::map<int, BlockInfo>& blocked);
    bool resolve(std::map<int, Vec2>& push_vec, std::map<int, Vec2>& push_normal,
                 std::map<int, Point2>& push_point, int* blocking_id, Mtv* blocking_mtv,
                 Point2* blocking_point);

    EnvState env_;
    SimParams params_;
    Rng noise_;
    int step_index_ = 0;
};

/// Replays an authored action sequence, perturbing each action by up to
/// +/- perturb per axis (clamped to the action bound).
std::vector<StepRecord> run_replay(const EnvState& env, const std::vector<ActionStep>& actions,
                                   double perturb, uint64_t seed,
                                   const SimParams& params = {});

struct PolicyRun {
    std::vector<StepRecord> records;
    double contact_fraction = 0.0;
    bool discarded = false;  // in contact less than 5% of the time
};

/// Greedy straight-line controller that enters a bounded random walk upon
/// contact; terminates within 1 cm of the goal or after max_steps.
PolicyRun run_random_walk_policy(const EnvState& env, const Point2& goal, int walk_length,
                                 uint64_t seed, const SimParams& params = {},
                                 int max_steps = 500);

}  // namespace stucco
