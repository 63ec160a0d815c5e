#include "stucco/sim.hpp"

#include <algorithm>
#include <cmath>

namespace stucco {

Simulator::Simulator(EnvState env, const SimParams& params, uint64_t noise_seed)
    : env_(std::move(env)), params_(params), noise_(noise_seed) {
    for (size_t i = 0; i < env_.objects.size(); ++i) {
        for (size_t j = i + 1; j < env_.objects.size(); ++j) {
            const auto mtv = penetration_mtv(env_.objects[i].shape, env_.objects[i].pose,
                                             env_.objects[j].shape, env_.objects[j].pose);
            if (mtv && mtv->depth > 1e-6)
                throw std::invalid_argument("initial object interpenetration: " +
                                            env_.objects[i].name + " / " + env_.objects[j].name);
        }
        const auto mtv = penetration_mtv(env_.gripper, env_.gripper_pose,
                                         env_.objects[i].shape, env_.objects[i].pose);
        if (mtv && mtv->depth > 1e-6)
            throw std::invalid_argument("gripper starts inside " + env_.objects[i].name);
    }
}

// One full projection pass; returns true when a clean scan found no overlap.
// On failure reports the deepest gripper-involved overlap for blame.
bool Simulator::resolve(std::map<int, Vec2>& push_vec, std::map<int, Vec2>& push_normal,
                        std::map<int, Point2>& push_point, int* blocking_id,
                        Mtv* blocking_mtv, Point2* blocking_point) {
    auto movables_by_distance = [&]() {
        std::vector<size_t> order;
        for (size_t i = 0; i < env_.objects.size(); ++i)
            if (env_.objects[i].movable) order.push_back(i);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            const double da =
                (env_.objects[a].pose.translation - env_.gripper_pose.translation).squared_norm();
            const double db =
                (env_.objects[b].pose.translation - env_.gripper_pose.translation).squared_norm();
            if (da != db) return da < db;
            return env_.objects[a].id < env_.objects[b].id;
        });
        return order;
    };

    for (int iter = 0; iter < params_.max_project_iters; ++iter) {
        bool any = false;
        // Gripper directly against a wall ends the attempt.
        for (const auto& obj : env_.objects) {
            if (obj.movable) continue;
            const auto mtv = penetration_mtv(env_.gripper, env_.gripper_pose, obj.shape, obj.pose);
            if (mtv && mtv->depth > 0.0) {
                *blocking_id = obj.id;
                *blocking_mtv = *mtv;
                *blocking_point =
                    closest_points(env_.gripper, env_.gripper_pose, obj.shape, obj.pose).on_a;
                return false;
            }
        }
        // Gripper pushes movables, nearest first.
        const auto order = movables_by_distance();
        for (size_t i : order) {
            auto& obj = env_.objects[i];
            const auto mtv = penetration_mtv(env_.gripper, env_.gripper_pose, obj.shape, obj.pose);
            if (!mtv || mtv->depth <= 0.0) continue;
            any = true;
            const Point2 rep =
                closest_points(env_.gripper, env_.gripper_pose, obj.shape, obj.pose).on_a;
            const Vec2 push = mtv->normal * (mtv->depth + params_.slop);
            obj.pose.translation += push;
            push_vec[obj.id] += push;
            push_normal[obj.id] = mtv->normal;
            push_point[obj.id] = rep;
        }
        // Movable chains: the object nearer the gripper acts as the pusher.
        for (size_t a : order) {
            for (size_t b : order) {
                if (a >= b) continue;
                auto& near = env_.objects[a];
                auto& far = env_.objects[b];
                const auto mtv = penetration_mtv(near.shape, near.pose, far.shape, far.pose);
                if (!mtv || mtv->depth <= 0.0) continue;
                any = true;
                const Vec2 push = mtv->normal * (mtv->depth + params_.slop);
                far.pose.translation += push;
                push_vec[far.id] += push;
            }
        }
        // Walls force objects back.
        for (size_t i : order) {
            auto& obj = env_.objects[i];
            for (const auto& wall : env_.objects) {
                if (wall.movable) continue;
                const auto mtv = penetration_mtv(wall.shape, wall.pose, obj.shape, obj.pose);
                if (!mtv || mtv->depth <= 0.0) continue;
                any = true;
                const Vec2 push = mtv->normal * (mtv->depth + params_.slop);
                obj.pose.translation += push;
                push_vec[obj.id] += push;
            }
        }
        if (!any) return true;
    }
    // Did not converge: blame the deepest gripper-involved overlap.
    double worst = 0.0;
    *blocking_id = -1;
    for (const auto& obj : env_.objects) {
        const auto mtv = penetration_mtv(env_.gripper, env_.gripper_pose, obj.shape, obj.pose);
        if (mtv && mtv->depth > worst) {
            worst = mtv->depth;
            *blocking_id = obj.id;
            *blocking_mtv = *mtv;
            *blocking_point =
                closest_points(env_.gripper, env_.gripper_pose, obj.shape, obj.pose).on_a;
        }
    }
    if (*blocking_id == -1) {
        // Unresolved chain not directly under the gripper; blame the nearest
        // touching object so the truncation is still attributed.
        double best = std::numeric_limits<double>::infinity();
        for (const auto& obj : env_.objects) {
            const auto pair =
                closest_points(env_.gripper, env_.gripper_pose, obj.shape, obj.pose);
            if (pair.distance < best) {
                best = pair.distance;
                *blocking_id = obj.id;
                *blocking_mtv = Mtv{(pair.on_b - pair.on_a).normalized(), 0.0};
                *blocking_point = pair.on_a;
            }
        }
    }
    return false;
}

bool Simulator::try_advance(const Vec2& delta, std::map<int, Vec2>& push_vec,
                            std::map<int, Vec2>& push_normal, std::map<int, Point2>& push_point,
                            std::map<int, BlockInfo>& blocked) {
    const Pose2 gripper_before = env_.gripper_pose;
    std::vector<Pose2> poses_before;
    poses_before.reserve(env_.objects.size());
    for (const auto& o : env_.objects) poses_before.push_back(o.pose);
    auto scratch_vec = push_vec;
    auto scratch_normal = push_normal;
    auto scratch_point = push_point;

    env_.gripper_pose.translation += delta;
    int blocking_id = -1;
    Mtv blocking_mtv{{1.0, 0.0}, 0.0};
    Point2 blocking_point;
    if (resolve(scratch_vec, scratch_normal, scratch_point, &blocking_id, &blocking_mtv,
                &blocking_point)) {
        push_vec = std::move(scratch_vec);
        push_normal = std::move(scratch_normal);
        push_point = std::move(scratch_point);
        return true;
    }
    env_.gripper_pose = gripper_before;
    for (size_t i = 0; i < env_.objects.size(); ++i) env_.objects[i].pose = poses_before[i];
    if (blocking_id >= 0) {
        BlockInfo& b = blocked[blocking_id];
        b.normal = blocking_mtv.normal;
        b.point = blocking_point;
        b.amount += std::max(0.0, delta.dot(blocking_mtv.normal));
    }
    return false;
}

StepRecord Simulator::step(const ActionStep& action) {
    const double ax = std::clamp(action.dx, -params_.max_action, params_.max_action);
    const double ay = std::clamp(action.dy, -params_.max_action, params_.max_action);
    const Pose2 start_pose = env_.gripper_pose;
    std::vector<Pose2> start_poses;
    start_poses.reserve(env_.objects.size());
    for (const auto& o : env_.objects) start_poses.push_back(o.pose);

    std::map<int, Vec2> push_vec;
    std::map<int, Vec2> push_normal;
    std::map<int, Point2> push_point;
    std::map<int, BlockInfo> blocked;

    const double longest = std::max(std::abs(ax), std::abs(ay));
    const int n_sub = std::max(1, static_cast<int>(std::ceil(longest / params_.substep)));
    const Vec2 delta{ax / n_sub, ay / n_sub};
    for (int s = 0; s < n_sub; ++s) {
        if (try_advance(delta, push_vec, push_normal, push_point, blocked)) continue;
        // Blocked as a whole; axis components may still slide.
        if (std::abs(delta.x) > 1e-15)
            try_advance({delta.x, 0.0}, push_vec, push_normal, push_point, blocked);
        if (std::abs(delta.y) > 1e-15)
            try_advance({0.0, delta.y}, push_vec, push_normal, push_point, blocked);
    }

    StepRecord rec;
    rec.index = step_index_++;
    rec.commanded = {ax, ay};
    rec.realized_pose = env_.gripper_pose;
    rec.realized_delta = delta_between(start_pose, env_.gripper_pose);

    // Wrench: stiffness times resolved depth per gripper contact, reaction on
    // the robot, torque about the end-effector origin.
    double fx = 0.0, fy = 0.0, tau = 0.0;
    for (const auto& obj : env_.objects) {
        Vec2 normal{0.0, 0.0};
        Point2 point;
        double depth = 0.0;
        if (auto it = push_normal.find(obj.id); it != push_normal.end()) {
            normal = it->second;
            point = push_point[obj.id];
            depth += std::max(0.0, push_vec[obj.id].dot(normal));
        }
        if (auto it = blocked.find(obj.id); it != blocked.end()) {
            if (normal.norm() == 0.0) {
                normal = it->second.normal;
                point = it->second.point;
            }
            depth += it->second.amount;
        }
        if (depth <= 0.0 || normal.norm() == 0.0) continue;
        const double clearance =
            shape_clearance(env_.gripper, env_.gripper_pose, obj.shape, obj.pose);
        if (clearance > params_.touch_tolerance && blocked.find(obj.id) == blocked.end())
            continue;  // pushed earlier in the step but separated since
        const Vec2 force = -normal * (params_.stiffness * depth);
        fx += force.x;
        fy += force.y;
        tau += (point - env_.gripper_pose.translation).cross(force);
        rec.contacts.push_back({point, obj.id});
    }
    rec.wrench.fx = fx + noise_.normal(0.0, params_.force_noise);
    rec.wrench.fy = fy + noise_.normal(0.0, params_.force_noise);
    rec.wrench.tau = tau + noise_.normal(0.0, params_.torque_noise);

    rec.object_poses.reserve(env_.objects.size());
    for (const auto& o : env_.objects) rec.object_poses.push_back(o.pose);
    for (size_t i = 0; i < env_.objects.size(); ++i) {
        if (env_.objects[i].pose.translation == start_poses[i].translation) continue;
        rec.moved_ids.push_back(env_.objects[i].id);
    }
    return rec;
}

std::vector<StepRecord> run_replay(const EnvState& env, const std::vector<ActionStep>& actions,
                                   double perturb, uint64_t seed, const SimParams& params) {
    Simulator sim(env, params, child_seed(seed, 0));
    Rng perturb_rng(child_seed(seed, 1));
    std::vector<StepRecord> records;
    records.reserve(actions.size());
    for (const ActionStep& a : actions) {
        ActionStep issued{
            std::clamp(a.dx + perturb_rng.uniform(-perturb, perturb), -params.max_action,
                       params.max_action),
            std::clamp(a.dy + perturb_rng.uniform(-perturb, perturb), -params.max_action,
                       params.max_action)};
        records.push_back(sim.step(issued));
    }
    return records;
}

PolicyRun run_random_walk_policy(const EnvState& env, const Point2& goal, int walk_length,
                                 uint64_t seed, const SimParams& params, int max_steps) {
    Simulator sim(env, params, child_seed(seed, 0));
    Rng walk_rng(child_seed(seed, 2));
    PolicyRun run;
    int contact_steps = 0;
    int walk_left = 0;
    for (int s = 0; s < max_steps; ++s) {
        const Vec2 g = sim.env().gripper_pose.translation;
        if ((g - goal).norm() <= 0.01) break;
        ActionStep a;
        if (walk_left > 0) {
            a = {walk_rng.uniform(-params.max_action, params.max_action),
                 walk_rng.uniform(-params.max_action, params.max_action)};
            --walk_left;
        } else {
            const Vec2 d = goal - g;
            a = {std::clamp(d.x, -params.max_action, params.max_action),
                 std::clamp(d.y, -params.max_action, params.max_action)};
        }
        StepRecord rec = sim.step(a);
        if (!rec.contacts.empty()) {
            ++contact_steps;
            walk_left = walk_length;
        }
        run.records.push_back(std::move(rec));
    }
    run.contact_fraction =
        run.records.empty() ? 0.0
                            : static_cast<double>(contact_steps) / run.records.size();
    run.discarded = run.contact_fraction < 0.05;
    return run;
}

}  // namespace stucco
