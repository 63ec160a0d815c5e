#include "stucco/presets.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace stucco {

TrajectoryBuilder& TrajectoryBuilder::move_to(double x, double y, double cap) {
    const Vec2 goal{x, y};
    const Vec2 d = goal - cursor_;
    const double longest = std::max(std::abs(d.x), std::abs(d.y));
    if (longest < 1e-12) return *this;
    const int n = std::max(1, static_cast<int>(std::ceil(longest / cap)));
    for (int k = 0; k < n; ++k) actions_.push_back({d.x / n, d.y / n});
    cursor_ = goal;
    return *this;
}

TrajectoryBuilder& TrajectoryBuilder::nudge(double dx, double dy, int n) {
    for (int k = 0; k < n; ++k) {
        actions_.push_back({dx, dy});
        cursor_ += Vec2{dx, dy};
    }
    return *this;
}

namespace {

constexpr double kGripHalf = 0.02;  // gripper is a 0.04 x 0.04 box

Shape gripper_shape() { return Shape::box(0.04, 0.04); }

ObjectSpec wall(int id, const std::string& name, double cx, double cy, double sx, double sy) {
    ObjectSpec o;
    o.id = id;
    o.name = name;
    o.shape = Shape::box(sx, sy);
    o.pose = {{cx, cy}, 0.0};
    o.movable = false;
    o.mass_class = 0.0;
    return o;
}

ObjectSpec movable_box(int id, const std::string& name, double cx, double cy, double sx,
                       double sy, double mass = 1.0) {
    ObjectSpec o;
    o.id = id;
    o.name = name;
    o.shape = Shape::box(sx, sy);
    o.pose = {{cx, cy}, 0.0};
    o.movable = true;
    o.mass_class = mass;
    return o;
}

ObjectSpec movable_cylinder(int id, const std::string& name, double cx, double cy, double r,
                            double mass = 1.0) {
    ObjectSpec o;
    o.id = id;
    o.name = name;
    o.shape = Shape::circle(r);
    o.pose = {{cx, cy}, 0.0};
    o.movable = true;
    o.mass_class = mass;
    return o;
}

// Vertical poke: approach from above and sink `depth` into the surface whose
// touch level (gripper center at first contact) is ytc.
void poke_down(TrajectoryBuilder& tb, double x, double ytc, double depth = 0.006) {
    tb.move_to(x, ytc + 0.012);
    tb.move_to(x, ytc + 0.001, 0.011);
    const int n = static_cast<int>(std::ceil((depth + 0.001) / 0.003));
    tb.nudge(0.0, -0.003, n);
    tb.move_to(x, ytc + 0.012, 0.012);
}

void poke_up(TrajectoryBuilder& tb, double x, double ytc, double depth = 0.006) {
    tb.move_to(x, ytc - 0.012);
    tb.move_to(x, ytc - 0.001, 0.011);
    const int n = static_cast<int>(std::ceil((depth + 0.001) / 0.003));
    tb.nudge(0.0, 0.003, n);
    tb.move_to(x, ytc - 0.012, 0.012);
}

// Horizontal poke toward -x (gripper left edge meets a right-facing surface).
void poke_left(TrajectoryBuilder& tb, double xtc, double y, double depth = 0.006) {
    tb.move_to(xtc + 0.012, y);
    tb.move_to(xtc + 0.001, y, 0.011);
    const int n = static_cast<int>(std::ceil((depth + 0.001) / 0.003));
    tb.nudge(-0.003, 0.0, n);
    tb.move_to(xtc + 0.012, y, 0.012);
}

void poke_right(TrajectoryBuilder& tb, double xtc, double y, double depth = 0.006) {
    tb.move_to(xtc - 0.012, y);
    tb.move_to(xtc - 0.001, y, 0.011);
    const int n = static_cast<int>(std::ceil((depth + 0.001) / 0.003));
    tb.nudge(0.003, 0.0, n);
    tb.move_to(xtc - 0.012, y, 0.012);
}

// Long push downward: engage at touch level ytc and drive to y_end.
void push_down(TrajectoryBuilder& tb, double x, double ytc, double y_end) {
    tb.move_to(x, ytc + 0.010);
    tb.move_to(x, ytc + 0.001, 0.011);
    tb.move_to(x, y_end, 0.0075);
}

// Two boxes with a 1 mm gap; the hindsight-correction scenario. Pokes either
// side of the gap entangle the associations, a two-phase push separates the
// left box (the second corridor re-engages far from the right box's points so
// wrong riders detach), and slow sweeps through the opened region starve the
// particles that kept points in between.
Scenario make_gap2() {
    Scenario s;
    s.env.objects = {
        movable_box(0, "left_box", -0.0655, 0.0, 0.13, 0.06, 1.0),
        movable_box(1, "right_box", 0.0655, 0.0, 0.13, 0.06, 1.0),
    };
    s.env.gripper = gripper_shape();
    s.env.gripper_pose = {{0.0, 0.15}, 0.0};
    s.env.target_id = 0;
    s.env.workspace = {{-0.4, -0.4}, {0.4, 0.4}};

    TrajectoryBuilder tb(s.env.gripper_pose.translation);
    // Ambiguity pokes either side of the gap (points 4.2 cm apart).
    poke_down(tb, -0.021, 0.050);       // left box top, sinks to y ~ -0.006
    poke_down(tb, 0.021, 0.050);        // right box top
    // Push phase 1: drive the left box down from the gap-side corridor.
    push_down(tb, -0.021, 0.044, -0.065);   // left box top to ~ -0.085
    tb.move_to(-0.021, 0.060, 0.02);
    // Push phase 2: re-engage at the far end of the left box.
    tb.move_to(-0.108, 0.060);
    push_down(tb, -0.108, -0.063, -0.155);  // left box top to ~ -0.175
    // Slow sweeps across the opened region (bands -0.155 .. -0.04).
    tb.move_to(-0.108, -0.040, 0.02);
    tb.move_to(-0.24, -0.040, 0.02);
    tb.move_to(-0.24, -0.060, 0.02);
    tb.move_to(0.24, -0.060, 0.0075);
    tb.move_to(0.24, -0.0975, 0.02);
    tb.move_to(-0.24, -0.0975, 0.0075);
    tb.move_to(-0.24, -0.135, 0.02);
    tb.move_to(0.24, -0.135, 0.0075);
    // Slow pass up the strand lane under the right box, approached from below.
    tb.move_to(0.24, -0.270, 0.02);
    tb.move_to(0.027, -0.270, 0.02);
    tb.move_to(0.027, -0.060, 0.0075);
    tb.move_to(0.24, -0.060, 0.02);
    s.trajectory = tb.take();
    return s;
}

// Free-standing crate (target) and carton with a 1 mm gap.
Scenario make_fb() {
    Scenario s;
    s.env.objects = {
        movable_box(0, "crate", -0.0605, 0.0, 0.12, 0.06, 2.0),
        movable_box(1, "carton", 0.0455, 0.005, 0.09, 0.05, 1.0),
    };
    s.env.gripper = gripper_shape();
    s.env.gripper_pose = {{0.0, 0.15}, 0.0};
    s.env.target_id = 0;

    TrajectoryBuilder tb(s.env.gripper_pose.translation);
    poke_down(tb, -0.021, 0.050);        // crate top near the gap
    poke_down(tb, 0.021, 0.050);         // carton top near the gap
    poke_down(tb, -0.100, 0.044);        // crate top, far site
    push_down(tb, -0.021, 0.038, -0.155);  // crate down, top face to ~ -0.175
    // Fresh second-side pokes on the now-exposed right face of the crate.
    tb.move_to(0.08, -0.155, 0.02);
    poke_left(tb, 0.0195, -0.190);
    poke_left(tb, 0.0155, -0.220);
    // Sweeps through the opened region.
    tb.move_to(0.12, -0.060, 0.02);
    tb.move_to(-0.25, -0.060);
    tb.move_to(-0.25, -0.100);
    tb.move_to(0.25, -0.100);
    tb.move_to(0.25, -0.140);
    tb.move_to(-0.25, -0.140);
    // Vertical pass down the carton strand lane.
    tb.move_to(0.031, -0.060, 0.02);
    tb.move_to(0.031, -0.240, 0.02);
    tb.move_to(0.20, -0.240);
    s.trajectory = tb.take();
    return s;
}

// Corner walls, a block beside the target and a carton parked near the wall.
Scenario make_bc() {
    Scenario s;
    s.env.objects = {
        movable_box(0, "crate", -0.055, 0.0, 0.10, 0.06, 2.0),
        movable_box(1, "block", 0.0265, -0.005, 0.06, 0.05, 1.0),
        movable_box(2, "carton", -0.095, 0.085, 0.09, 0.05, 1.0),
        wall(3, "wall_left", -0.150, -0.02, 0.012, 0.36),
        wall(4, "wall_bottom", 0.0, -0.30, 0.36, 0.012),
    };
    s.env.gripper = gripper_shape();
    s.env.gripper_pose = {{0.05, 0.15}, 0.0};
    s.env.target_id = 0;

    TrajectoryBuilder tb(s.env.gripper_pose.translation);
    poke_down(tb, -0.0245, 0.050);       // crate top near the gap
    poke_down(tb, 0.0235, 0.040);        // block top near the gap
    poke_down(tb, -0.095, 0.130);        // carton top (clutter)
    push_down(tb, -0.0245, 0.038, -0.165);  // crate down, top face to ~ -0.185
    tb.move_to(0.08, -0.165, 0.02);
    poke_left(tb, 0.016, -0.200);        // fresh pokes on the crate right face
    poke_left(tb, 0.012, -0.230);
    tb.move_to(0.12, -0.065, 0.02);
    tb.move_to(-0.11, -0.065);
    tb.move_to(-0.11, -0.105);
    tb.move_to(0.20, -0.105);
    tb.move_to(0.20, -0.145);
    tb.move_to(-0.11, -0.145);
    tb.move_to(0.0335, -0.065, 0.02);
    tb.move_to(0.0335, -0.250, 0.02);
    tb.move_to(0.20, -0.250);
    s.trajectory = tb.take();
    return s;
}

// Target wedged between two blocks.
Scenario make_ib() {
    Scenario s;
    s.env.objects = {
        movable_box(0, "crate", 0.0, 0.0, 0.10, 0.06, 2.0),
        movable_box(1, "block_left", -0.0815, 0.0, 0.06, 0.06, 1.0),
        movable_box(2, "block_right", 0.0815, 0.0, 0.06, 0.06, 1.0),
    };
    s.env.gripper = gripper_shape();
    s.env.gripper_pose = {{0.0, 0.15}, 0.0};
    s.env.target_id = 0;

    TrajectoryBuilder tb(s.env.gripper_pose.translation);
    poke_down(tb, -0.028, 0.050);       // crate top, left site
    poke_down(tb, -0.068, 0.050);       // left block top (4.0 cm pair)
    poke_down(tb, 0.028, 0.044);        // crate top, right site
    poke_down(tb, 0.068, 0.050);        // right block top
    // Alternate push corridors so both crate point lanes ride down.
    push_down(tb, -0.028, 0.032, -0.045);
    tb.move_to(-0.028, 0.055, 0.02);
    tb.move_to(0.028, 0.055);
    push_down(tb, 0.028, -0.043, -0.120);
    tb.move_to(0.028, 0.055, 0.02);
    tb.move_to(-0.028, 0.055);
    push_down(tb, -0.028, -0.118, -0.200);  // crate top face ends near -0.22
    // Fresh pokes on the crate left face at depth.
    tb.move_to(-0.12, -0.200, 0.02);
    poke_right(tb, -0.0705, -0.235);
    poke_right(tb, -0.0665, -0.265);
    // Sweeps.
    tb.move_to(-0.22, -0.065, 0.02);
    tb.move_to(0.22, -0.065);
    tb.move_to(0.22, -0.105);
    tb.move_to(-0.22, -0.105);
    tb.move_to(-0.22, -0.150);
    tb.move_to(0.22, -0.150);
    tb.move_to(-0.075, -0.065, 0.02);
    tb.move_to(-0.075, -0.190, 0.02);   // left strand lane
    tb.move_to(-0.075, -0.065, 0.02);
    tb.move_to(0.075, -0.065);
    tb.move_to(0.075, -0.190, 0.02);    // right strand lane
    tb.move_to(0.20, -0.190);
    s.trajectory = tb.take();
    return s;
}

// Tomato-can analog flanked by two boxes, initially touching.
Scenario make_tc() {
    Scenario s;
    s.env.objects = {
        movable_cylinder(0, "can", 0.0, 0.0, 0.035, 1.5),
        movable_box(1, "box_left", -0.0815, 0.0, 0.09, 0.05, 1.0),
        movable_box(2, "box_right", 0.0715, 0.0, 0.07, 0.05, 1.0),
    };
    s.env.gripper = gripper_shape();
    s.env.gripper_pose = {{0.0, 0.15}, 0.0};
    s.env.target_id = 0;

    TrajectoryBuilder tb(s.env.gripper_pose.translation);
    poke_down(tb, -0.020, 0.055, 0.004);  // can, upper-left arc
    poke_down(tb, -0.0465, 0.045);        // left box top near the can
    poke_down(tb, 0.020, 0.051, 0.004);   // can, upper-right arc
    poke_down(tb, 0.048, 0.045);          // right box top near the can
    push_down(tb, 0.0, 0.047, -0.155);    // can straight down to ~ (0, -0.21)
    // Side pokes at depth for arc coverage.
    tb.move_to(0.09, -0.155, 0.02);
    poke_left(tb, 0.052, -0.210);
    tb.move_to(0.09, -0.270, 0.02);
    tb.move_to(-0.09, -0.270);
    poke_right(tb, -0.062, -0.210);
    // Sweeps.
    tb.move_to(-0.22, -0.065, 0.02);
    tb.move_to(0.22, -0.065);
    tb.move_to(0.22, -0.105);
    tb.move_to(-0.22, -0.105);
    tb.move_to(-0.22, -0.145);
    tb.move_to(0.22, -0.145);
    tb.move_to(-0.075, -0.065, 0.02);
    tb.move_to(-0.075, -0.175, 0.02);
    tb.move_to(-0.075, -0.065, 0.02);
    tb.move_to(0.075, -0.065);
    tb.move_to(0.075, -0.175, 0.02);
    tb.move_to(0.20, -0.175);
    s.trajectory = tb.take();
    return s;
}

void add_perimeter_walls(EnvState& env, int first_id, double half = 0.30) {
    const double t = 0.012;
    const double len = 2.0 * half + 2.0 * t;
    env.objects.push_back(wall(first_id + 0, "wall_n", 0.0, half + t / 2, len, t));
    env.objects.push_back(wall(first_id + 1, "wall_s", 0.0, -half - t / 2, len, t));
    env.objects.push_back(wall(first_id + 2, "wall_e", half + t / 2, 0.0, t, len));
    env.objects.push_back(wall(first_id + 3, "wall_w", -half - t / 2, 0.0, t, len));
}

Point2 sample_free_point(const EnvState& env, Rng& rng, double clearance) {
    const Shape& g = env.gripper;
    for (int tries = 0; tries < 1000; ++tries) {
        const Point2 p{rng.uniform(-0.26, 0.26), rng.uniform(-0.26, 0.26)};
        bool ok = true;
        for (const auto& o : env.objects) {
            if (shape_clearance(g, {p, 0.0}, o.shape, o.pose) < clearance) {
                ok = false;
                break;
            }
        }
        if (ok) return p;
    }
    throw std::runtime_error("could not sample a free gripper placement");
}

Scenario make_training(int variant, uint64_t seed) {
    Scenario s;
    s.training = true;
    s.env.gripper = gripper_shape();
    s.env.workspace = {{-0.31, -0.31}, {0.31, 0.31}};
    switch (variant) {
        case 1:
            s.env.objects = {movable_box(0, "crate", 0.0, 0.0, 0.12, 0.06, 2.0)};
            break;
        case 2:
            s.env.objects = {movable_box(0, "crate", -0.08, 0.05, 0.12, 0.06, 2.0),
                             movable_box(1, "carton", 0.07, -0.06, 0.09, 0.05, 1.0)};
            break;
        case 3:
            s.env.objects = {movable_box(0, "crate", -0.10, 0.10, 0.12, 0.06, 2.0),
                             movable_box(1, "carton", 0.10, 0.10, 0.09, 0.05, 1.0),
                             wall(2, "divider", 0.0, -0.10, 0.012, 0.20)};
            break;
        case 4:
            s.env.objects = {movable_box(0, "crate", -0.09, 0.0, 0.12, 0.06, 2.0),
                             movable_cylinder(1, "can", 0.02, 0.09, 0.035, 1.5),
                             movable_box(2, "carton", 0.08, -0.07, 0.09, 0.05, 1.0),
                             movable_box(3, "block", -0.02, -0.13, 0.06, 0.05, 0.5)};
            break;
        default:
            throw std::invalid_argument("unknown training variant");
    }
    const int next_id = static_cast<int>(s.env.objects.size());
    add_perimeter_walls(s.env, next_id);
    s.env.target_id = 0;

    Rng rng(child_seed(seed, 77));
    const Point2 start = sample_free_point(s.env, rng, 0.005);
    s.env.gripper_pose = {start, 0.0};
    for (int tries = 0; tries < 1000; ++tries) {
        const Point2 goal = sample_free_point(s.env, rng, 0.005);
        if ((goal - start).norm() >= 0.20) {
            s.policy_goal = goal;
            break;
        }
    }
    return s;
}

}  // namespace

Scenario make_scenario(const std::string& preset, uint64_t seed) {
    if (preset == "gap2") return make_gap2();
    if (preset == "FB") return make_fb();
    if (preset == "BC") return make_bc();
    if (preset == "IB") return make_ib();
    if (preset == "TC") return make_tc();
    if (preset == "training1") return make_training(1, seed);
    if (preset == "training2") return make_training(2, seed);
    if (preset == "training3") return make_training(3, seed);
    if (preset == "training4") return make_training(4, seed);
    throw std::invalid_argument("unknown preset: " + preset);
}

std::vector<std::string> preset_names() {
    return {"FB", "BC", "IB", "TC", "gap2", "training1", "training2", "training3", "training4"};
}

bool is_training_preset(const std::string& preset) {
    return preset.rfind("training", 0) == 0;
}

namespace {

nlohmann::ordered_json shape_to_json(const Shape& shape) {
    nlohmann::ordered_json j;
    if (shape.is_circle()) {
        j["type"] = "circle";
        j["radius"] = shape.as_circle().radius;
    } else {
        j["type"] = "polygon";
        auto arr = nlohmann::ordered_json::array();
        for (const Vec2& v : shape.as_polygon().vertices) arr.push_back({v.x, v.y});
        j["vertices"] = std::move(arr);
    }
    return j;
}

Shape shape_from_json(const nlohmann::json& j) {
    if (j.at("type") == "circle") return Shape::circle(j.at("radius").get<double>());
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices")) verts.push_back({v[0].get<double>(), v[1].get<double>()});
    return Shape::polygon(std::move(verts));
}

nlohmann::ordered_json pose_to_json(const Pose2& p) {
    return {p.translation.x, p.translation.y, p.yaw};
}

Pose2 pose_from_json(const nlohmann::json& j) {
    return {{j[0].get<double>(), j[1].get<double>()}, j[2].get<double>()};
}

}  // namespace

std::string env_to_json(const EnvState& env) {
    nlohmann::ordered_json j;
    j["gripper"] = shape_to_json(env.gripper);
    j["gripper_pose"] = pose_to_json(env.gripper_pose);
    j["target_id"] = env.target_id;
    j["workspace"] = {env.workspace.min.x, env.workspace.min.y, env.workspace.max.x,
                      env.workspace.max.y};
    auto objs = nlohmann::ordered_json::array();
    for (const auto& o : env.objects) {
        nlohmann::ordered_json jo;
        jo["id"] = o.id;
        jo["name"] = o.name;
        jo["shape"] = shape_to_json(o.shape);
        jo["pose"] = pose_to_json(o.pose);
        jo["movable"] = o.movable;
        jo["mass_class"] = o.mass_class;
        objs.push_back(std::move(jo));
    }
    j["objects"] = std::move(objs);
    return j.dump(2);
}

EnvState env_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    EnvState env;
    env.gripper = shape_from_json(j.at("gripper"));
    env.gripper_pose = pose_from_json(j.at("gripper_pose"));
    env.target_id = j.at("target_id").get<int>();
    const auto& w = j.at("workspace");
    env.workspace = {{w[0].get<double>(), w[1].get<double>()},
                     {w[2].get<double>(), w[3].get<double>()}};
    for (const auto& jo : j.at("objects")) {
        ObjectSpec o;
        o.id = jo.at("id").get<int>();
        o.name = jo.at("name").get<std::string>();
        o.shape = shape_from_json(jo.at("shape"));
        o.pose = pose_from_json(jo.at("pose"));
        o.movable = jo.at("movable").get<bool>();
        o.mass_class = jo.at("mass_class").get<double>();
        env.objects.push_back(std::move(o));
    }
    return env;
}

std::string trajectory_to_json(const std::vector<ActionStep>& actions) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& a : actions) arr.push_back({a.dx, a.dy});
    nlohmann::ordered_json j;
    j["actions"] = std::move(arr);
    return j.dump(2);
}

std::vector<ActionStep> trajectory_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<ActionStep> out;
    for (const auto& a : j.at("actions"))
        out.push_back({a[0].get<double>(), a[1].get<double>()});
    return out;
}

std::string step_record_to_json(const StepRecord& rec) {
    nlohmann::ordered_json j;
    j["step"] = rec.index;
    j["commanded"] = {rec.commanded.dx, rec.commanded.dy};
    j["pose"] = pose_to_json(rec.realized_pose);
    j["delta"] = {rec.realized_delta.translation.x, rec.realized_delta.translation.y,
                  rec.realized_delta.yaw};
    j["wrench"] = {rec.wrench.fx, rec.wrench.fy, rec.wrench.tau};
    auto contacts = nlohmann::ordered_json::array();
    for (const auto& c : rec.contacts) contacts.push_back({c.point.x, c.point.y, c.object_id});
    j["contacts"] = std::move(contacts);
    auto poses = nlohmann::ordered_json::array();
    for (const auto& p : rec.object_poses) poses.push_back(pose_to_json(p));
    j["object_poses"] = std::move(poses);
    j["moved"] = rec.moved_ids;
    return j.dump();
}

StepRecord step_record_from_json(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    StepRecord rec;
    rec.index = j.at("step").get<int>();
    rec.commanded = {j.at("commanded")[0].get<double>(), j.at("commanded")[1].get<double>()};
    rec.realized_pose = pose_from_json(j.at("pose"));
    rec.realized_delta = {{j.at("delta")[0].get<double>(), j.at("delta")[1].get<double>()},
                          j.at("delta")[2].get<double>()};
    rec.wrench = {j.at("wrench")[0].get<double>(), j.at("wrench")[1].get<double>(),
                  j.at("wrench")[2].get<double>()};
    for (const auto& c : j.at("contacts"))
        rec.contacts.push_back({{c[0].get<double>(), c[1].get<double>()}, c[2].get<int>()});
    for (const auto& p : j.at("object_poses")) rec.object_poses.push_back(pose_from_json(p));
    rec.moved_ids = j.at("moved").get<std::vector<int>>();
    return rec;
}

}  // namespace stucco
