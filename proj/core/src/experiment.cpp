#include "stucco/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "stucco/contact.hpp"
#include "stucco/parallel.hpp"

namespace stucco {

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double median(std::vector<double> v) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sample_std(std::vector<double> v) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double percentile(std::vector<double> v, double q) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double idx = q * static_cast<double>(v.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(idx));
    const size_t hi = static_cast<size_t>(std::ceil(idx));
    return v[lo] + (v[hi] - v[lo]) * (idx - static_cast<double>(lo));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    ExperimentConfig cfg;
    const auto j = nlohmann::json::parse(text);
    cfg.preset = j.value("preset", cfg.preset);
    if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.log_steps = j.value("log_steps", cfg.log_steps);
    cfg.log_particles = j.value("log_particles", cfg.log_particles);
    if (j.contains("tracker")) {
        const auto& t = j.at("tracker");
        cfg.tracker.n_particles = t.value("n_particles", cfg.tracker.n_particles);
        cfg.tracker.length_scale = t.value("length_scale", cfg.tracker.length_scale);
        cfg.tracker.penetration_scale =
            t.value("penetration_scale", cfg.tracker.penetration_scale);
        cfg.tracker.connection_threshold =
            t.value("connection_threshold", cfg.tracker.connection_threshold);
        cfg.tracker.penetration_offset =
            t.value("penetration_offset", cfg.tracker.penetration_offset);
    }
    if (j.contains("contact")) {
        const auto& c = j.at("contact");
        cfg.residual_threshold = c.value("residual_threshold", cfg.residual_threshold);
        cfg.calibration_samples = c.value("calibration_samples", cfg.calibration_samples);
        cfg.isolation_floor_sigma = c.value("isolation_floor_sigma", cfg.isolation_floor_sigma);
    }
    if (j.contains("baselines")) {
        const auto& b = j.at("baselines");
        cfg.baselines.dbscan_eps = b.value("dbscan_eps", cfg.baselines.dbscan_eps);
        cfg.baselines.dbscan_min_neighbors =
            b.value("dbscan_min_neighbors", cfg.baselines.dbscan_min_neighbors);
        cfg.baselines.kmeans_ratio = b.value("kmeans_ratio", cfg.baselines.kmeans_ratio);
    }
    if (j.contains("gmphd")) {
        const auto& g = j.at("gmphd");
        cfg.gmphd.birth_weight = g.value("birth_weight", cfg.gmphd.birth_weight);
        cfg.gmphd.spawn_weight = g.value("spawn_weight", cfg.gmphd.spawn_weight);
        cfg.gmphd.detection_prob = g.value("detection_prob", cfg.gmphd.detection_prob);
        cfg.gmphd.survival_prob = g.value("survival_prob", cfg.gmphd.survival_prob);
        cfg.gmphd.clutter_density = g.value("clutter_density", cfg.gmphd.clutter_density);
        cfg.gmphd.merge_mahal2 = g.value("merge_mahal2", cfg.gmphd.merge_mahal2);
        cfg.gmphd.prune_weight = g.value("prune_weight", cfg.gmphd.prune_weight);
        cfg.gmphd.extract_weight = g.value("extract_weight", cfg.gmphd.extract_weight);
        cfg.gmphd.measurement_var = g.value("measurement_var", cfg.gmphd.measurement_var);
        cfg.gmphd.process_var = g.value("process_var", cfg.gmphd.process_var);
        cfg.gmphd.birth_var = g.value("birth_var", cfg.gmphd.birth_var);
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        cfg.sim.stiffness = s.value("stiffness", cfg.sim.stiffness);
        cfg.sim.force_noise = s.value("force_noise", cfg.sim.force_noise);
        cfg.sim.torque_noise = s.value("torque_noise", cfg.sim.torque_noise);
        cfg.sim.max_action = s.value("max_action", cfg.sim.max_action);
        cfg.sim.substep = s.value("substep", cfg.sim.substep);
        cfg.perturbation = s.value("perturbation", cfg.perturbation);
    }
    if (j.contains("retrieval")) {
        const auto& r = j.at("retrieval");
        cfg.model_spacing = r.value("model_spacing", cfg.model_spacing);
        cfg.icp_restarts = r.value("icp_restarts", cfg.icp_restarts);
    }
    if (j.contains("env_file")) cfg.env_file = j.at("env_file").get<std::string>();
    if (j.contains("trajectory_file"))
        cfg.trajectory_file = j.at("trajectory_file").get<std::string>();
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["preset"] = cfg.preset;
    j["methods"] = cfg.methods;
    j["seeds"] = cfg.seeds;
    j["out_dir"] = cfg.out_dir;
    j["workers"] = cfg.workers;
    j["log_steps"] = cfg.log_steps;
    j["log_particles"] = cfg.log_particles;
    j["tracker"] = {{"n_particles", cfg.tracker.n_particles},
                    {"length_scale", cfg.tracker.length_scale},
                    {"penetration_scale", cfg.tracker.penetration_scale},
                    {"connection_threshold", cfg.tracker.connection_threshold},
                    {"penetration_offset", cfg.tracker.penetration_offset}};
    j["contact"] = {{"residual_threshold", cfg.residual_threshold},
                    {"calibration_samples", cfg.calibration_samples},
                    {"isolation_floor_sigma", cfg.isolation_floor_sigma}};
    j["baselines"] = {{"dbscan_eps", cfg.baselines.dbscan_eps},
                      {"dbscan_min_neighbors", cfg.baselines.dbscan_min_neighbors},
                      {"kmeans_ratio", cfg.baselines.kmeans_ratio}};
    j["gmphd"] = {{"birth_weight", cfg.gmphd.birth_weight},
                  {"spawn_weight", cfg.gmphd.spawn_weight},
                  {"detection_prob", cfg.gmphd.detection_prob},
                  {"survival_prob", cfg.gmphd.survival_prob},
                  {"clutter_density", cfg.gmphd.clutter_density},
                  {"merge_mahal2", cfg.gmphd.merge_mahal2},
                  {"prune_weight", cfg.gmphd.prune_weight},
                  {"extract_weight", cfg.gmphd.extract_weight},
                  {"measurement_var", cfg.gmphd.measurement_var},
                  {"process_var", cfg.gmphd.process_var},
                  {"birth_var", cfg.gmphd.birth_var}};
    j["sim"] = {{"stiffness", cfg.sim.stiffness},
                {"force_noise", cfg.sim.force_noise},
                {"torque_noise", cfg.sim.torque_noise},
                {"max_action", cfg.sim.max_action},
                {"substep", cfg.sim.substep},
                {"perturbation", cfg.perturbation}};
    j["retrieval"] = {{"model_spacing", cfg.model_spacing},
                      {"icp_restarts", cfg.icp_restarts}};
    if (cfg.env_file) j["env_file"] = *cfg.env_file;
    if (cfg.trajectory_file) j["trajectory_file"] = *cfg.trajectory_file;
    return j.dump(2);
}

std::vector<StepRecord> simulate_scenario(const Scenario& scenario, const ExperimentConfig& cfg,
                                          uint64_t seed) {
    if (scenario.training) {
        return run_random_walk_policy(scenario.env, scenario.policy_goal, 6,
                                      child_seed(seed, 11), cfg.sim)
            .records;
    }
    return run_replay(scenario.env, scenario.trajectory, cfg.perturbation, child_seed(seed, 12),
                      cfg.sim);
}

namespace {

ResidualModel calibrated_model(const ExperimentConfig& cfg, uint64_t seed) {
    Rng rng(child_seed(seed, 13));
    std::vector<Wrench2> samples(static_cast<size_t>(cfg.calibration_samples));
    for (auto& w : samples) {
        w.fx = rng.normal(0.0, cfg.sim.force_noise);
        w.fy = rng.normal(0.0, cfg.sim.force_noise);
        w.tau = rng.normal(0.0, cfg.sim.torque_noise);
    }
    return calibrate_precision(samples, cfg.residual_threshold);
}

int truth_id_for(const StepRecord& rec, const Point2& isolated) {
    if (rec.contacts.empty()) return -1;
    int best_id = rec.contacts[0].object_id;
    double best = (rec.contacts[0].point - isolated).squared_norm();
    for (const auto& c : rec.contacts) {
        const double d = (c.point - isolated).squared_norm();
        if (d < best) {
            best = d;
            best_id = c.object_id;
        }
    }
    return best_id;
}

std::string estimate_log_line(int step, bool contact, std::span<const TrackedPoint> points,
                              std::span<const int> labels) {
    nlohmann::ordered_json rec;
    rec["step"] = step;
    rec["contact"] = contact;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& tp : points)
        arr.push_back({tp.p.x, tp.p.y, tp.x.translation.x, tp.x.translation.y, tp.x.yaw});
    rec["points"] = std::move(arr);
    rec["labels"] = std::vector<int>(labels.begin(), labels.end());
    return rec.dump();
}

}  // namespace

MethodOutput run_method(const std::string& method, const Scenario& scenario,
                        const std::vector<StepRecord>& records, const ExperimentConfig& cfg,
                        uint64_t seed, const SdfGrid& grid,
                        std::vector<std::string>* step_log) {
    const ResidualModel model = calibrated_model(cfg, seed);
    const Shape& gripper = scenario.env.gripper;

    std::optional<Belief> belief;
    std::optional<BaselineTracker> baseline;
    std::optional<GmphdTracker> phd;
    if (method == "stucco") {
        belief.emplace(cfg.tracker, &grid, child_seed(seed, 14), cfg.workers);
    } else if (method == "dbscan") {
        baseline.emplace(ClusterMethod::kDbscan, cfg.baselines, child_seed(seed, 15));
    } else if (method == "kmeans") {
        baseline.emplace(ClusterMethod::kKmeansGrow, cfg.baselines, child_seed(seed, 15));
    } else if (method == "gmphd") {
        phd.emplace(cfg.gmphd);
    } else {
        throw std::invalid_argument("unknown method: " + method);
    }

    const double force_floor = cfg.isolation_floor_sigma * cfg.sim.force_noise;
    MethodOutput out;
    for (const StepRecord& rec : records) {
        const PoseDelta dx = rec.realized_delta;
        const bool detected = detect_contact(rec.wrench, model) &&
                              std::hypot(rec.wrench.fx, rec.wrench.fy) > force_floor;
        if (detected) {
            const IsolationResult iso = isolate_contact(rec.wrench, rec.realized_pose, gripper);
            // Back out this step's motion: the stored pair is the touch-time
            // observation, which the dynamics then advances by dx.
            ContactObservation obs;
            obs.p = iso.point - dx.translation;
            obs.x = {rec.realized_pose.translation - dx.translation,
                     normalize_angle(rec.realized_pose.yaw - dx.yaw)};
            obs.dx = dx;
            const std::vector<ContactObservation> obs_list{obs};
            if (belief) belief->step_contact(obs_list);
            if (baseline) baseline->step_contact(obs_list);
            if (phd) phd->step_contact(obs_list);
            out.truth_ids.push_back(truth_id_for(rec, iso.point));
        } else {
            if (belief) belief->step_free(rec.realized_pose);
            if (baseline) baseline->step_free(rec.realized_pose);
            if (phd) phd->step_free(rec.realized_pose);
        }
        if (step_log != nullptr) {
            if (belief && cfg.log_particles) {
                step_log->push_back(belief->log_record(rec.index, detected));
            } else {
                const auto snapshot = [&]() -> std::pair<std::vector<TrackedPoint>, std::vector<int>> {
                    if (belief) {
                        const Particle& map = belief->map_particle();
                        return {map.points, segment(map, cfg.tracker)};
                    }
                    if (baseline) return {baseline->state().points, baseline->state().labels};
                    const SingleEstimate est = phd->current();
                    return {est.points, est.labels};
                }();
                step_log->push_back(
                    estimate_log_line(rec.index, detected, snapshot.first, snapshot.second));
            }
        }
    }
    if (belief) {
        const Particle& map = belief->map_particle();
        out.points = map.points;
        out.labels = segment(map, cfg.tracker);
    } else if (baseline) {
        out.points = baseline->state().points;
        out.labels = baseline->state().labels;
    } else {
        const SingleEstimate est = phd->current();
        out.points = est.points;
        out.labels = est.labels;
    }
    return out;
}

RunResult evaluate_run(const std::string& method, const Scenario& scenario,
                       const std::vector<StepRecord>& records, const MethodOutput& output,
                       const ExperimentConfig& cfg, uint64_t seed, const SdfGrid& grid) {
    RunResult row;
    row.preset = cfg.preset;
    row.seed = seed;
    row.method = method;

    EnvState end_env = scenario.env;
    if (!records.empty()) {
        for (size_t i = 0; i < end_env.objects.size() && i < records.back().object_poses.size();
             ++i) {
            end_env.objects[i].pose = records.back().object_poses[i];
        }
    }

    // Points appended on steps without a true contact carry no truth id and
    // are excluded from the segmentation score.
    Labeling labeling;
    for (size_t i = 0; i < output.points.size() && i < output.truth_ids.size(); ++i) {
        if (output.truth_ids[i] < 0) continue;
        labeling.predicted.push_back(output.labels[i]);
        labeling.truth.push_back(output.truth_ids[i]);
    }
    if (labeling.predicted.size() >= 2) row.fmi_value = fmi(labeling);
    if (const auto ce = contact_error(output.points, end_env)) row.ce_m = *ce;
    row.ambiguity = ambiguity_score(records, scenario.env);

    const ObjectSpec* target = scenario.env.find(scenario.env.target_id);
    if (target != nullptr && !records.empty() && !output.points.empty()) {
        int max_label = -1;
        for (int l : output.labels) max_label = std::max(max_label, l);
        std::vector<std::vector<Point2>> segments(static_cast<size_t>(max_label + 1));
        for (size_t i = 0; i < output.points.size(); ++i)
            segments[static_cast<size_t>(output.labels[i])].push_back(output.points[i].p);
        const ModelPoints model = make_model_points(target->shape, cfg.model_spacing);
        const auto sel = select_target(segments, target->shape, model,
                                       records.back().realized_pose, grid, child_seed(seed, 16),
                                       cfg.icp_restarts);
        if (sel) row.grasp = grasp_check(sel->pose, end_env);
    }
    return row;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir + "/resolved_config.json");
        out << config_to_json(cfg) << "\n";
    }
    if (cfg.log_steps) fs::create_directories(cfg.out_dir + "/logs");

    const size_t n_seeds = cfg.seeds.size();
    const size_t n_methods = cfg.methods.size();
    std::vector<std::vector<RunResult>> grid_rows(n_seeds,
                                                  std::vector<RunResult>(n_methods));
    std::vector<std::vector<std::string>> notes(n_seeds);

    auto run_seed_cell = [&](int si) {
        const uint64_t seed = cfg.seeds[static_cast<size_t>(si)];
        Scenario scenario = make_scenario(cfg.preset, seed);
        if (cfg.env_file) scenario.env = env_from_json(read_file(*cfg.env_file));
        if (cfg.trajectory_file)
            scenario.trajectory = trajectory_from_json(read_file(*cfg.trajectory_file));
        const SdfGrid grid(scenario.env.gripper, 0.001, 0.02);
        std::vector<StepRecord> records;
        try {
            records = simulate_scenario(scenario, cfg, seed);
        } catch (const std::exception& e) {
            for (size_t mi = 0; mi < n_methods; ++mi) {
                RunResult& row = grid_rows[static_cast<size_t>(si)][mi];
                row.preset = cfg.preset;
                row.seed = seed;
                row.method = cfg.methods[mi];
                row.failed = true;
                row.note = e.what();
            }
            return;
        }
        if (cfg.log_steps) {
            std::ofstream out(cfg.out_dir + "/logs/" + cfg.preset + "_s" + std::to_string(seed) +
                              "_records.ndjson");
            for (const auto& rec : records) out << step_record_to_json(rec) << "\n";
        }
        for (size_t mi = 0; mi < n_methods; ++mi) {
            const std::string& method = cfg.methods[mi];
            std::vector<std::string> log_lines;
            MethodOutput output = run_method(method, scenario, records, cfg, seed, grid,
                                             cfg.log_steps ? &log_lines : nullptr);
            grid_rows[static_cast<size_t>(si)][mi] =
                evaluate_run(method, scenario, records, output, cfg, seed, grid);
            if (cfg.log_steps) {
                std::ofstream out(cfg.out_dir + "/logs/" + cfg.preset + "_s" +
                                  std::to_string(seed) + "_" + method + ".ndjson");
                for (const auto& line : log_lines) out << line << "\n";
            }
        }
    };

    const int outer = std::max(1, std::min<int>(cfg.workers, static_cast<int>(n_seeds)));
    if (outer > 1) {
        ThreadPool pool(outer);
        pool.run(static_cast<int>(n_seeds), run_seed_cell);
    } else {
        for (int si = 0; si < static_cast<int>(n_seeds); ++si) run_seed_cell(si);
    }

    std::vector<RunResult> rows;
    rows.reserve(n_seeds * n_methods);
    for (const auto& per_seed : grid_rows)
        for (const auto& row : per_seed) rows.push_back(row);

    std::ofstream summary(cfg.out_dir + "/summary.csv");
    summary << "preset,seed,method,fmi,ce_cm,ambiguity,grasp\n";
    for (const auto& row : rows) {
        if (row.failed) {
            summary << row.preset << "," << row.seed << "," << row.method
                    << ",nan,nan,nan,failed\n";
            continue;
        }
        summary << row.preset << "," << row.seed << "," << row.method << ","
                << fmt(row.fmi_value) << "," << fmt(row.ce_m * 100.0) << ","
                << fmt(row.ambiguity) << "," << (row.grasp ? 1 : 0) << "\n";
    }

    std::ofstream table(cfg.out_dir + "/table.csv");
    table << "preset,method,gs_pct,fmi_median,fmi_std,ce_median_cm,ce_std_cm\n";
    for (const std::string& method : cfg.methods) {
        std::vector<double> fmis, ces;
        int grasps = 0, valid = 0;
        for (const auto& row : rows) {
            if (row.method != method || row.failed) continue;
            ++valid;
            fmis.push_back(row.fmi_value);
            ces.push_back(row.ce_m * 100.0);
            if (row.grasp) ++grasps;
        }
        const double gs = valid > 0 ? 100.0 * grasps / valid : 0.0;
        table << cfg.preset << "," << method << "," << fmt(gs) << "," << fmt(median(fmis)) << ","
              << fmt(sample_std(fmis)) << "," << fmt(median(ces)) << "," << fmt(sample_std(ces))
              << "\n";
    }
    return rows;
}

void emit_plot_data(const std::vector<RunResult>& rows, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write = [&](const std::string& path, const std::vector<RunResult>& subset,
                     bool warn_empty) {
        std::vector<std::string> methods;
        for (const auto& row : subset)
            if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
                methods.push_back(row.method);
        std::ofstream out(path);
        out << "method,fmi_median,fmi_p20,fmi_p80,ce_median_cm,ce_p20_cm,ce_p80_cm,n\n";
        if (subset.empty() && warn_empty)
            std::cerr << "warning: ambiguity filter removed all runs\n";
        for (const auto& method : methods) {
            std::vector<double> fmis, ces;
            int n = 0;
            for (const auto& row : subset) {
                if (row.method != method || row.failed) continue;
                fmis.push_back(row.fmi_value);
                ces.push_back(row.ce_m * 100.0);
                ++n;
            }
            out << method << "," << fmt(median(fmis)) << "," << fmt(percentile(fmis, 0.2)) << ","
                << fmt(percentile(fmis, 0.8)) << "," << fmt(median(ces)) << ","
                << fmt(percentile(ces, 0.2)) << "," << fmt(percentile(ces, 0.8)) << "," << n
                << "\n";
        }
    };
    write(out_dir + "/plot_data.csv", rows, false);
    std::vector<RunResult> ambiguous;
    for (const auto& row : rows)
        if (!row.failed && row.ambiguity >= 0.3) ambiguous.push_back(row);
    write(out_dir + "/plot_data_ambiguous.csv", ambiguous, true);
}

std::vector<RunResult> read_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<RunResult> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        RunResult row;
        std::getline(ss, row.preset, ',');
        std::getline(ss, field, ',');
        row.seed = std::stoull(field);
        std::getline(ss, row.method, ',');
        std::getline(ss, field, ',');
        row.fmi_value = std::stod(field);
        std::getline(ss, field, ',');
        row.ce_m = std::stod(field) / 100.0;
        std::getline(ss, field, ',');
        row.ambiguity = std::stod(field);
        std::getline(ss, field, ',');
        row.failed = field == "failed";
        row.grasp = !row.failed && field == "1";
        rows.push_back(row);
    }
    return rows;
}

}  // namespace stucco
