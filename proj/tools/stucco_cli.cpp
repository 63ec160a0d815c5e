// Experiment runner: simulate rummaging trajectories, replay them through the
// tracking methods, and emit metric summaries and plot data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stucco/experiment.hpp"

namespace {

std::vector<uint64_t> parse_seeds(const std::string& spec) {
    // "0..19" or "0,3,7" or a single value.
    std::vector<uint64_t> seeds;
    if (const auto dots = spec.find(".."); dots != std::string::npos) {
        const uint64_t lo = std::stoull(spec.substr(0, dots));
        const uint64_t hi = std::stoull(spec.substr(dots + 2));
        for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
    return seeds;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contact-point soft tracking experiments"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run an experiment over seeds and methods");
    std::string preset = "gap2";
    std::string methods = "stucco";
    std::string seeds = "0";
    std::string out_dir = "out";
    std::string params_file;
    std::string trajectory_file;
    std::string env_file;
    int workers = 1;
    bool log_steps = false;
    bool log_particles = false;
    run->add_option("--preset", preset, "Environment preset name");
    run->add_option("--method", methods, "Comma list: stucco,dbscan,kmeans,gmphd");
    run->add_option("--seeds", seeds, "Seed list: \"0..19\" or \"0,1,2\"");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--params", params_file, "JSON parameter file (partial overrides)");
    run->add_option("--trajectory", trajectory_file, "Replay an authored action sequence file");
    run->add_option("--env", env_file, "Environment JSON overriding the preset layout");
    run->add_option("--workers", workers, "Worker threads");
    run->add_flag("--log-steps", log_steps, "Write per-step ndjson logs");
    run->add_flag("--log-particles", log_particles, "Include per-particle arrays in step logs");

    // plot-data
    auto* plot = app.add_subcommand("plot-data", "Aggregate a summary.csv into plot tables");
    std::string summary_path;
    std::string plot_out = "out";
    plot->add_option("--summary", summary_path, "Path to summary.csv")->required();
    plot->add_option("--out", plot_out, "Output directory");

    // export-preset
    auto* exp = app.add_subcommand("export-preset", "Write a preset's env and trajectory JSON");
    std::string exp_preset = "gap2";
    std::string exp_out = "presets";
    uint64_t exp_seed = 0;
    exp->add_option("--preset", exp_preset, "Preset name");
    exp->add_option("--out", exp_out, "Output directory");
    exp->add_option("--seed", exp_seed, "Seed (training presets randomize start/goal)");

    // list-presets
    auto* list = app.add_subcommand("list-presets", "List known presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            stucco::ExperimentConfig cfg;
            if (!params_file.empty()) cfg = stucco::config_from_json(read_file(params_file));
            cfg.preset = preset;
            cfg.methods.clear();
            std::stringstream ss(methods);
            std::string m;
            while (std::getline(ss, m, ',')) cfg.methods.push_back(m);
            cfg.seeds = parse_seeds(seeds);
            cfg.out_dir = out_dir;
            cfg.workers = workers;
            cfg.log_steps = log_steps;
            cfg.log_particles = log_particles;
            if (!trajectory_file.empty()) cfg.trajectory_file = trajectory_file;
            if (!env_file.empty()) cfg.env_file = env_file;
            const auto rows = stucco::run_experiment(cfg);
            stucco::emit_plot_data(rows, cfg.out_dir);
            int failed = 0;
            for (const auto& row : rows)
                if (row.failed) ++failed;
            std::cout << "wrote " << rows.size() << " runs to " << cfg.out_dir << "/summary.csv";
            if (failed > 0) std::cout << " (" << failed << " failed)";
            std::cout << "\n";
        } else if (*plot) {
            const auto rows = stucco::read_summary_csv(summary_path);
            stucco::emit_plot_data(rows, plot_out);
            std::cout << "wrote plot tables to " << plot_out << "\n";
        } else if (*exp) {
            const auto scenario = stucco::make_scenario(exp_preset, exp_seed);
            std::filesystem::create_directories(exp_out);
            {
                std::ofstream out(exp_out + "/" + exp_preset + "_env.json");
                out << stucco::env_to_json(scenario.env) << "\n";
            }
            {
                std::ofstream out(exp_out + "/" + exp_preset + "_trajectory.json");
                out << stucco::trajectory_to_json(scenario.trajectory) << "\n";
            }
            std::cout << "wrote " << exp_out << "/" << exp_preset << "_{env,trajectory}.json\n";
        } else if (*list) {
            for (const auto& name : stucco::preset_names()) std::cout << name << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
