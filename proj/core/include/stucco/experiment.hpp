#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stucco/baselines.hpp"
#include "stucco/gmphd.hpp"
#include "stucco/metrics.hpp"
#include "stucco/presets.hpp"
#include "stucco/retrieval.hpp"
#include "stucco/sim.hpp"
#include "stucco/tracker.hpp"

namespace stucco {

struct ExperimentConfig {
    std::string preset = "gap2";
    std::vector<std::string> methods = {"stucco"};
    std::vector<uint64_t> seeds = {0};
    std::string out_dir = "out";
    int workers = 1;
    bool log_steps = false;
    bool log_particles = false;

    TrackerParams tracker;        // defaults: N=100, l=0.02, delta=0.002, theta=0.4
    BaselineParams baselines;     // dbscan eps 0.05 / min 1, kmeans ratio 5
    GmphdParams gmphd;            // birth 0.001, spawn 0, detection 0.3
    SimParams sim;
    double perturbation = 0.0005; // replay action noise bound, m
    double residual_threshold = 1.0;
    int calibration_samples = 256;
    // Residuals that trip the detector but carry too little force to localize
    // a hard-finger contact are skipped (logged as unisolable). Units of the
    // calibrated per-axis force noise sigma.
    double isolation_floor_sigma = 6.0;
    double model_spacing = 0.005;
    int icp_restarts = 30;

    std::optional<std::string> env_file;         // override preset environment
    std::optional<std::string> trajectory_file;  // override authored actions
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

struct RunResult {
    std::string preset;
    uint64_t seed = 0;
    std::string method;
    double fmi_value = std::numeric_limits<double>::quiet_NaN();
    double ce_m = std::numeric_limits<double>::quiet_NaN();
    double ambiguity = 0.0;
    bool grasp = false;
    bool failed = false;
    std::string note;
};

/// Output of one method over one simulated trajectory.
struct MethodOutput {
    std::vector<TrackedPoint> points;
    std::vector<int> labels;
    std::vector<int> truth_ids;  // per appended point; -1 when the step had no true contact
};

/// Simulates the scenario trajectory for one seed (replay for retrieval
/// presets, random-walk policy for training presets).
std::vector<StepRecord> simulate_scenario(const Scenario& scenario,
                                          const ExperimentConfig& cfg, uint64_t seed);

/// Detection, isolation, and filtering of one method over shared records.
MethodOutput run_method(const std::string& method, const Scenario& scenario,
                        const std::vector<StepRecord>& records, const ExperimentConfig& cfg,
                        uint64_t seed, const SdfGrid& grid,
                        std::vector<std::string>* step_log = nullptr);

/// Metrics plus retrieval and grasp evaluation of a finished run.
RunResult evaluate_run(const std::string& method, const Scenario& scenario,
                       const std::vector<StepRecord>& records, const MethodOutput& output,
                       const ExperimentConfig& cfg, uint64_t seed, const SdfGrid& grid);

/// Full protocol: one simulation per seed, every requested method replayed on
/// the same records, metrics and retrieval per run, CSV summaries and logs in
/// cfg.out_dir. Returns the rows in deterministic order.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

/// Per-method medians and 20/80th percentiles of FMI and CE, plus the
/// ambiguity >= 0.3 subset, written as plot_data.csv / plot_data_ambiguous.csv.
void emit_plot_data(const std::vector<RunResult>& rows, const std::string& out_dir);

std::vector<RunResult> read_summary_csv(const std::string& path);

}  // namespace stucco
