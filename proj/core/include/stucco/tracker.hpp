#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stucco/geometry.hpp"
#include "stucco/rng.hpp"
#include "stucco/sdf.hpp"

namespace stucco {

class ThreadPool;

/// A contact point paired with the end-effector pose at which it was sensed.
struct TrackedPoint {
    Point2 p;
    Pose2 x;
};

/// One hypothesis of all tracked points. Points stay in chronological append
/// order; log_weight accumulates step observation likelihoods between
/// resamples and is -inf for degenerate particles.
struct Particle {
    std::vector<TrackedPoint> points;
    double log_weight = 0.0;
};

struct TrackerParams {
    int n_particles = 100;
    double length_scale = 0.02;        // l, squared meters per unit exponent
    double penetration_scale = 0.002;  // delta, squared meters per unit exponent
    double connection_threshold = 0.4; // theta
    double penetration_offset = 0.0;   // meters of depth ignored by Cx
};

/// One detected contact: isolated point, end-effector pose at sensing time,
/// and the pose change over the step it was sensed in.
struct ContactObservation {
    Point2 p;
    Pose2 x;
    PoseDelta dx;
};

/// Same-object probability for two points at the given distance.
inline double connection_probability(double dist, double length_scale) {
    return std::exp(-dist * dist / length_scale);
}

/// Translates every point by the linear part of dx and composes every stored
/// pose with dx (yaw affects poses only, never points).
std::vector<TrackedPoint> dynamics_translate(std::vector<TrackedPoint> points,
                                             const PoseDelta& dx);

/// Replaces every point whose position penetrates any stored pose with the
/// nearest consistent point (both p and x), judged against the original point
/// set in a single pass. If no point is consistent the particle is returned
/// unchanged with log_weight = -inf.
Particle replace_bad(Particle particle, const SdfGrid& grid, const TrackerParams& params);

/// Connected components of the thresholded adjacency graph
/// e^(-d^2/l) > theta; labels numbered by first occurrence.
std::vector<int> segment(const Particle& particle, const TrackerParams& params);

/// Systematic resampling: ancestor slot index for each of n output slots,
/// proportional to the given non-negative weights, using one uniform draw.
std::vector<int> systematic_resample(std::span<const double> weights, int n, double u01);

/// Particle-filter belief over contact point sets with implicit associations.
/// Steps are serialized by the caller; per-particle work inside a step runs on
/// the worker pool, with one RNG stream per particle slot so results are
/// identical for any worker count.
class Belief {
public:
    Belief(const TrackerParams& params, const SdfGrid* grid, uint64_t master_seed,
           int workers = 1);
    ~Belief();
    Belief(Belief&&) noexcept;
    Belief& operator=(Belief&&) noexcept;

    /// Contact step: append observations, sample adjacency to the closest new
    /// contact, move adjacent points, weight by pairwise penetration, resample,
    /// repair.
    void step_contact(std::span<const ContactObservation> contacts);

    /// Free-space step: weight by penetration of stored points against x_t,
    /// resample, repair. No point motion.
    void step_free(const Pose2& x_t);

    const std::vector<Particle>& particles() const { return particles_; }
    const TrackerParams& params() const { return params_; }
    int steps() const { return steps_; }

    /// Highest accumulated log-weight since the last resample, ties broken by
    /// lowest index. Immediately after a resample this is the lowest slot that
    /// received a copy of the pre-resample winner.
    const Particle& map_particle() const { return particles_[map_index()]; }
    int map_index() const;

    // Diagnostics.
    const std::vector<int>& last_ancestry() const { return ancestry_; }
    const std::vector<double>& last_step_log_obs() const { return step_log_obs_; }
    int degeneracy_warnings() const { return degeneracy_warnings_; }

    /// One line-delimited log record: step index, contact flag, per-particle
    /// point arrays, weights, MAP index and its segmentation labels.
    std::string log_record(int step_index, bool contact) const;

private:
    void resample_and_repair();
    double particle_log_obs_pairwise(const Particle& p) const;

    TrackerParams params_;
    const SdfGrid* grid_;
    std::vector<Particle> particles_;
    std::vector<Rng> streams_;
    Rng belief_stream_;
    std::vector<double> step_log_obs_;
    std::vector<int> ancestry_;
    int map_index_ = 0;
    int steps_ = 0;
    int degeneracy_warnings_ = 0;
    std::unique_ptr<ThreadPool> pool_;
};

}  // namespace stucco
