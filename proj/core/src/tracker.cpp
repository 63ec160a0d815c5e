#include "stucco/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "stucco/parallel.hpp"

namespace stucco {

std::vector<TrackedPoint> dynamics_translate(std::vector<TrackedPoint> points,
                                             const PoseDelta& dx) {
    for (TrackedPoint& tp : points) {
        tp.p += dx.translation;
        tp.x = advance(tp.x, dx);
    }
    return points;
}

Particle replace_bad(Particle particle, const SdfGrid& grid, const TrackerParams& params) {
    const size_t m = particle.points.size();
    if (m == 0) return particle;
    std::vector<double> eps(m, 0.0);
    for (size_t j = 0; j < m; ++j) {
        for (size_t i = 0; i < m; ++i) {
            eps[j] += penetration_cx(particle.points[i].x, particle.points[j].p, grid,
                                     params.penetration_offset);
        }
    }
    std::vector<size_t> incon;
    for (size_t j = 0; j < m; ++j)
        if (eps[j] > 0.0) incon.push_back(j);
    if (incon.empty()) return particle;
    if (incon.size() == m) {
        particle.log_weight = -std::numeric_limits<double>::infinity();
        return particle;
    }
    const std::vector<TrackedPoint> original = particle.points;
    for (size_t j : incon) {
        size_t best = m;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < m; ++i) {
            if (eps[i] > 0.0) continue;
            const double d = (original[i].p - original[j].p).squared_norm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        particle.points[j] = original[best];
    }
    return particle;
}

std::vector<int> segment(const Particle& particle, const TrackerParams& params) {
    const size_t m = particle.points.size();
    std::vector<int> labels(m, -1);
    int next = 0;
    std::vector<size_t> stack;
    for (size_t s = 0; s < m; ++s) {
        if (labels[s] != -1) continue;
        labels[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const size_t i = stack.back();
            stack.pop_back();
            for (size_t j = 0; j < m; ++j) {
                if (labels[j] != -1) continue;
                const double d = (particle.points[i].p - particle.points[j].p).norm();
                if (connection_probability(d, params.length_scale) > params.connection_threshold) {
                    labels[j] = next;
                    stack.push_back(j);
                }
            }
        }
        ++next;
    }
    return labels;
}

std::vector<int> systematic_resample(std::span<const double> weights, int n, double u01) {
    std::vector<int> anc(static_cast<size_t>(n));
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) {
        for (int k = 0; k < n; ++k) anc[static_cast<size_t>(k)] = k % static_cast<int>(weights.size());
        return anc;
    }
    size_t i = 0;
    double cum = weights[0];
    for (int k = 0; k < n; ++k) {
        const double target = total * (u01 + k) / n;
        while (cum < target && i + 1 < weights.size()) {
            ++i;
            cum += weights[i];
        }
        anc[static_cast<size_t>(k)] = static_cast<int>(i);
    }
    return anc;
}

Belief::Belief(const TrackerParams& params, const SdfGrid* grid, uint64_t master_seed,
               int workers)
    : params_(params),
      grid_(grid),
      belief_stream_(child_seed(master_seed, 1ULL << 32)) {
    if (params_.n_particles < 1) throw std::invalid_argument("need at least one particle");
    if (grid_ == nullptr) throw std::invalid_argument("belief needs an SDF grid");
    particles_.resize(static_cast<size_t>(params_.n_particles));
    streams_.reserve(particles_.size());
    for (int n = 0; n < params_.n_particles; ++n)
        streams_.emplace_back(child_seed(master_seed, static_cast<uint64_t>(n)));
    step_log_obs_.assign(particles_.size(), 0.0);
    ancestry_.resize(particles_.size());
    for (size_t k = 0; k < ancestry_.size(); ++k) ancestry_[k] = static_cast<int>(k);
    if (workers > 1) pool_ = std::make_unique<ThreadPool>(workers);
}

Belief::~Belief() = default;
Belief::Belief(Belief&&) noexcept = default;
Belief& Belief::operator=(Belief&&) noexcept = default;

double Belief::particle_log_obs_pairwise(const Particle& p) const {
    double eps = 0.0;
    for (const TrackedPoint& pose_pt : p.points) {
        for (const TrackedPoint& point_pt : p.points) {
            eps += penetration_cx(pose_pt.x, point_pt.p, *grid_, params_.penetration_offset);
        }
    }
    return -eps * eps / params_.penetration_scale;
}

void Belief::step_contact(std::span<const ContactObservation> contacts) {
    if (contacts.empty()) throw std::invalid_argument("step_contact needs observations");
    auto work = [&](int n) {
        Particle& particle = particles_[static_cast<size_t>(n)];
        Rng& rng = streams_[static_cast<size_t>(n)];
        for (const ContactObservation& c : contacts)
            particle.points.push_back({c.p, c.x});
        // Adjacency to the closest new contact; distances taken before any
        // motion, so iteration order does not matter.
        for (TrackedPoint& tp : particle.points) {
            size_t best_k = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (size_t k = 0; k < contacts.size(); ++k) {
                const double d = (tp.p - contacts[k].p).norm();
                if (d < best_d) {
                    best_d = d;
                    best_k = k;
                }
            }
            const double p_connect = connection_probability(best_d, params_.length_scale);
            if (rng.uniform01() < p_connect) {
                tp.p += contacts[best_k].dx.translation;
                tp.x = advance(tp.x, contacts[best_k].dx);
            }
        }
        const double log_obs = particle_log_obs_pairwise(particle);
        step_log_obs_[static_cast<size_t>(n)] = log_obs;
        particle.log_weight += log_obs;
    };
    if (pool_) pool_->run(params_.n_particles, work);
    else for (int n = 0; n < params_.n_particles; ++n) work(n);
    resample_and_repair();
}

void Belief::step_free(const Pose2& x_t) {
    auto work = [&](int n) {
        Particle& particle = particles_[static_cast<size_t>(n)];
        double eps = 0.0;
        for (const TrackedPoint& tp : particle.points)
            eps += penetration_cx(x_t, tp.p, *grid_, params_.penetration_offset);
        const double log_obs = -eps * eps / params_.penetration_scale;
        step_log_obs_[static_cast<size_t>(n)] = log_obs;
        particle.log_weight += log_obs;
    };
    if (pool_) pool_->run(params_.n_particles, work);
    else for (int n = 0; n < params_.n_particles; ++n) work(n);
    resample_and_repair();
}

void Belief::resample_and_repair() {
    const int n = params_.n_particles;
    double w_max = -std::numeric_limits<double>::infinity();
    for (const Particle& p : particles_) w_max = std::max(w_max, p.log_weight);
    if (!std::isfinite(w_max)) {
        // All step likelihoods vanished; keep the particle set and continue.
        ++degeneracy_warnings_;
        for (size_t k = 0; k < particles_.size(); ++k) {
            particles_[k].log_weight = 0.0;
            ancestry_[k] = static_cast<int>(k);
        }
        map_index_ = 0;
    } else {
        std::vector<double> weights(particles_.size());
        int map_pre = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < particles_.size(); ++k) {
            weights[k] = std::exp(particles_[k].log_weight - w_max);
            if (particles_[k].log_weight > best) {
                best = particles_[k].log_weight;
                map_pre = static_cast<int>(k);
            }
        }
        ancestry_ = systematic_resample(weights, n, belief_stream_.uniform01());
        std::vector<Particle> next;
        next.reserve(particles_.size());
        std::vector<double> next_obs(particles_.size());
        for (size_t k = 0; k < particles_.size(); ++k) {
            next.push_back(particles_[static_cast<size_t>(ancestry_[k])]);
            next.back().log_weight = 0.0;
            next_obs[k] = step_log_obs_[static_cast<size_t>(ancestry_[k])];
        }
        particles_ = std::move(next);
        step_log_obs_ = std::move(next_obs);
        map_index_ = 0;
        for (size_t k = 0; k < ancestry_.size(); ++k) {
            if (ancestry_[k] == map_pre) {
                map_index_ = static_cast<int>(k);
                break;
            }
        }
    }
    auto repair = [&](int k) {
        particles_[static_cast<size_t>(k)] =
            replace_bad(std::move(particles_[static_cast<size_t>(k)]), *grid_, params_);
    };
    if (pool_) pool_->run(n, repair);
    else for (int k = 0; k < n; ++k) repair(k);
    ++steps_;
}

int Belief::map_index() const {
    bool uniform = true;
    for (const Particle& p : particles_) {
        if (p.log_weight != particles_[0].log_weight) {
            uniform = false;
            break;
        }
    }
    if (uniform) return map_index_;
    int best = 0;
    double best_w = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < particles_.size(); ++k) {
        if (particles_[k].log_weight > best_w) {
            best_w = particles_[k].log_weight;
            best = static_cast<int>(k);
        }
    }
    return best;
}

std::string Belief::log_record(int step_index, bool contact) const {
    nlohmann::ordered_json rec;
    rec["step"] = step_index;
    rec["contact"] = contact;
    auto points = nlohmann::ordered_json::array();
    auto weights = nlohmann::ordered_json::array();
    for (const Particle& particle : particles_) {
        auto arr = nlohmann::ordered_json::array();
        for (const TrackedPoint& tp : particle.points)
            arr.push_back({tp.p.x, tp.p.y, tp.x.translation.x, tp.x.translation.y, tp.x.yaw});
        points.push_back(std::move(arr));
        weights.push_back(particle.log_weight);
    }
    rec["particles"] = std::move(points);
    rec["log_weights"] = std::move(weights);
    const int map = map_index();
    rec["map"] = map;
    rec["labels"] = segment(particles_[static_cast<size_t>(map)], params_);
    return rec.dump();
}

}  // namespace stucco
