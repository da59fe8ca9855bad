#include <jerkpath/datasets.hpp>

#include <cmath>
#include <random>
#include <string>

#include <jerkpath/errors.hpp>

namespace jerkpath {

void limits_config::check() const {
    const std::size_t d = v_max.size();
    if (d == 0 || a_max.size() != d || j_max.size() != d) {
        throw invalid_argument_error("limits need matching non-empty v_max, a_max and j_max lists");
    }
    if (!(jerk_limit_factor > 0.0) || !std::isfinite(jerk_limit_factor)) {
        throw invalid_argument_error("jerk_limit_factor must be positive");
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (const double x : {v_max[i], a_max[i], j_max[i]}) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                throw invalid_argument_error("limit of dimension " + std::to_string(i) + " must be positive and finite");
            }
        }
    }
}

std::vector<kinematic_limits> limits_config::to_limits() const {
    check();
    std::vector<kinematic_limits> out;
    for (std::size_t i = 0; i < dimensions(); ++i) {
        out.push_back(kinematic_limits::symmetric(v_max[i], a_max[i], j_max[i] * jerk_limit_factor));
    }
    return out;
}

limits_config default_limits() {
    return {
        {1.71, 1.71, 1.74, 2.27, 2.44, 3.14, 3.14},
        {15.0, 7.5, 10.0, 12.5, 15.0, 20.0, 20.0},
        {300.0, 150.0, 200.0, 250.0, 300.0, 400.0, 400.0},
        1.0,
    };
}

std::vector<double> gen_random_1d(std::uint64_t seed, std::size_t n_waypoints, double position_range) {
    if (n_waypoints < 2) {
        throw invalid_argument_error("a random path needs at least 2 waypoints");
    }
    if (!(position_range > 0.0) || !std::isfinite(position_range)) {
        throw invalid_argument_error("position range must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pick(-position_range, position_range);
    std::vector<double> out;
    while (out.size() < n_waypoints) {
        const double x = pick(rng);
        if (out.empty() || std::abs(x - out.back()) >= 1e-3) {
            out.push_back(x);
        }
    }
    return out;
}

std::size_t random_waypoint_count(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    return std::uniform_int_distribution<std::size_t>(3, 6)(rng);
}

std::vector<std::vector<double>> gen_random_walk(std::uint64_t seed, std::size_t dimensions, const random_walk_config& config) {
    if (dimensions == 0) {
        throw invalid_argument_error("a random walk needs at least one dimension");
    }
    if (!(config.duration > 0.0) || !(config.sample_period > 0.0) || !(config.resample_period > 0.0) || !(config.accel_scale >= 0.0)) {
        throw invalid_argument_error("random walk durations must be positive and the acceleration scale nonnegative");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pick(-config.accel_scale, config.accel_scale);

    const auto steps = static_cast<std::size_t>(std::llround(config.duration / config.sample_period));
    const auto per_draw = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.resample_period / config.sample_period)));
    const double h = config.sample_period;

    std::vector<double> p(dimensions, 0.0);
    std::vector<double> v(dimensions, 0.0);
    std::vector<double> a(dimensions, 0.0);
    std::vector<std::vector<double>> samples{p};
    for (std::size_t k = 0; k < steps; ++k) {
        if (k % per_draw == 0) {
            for (double& x : a) {
                x = pick(rng);
            }
        }
        for (std::size_t i = 0; i < dimensions; ++i) {
            const double range = k_joint_position_range[std::min(i, k_joint_position_range.size() - 1)];
            const double next = p[i] + v[i] * h + 0.5 * a[i] * h * h;
            if (std::abs(next) > range) {
                v[i] = 0.0;
                a[i] = -std::copysign(std::abs(a[i]), p[i]);
                continue;
            }
            p[i] = next;
            v[i] += a[i] * h;
        }
        samples.push_back(p);
    }
    return samples;
}

}  // namespace jerkpath
