#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <jerkpath/kinematics.hpp>

namespace jerkpath {

// Symmetric per-joint magnitudes and a jerk factor applied to every j_max.
struct limits_config {
    std::vector<double> v_max;
    std::vector<double> a_max;
    std::vector<double> j_max;
    double jerk_limit_factor = 1.0;

    std::size_t dimensions() const noexcept {
        return v_max.size();
    }

    // Throws invalid_argument_error on size mismatch or non-positive entries.
    void check() const;

    std::vector<kinematic_limits> to_limits() const;
};

// Seven-joint limits of a KUKA LBR iiwa 14 arm.
limits_config default_limits();

// Joint position ranges (rad) of the same arm, symmetric around zero.
inline constexpr std::array<double, 7> k_joint_position_range{2.967, 2.094, 2.967, 2.094, 2.967, 2.094, 3.054};

// Waypoint positions uniform in [-position_range, position_range], rejecting a waypoint closer
// than 1e-3 rad to its predecessor.
std::vector<double> gen_random_1d(std::uint64_t seed, std::size_t n_waypoints, double position_range);

// Waypoint count drawn uniformly from [3, 6], the default for dataset generation.
std::size_t random_waypoint_count(std::uint64_t seed);

struct random_walk_config {
    double duration = 10.0;
    // Each joint's acceleration is redrawn uniformly from [-accel_scale, accel_scale].
    double accel_scale = 1.5;
    double resample_period = 0.5;
    double sample_period = 0.01;
};

// D-dimensional samples from integrating piecewise-constant random joint accelerations from the
// zero configuration. A joint that would leave its position range is stopped and its
// acceleration is flipped. Joints beyond the seventh reuse the last range.
std::vector<std::vector<double>> gen_random_walk(std::uint64_t seed, std::size_t dimensions, const random_walk_config& config = {});

}  // namespace jerkpath
