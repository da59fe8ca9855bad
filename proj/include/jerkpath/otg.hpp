#pragma once

#include <jerkpath/kinematics.hpp>

namespace jerkpath {

// Target of a state-to-state motion. The target velocity is always zero.
struct target_state {
    double position = 0.0;
    double acceleration = 0.0;
};

// Boundary tolerance on the final state of generated trajectories.
inline constexpr double k_target_epsilon = 1e-6;

// Time-optimal jerk-limited trajectory from `start` to (target.position, 0, target.acceleration).
//
// The profile is searched among the bang/hold/bang families with jerk in {j_min, 0, j_max}: up
// to seven phases, with acceleration plateaus only at the acceleration limits and a cruise only
// at a velocity limit. Throws infeasible_error when no family member reaches the target inside
// the limits (for example when the start state cannot avoid exceeding the velocity limit).
trajectory plan_to_state(const kinematic_state& start, const target_state& target, const kinematic_limits& limits);

// Time-optimal trajectory to zero velocity and zero acceleration with a free final position.
trajectory plan_brake(const kinematic_state& start, const kinematic_limits& limits);

}  // namespace jerkpath
