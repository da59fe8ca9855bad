#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <jerkpath/kinematics.hpp>
#include <jerkpath/path1d.hpp>

namespace jerkpath {

inline constexpr double k_default_time_step = 0.0025;
inline constexpr double k_progress_epsilon = 1e-9;
inline constexpr int k_stall_steps = 10000;

struct traversal_state {
    double t = 0.0;
    kinematic_state state;
    std::size_t section_index = 0;
    double s = 0.0;
    bool finished = false;
};

struct step_bounds {
    double s_lower = 0.0;
    double s_upper = 0.0;
    kinematic_state lower_state;
    kinematic_state upper_state;
    // The upper trajectory reaches the next waypoint inside the step. The step then follows it
    // to the waypoint regardless of the mapping factor and continues on the next section.
    bool arrival = false;
};

// Fastest valid trajectory from the current state to the end of the current section, targeting
// a_max there. Falls back to the state-dependent a_min target and then to braking.
trajectory upper_trajectory(const traversal_state& ts, const path1d& path, const kinematic_limits& limits);

// Slowest valid progress: braking if that stays on the section, else the a_min waypoint target.
trajectory lower_trajectory(const traversal_state& ts, const path1d& path, const kinematic_limits& limits);

// Steps one dimension along its path. Bounds for the coming step are computed lazily and reused
// by advance().
class traverser {
   public:
    traverser(const path1d& path, const kinematic_limits& limits, double dt);

    // Resumes from an arbitrary on-path state.
    traverser(const path1d& path, const kinematic_limits& limits, double dt, const traversal_state& start);

    const traversal_state& state() const noexcept {
        return state_;
    }
    bool finished() const noexcept {
        return state_.finished;
    }
    double dt() const noexcept {
        return dt_;
    }
    const path1d& path() const noexcept {
        return *path_;
    }

    // Progress bounds of the coming step.
    const step_bounds& bounds();

    // Path lengths the lower and upper trajectories of the coming step reach after `horizon`,
    // clamped to the current section. The blended step reaches the same convex combination.
    std::pair<double, double> lookahead(double horizon);

    // Advances by one step with mapping factor m in [0, 1]. Throws stall_error when the path
    // length has not grown for k_stall_steps consecutive steps.
    void advance(double m);

    // State-continuous motion emitted so far, starting at time zero.
    const trajectory& motion() const noexcept {
        return motion_;
    }

    // Times at which each waypoint after the start was reached.
    const std::vector<double>& arrival_times() const noexcept {
        return arrival_times_;
    }

   private:
    void compute_bounds(double horizon);
    std::optional<trajectory> continuation() const;
    void commit_blend(double m, double horizon);
    void arrive(const trajectory& to_waypoint);

    const path1d* path_;
    kinematic_limits limits_;
    double dt_;
    traversal_state state_;
    trajectory motion_;
    bool bounds_valid_ = false;
    step_bounds bounds_;
    trajectory upper_;
    trajectory lower_;
    // Bounds and mapping factor of the last blended step.
    trajectory previous_lower_;
    trajectory previous_upper_;
    double previous_m_ = 0.0;
    double previous_horizon_ = 0.0;
    bool has_previous_ = false;
    double best_s_ = 0.0;
    int stalled_steps_ = 0;
    std::vector<double> arrival_times_;
};

struct step_result {
    traversal_state next;
    step_bounds bounds;
    trajectory motion;
};

// One step from `ts` with mapping factor m: s_desired = s_lower + m * (s_upper - s_lower).
step_result step(const traversal_state& ts, double m, double dt, const path1d& path, const kinematic_limits& limits);

struct step_record {
    double t;
    double m;
    double s;
    double s_lower;
    double s_upper;
    bool arrival;
};

struct mapping_run {
    trajectory motion;
    std::vector<step_record> steps;
    std::vector<double> arrival_times;
};

// Steps with m = m_schedule(t) until the final waypoint is reached at rest.
mapping_run run_with_mapping(const path1d& path, const kinematic_limits& limits, const std::function<double(double)>& m_schedule,
                             double dt = k_default_time_step);

}  // namespace jerkpath
