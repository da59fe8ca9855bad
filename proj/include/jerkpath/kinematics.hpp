#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace jerkpath {

// Tolerances shared by every module. Units follow the quantity they guard.
inline constexpr double k_limit_epsilon = 1e-8;
inline constexpr double k_time_epsilon = 1e-9;
inline constexpr double k_continuity_epsilon = 1e-9;

struct kinematic_state {
    double position = 0.0;
    double velocity = 0.0;
    double acceleration = 0.0;

    bool is_finite() const noexcept;
    friend bool operator==(const kinematic_state&, const kinematic_state&) = default;
};

// "(p, v, a)" at full precision, for error messages.
std::string to_string(const kinematic_state& state);

// Box limits on velocity, acceleration and jerk. Every interval must strictly contain zero.
struct kinematic_limits {
    double v_min = -1.0;
    double v_max = 1.0;
    double a_min = -1.0;
    double a_max = 1.0;
    double j_min = -1.0;
    double j_max = 1.0;

    static kinematic_limits symmetric(double v, double a, double j);

    // Throws invalid_argument_error unless v_min < 0 < v_max, and likewise for a and j.
    void check() const;

    // Limits of the problem reflected through p -> -p.
    kinematic_limits mirrored() const noexcept;

    friend bool operator==(const kinematic_limits&, const kinematic_limits&) = default;
};

// Closed-form constant-jerk update over dt.
kinematic_state integrate_segment(const kinematic_state& start, double jerk, double dt);

struct jerk_segment {
    double duration = 0.0;
    double jerk = 0.0;
    kinematic_state start;

    kinematic_state end() const;
    kinematic_state at(double t) const;
};

enum class direction_constraint { any, nonneg, nonpos };

struct quantity_range {
    double min = 0.0;
    double max = 0.0;
};

struct trajectory_extrema {
    quantity_range position;
    quantity_range velocity;
    quantity_range acceleration;
};

enum class violated_quantity { none, velocity, acceleration, jerk, direction };

const char* to_string(violated_quantity q) noexcept;

struct validity_report {
    bool valid = true;
    violated_quantity violated = violated_quantity::none;
    // Amount by which the worst offending quantity exceeds its bound, in that quantity's units.
    double worst_margin = 0.0;
};

// Piecewise-constant-jerk trajectory of a single dimension. Segments are stored with their start
// states, which makes sampling O(log n) and keeps the object immutable once built.
class trajectory {
   public:
    trajectory() = default;

    // A trajectory that rests at `state` (no segments). Sampling returns `state` for any t >= 0.
    explicit trajectory(const kinematic_state& state);

    // Takes already-integrated segments. Throws internal_error if consecutive segments are not
    // state-continuous within k_continuity_epsilon.
    explicit trajectory(std::vector<jerk_segment> segments);

    // Integrates (jerk, duration) phases from `start`. Zero-duration phases are dropped.
    static trajectory from_phases(const kinematic_state& start, std::span<const double> jerks, std::span<const double> durations);

    const std::vector<jerk_segment>& segments() const noexcept {
        return segments_;
    }
    double duration() const noexcept {
        return duration_;
    }
    const kinematic_state& start_state() const noexcept {
        return start_;
    }
    kinematic_state end_state() const;

    // State at time t. Times past the end return the final state. Throws for t < 0.
    kinematic_state sample(double t) const;

    // Jerk of the segment active at t (right-continuous); zero past the end.
    double jerk_at(double t) const;

    // Sub-trajectory over [t0, t1], re-based to start at time zero.
    trajectory slice(double t0, double t1) const;

    // Appends `other`, which must start where this trajectory ends.
    void append(const trajectory& other);

    // Appends a zero-jerk hold of the given duration from the current end state.
    void append_hold(double duration);

   private:
    kinematic_state start_;
    std::vector<jerk_segment> segments_;
    std::vector<double> offsets_;  // start time of each segment
    double duration_ = 0.0;
};

// Exact per-segment extrema of position, velocity and acceleration.
trajectory_extrema extrema(const trajectory& traj);

validity_report validate(const trajectory& traj, const kinematic_limits& limits, direction_constraint direction = direction_constraint::any);

}  // namespace jerkpath
