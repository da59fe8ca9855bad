#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <jerkpath/kinematics.hpp>
#include <jerkpath/path1d.hpp>
#include <jerkpath/traversal.hpp>

namespace jerkpath {

inline constexpr double k_default_band = 0.01;
inline constexpr int k_default_iterations = 20;
// Steps added on each side of a region when the reference is rewritten there.
inline constexpr std::size_t k_update_margin_steps = 10;
// Steps over which the resumed reference speeds up from the achieved rate to its own rate.
inline constexpr std::size_t k_resume_ramp_steps = 40;
inline constexpr std::size_t k_min_deviation_points = 4000;
// Horizon at which tracking compares the blended bounds with the reference, s.
inline constexpr double k_lookahead_time = 0.01;

using point = std::vector<double>;

// A D-dimensional polyline with its Euclidean arc length u and the per-dimension path lengths
// s_i(u) tabulated on the same vertices.
class multipath {
   public:
    // Collapses consecutive duplicate vectors. Throws degenerate_path_error if nothing moves and
    // invalid_argument_error on ragged or non-finite input.
    static multipath build(const std::vector<point>& samples);

    std::size_t dimensions() const noexcept {
        return paths_.size();
    }
    const std::vector<point>& samples() const noexcept {
        return samples_;
    }
    const std::vector<double>& u_grid() const noexcept {
        return u_;
    }
    double u_total() const noexcept {
        return u_.back();
    }
    const path1d& path(std::size_t i) const {
        return paths_.at(i);
    }
    const std::vector<double>& s_table(std::size_t i) const {
        return s_.at(i);
    }

    double s_of_u(std::size_t i, double u) const;
    // Earliest u with the given s_i.
    double u_of_s(std::size_t i, double s) const;
    // Latest u with the given s_i.
    double u_of_s_latest(std::size_t i, double s) const;

    // Point on the polyline at arc length u.
    point point_at(double u) const;

    // Computes the waypoint acceleration ranges of every dimension. Required before planning.
    void analyze(const std::vector<kinematic_limits>& limits);
    bool analyzed() const noexcept {
        return !limits_.empty();
    }
    const std::vector<kinematic_limits>& limits() const;

   private:
    std::vector<point> samples_;
    std::vector<double> u_;
    std::vector<path1d> paths_;
    std::vector<std::vector<double>> s_;
    std::vector<kinematic_limits> limits_;
};

// u_ref sampled at k * dt, held at its last value afterwards.
struct reference_profile {
    double dt = k_default_time_step;
    double band = k_default_band;
    std::vector<double> u;

    double at(double t) const;
    double duration() const noexcept {
        return u.empty() ? 0.0 : dt * static_cast<double>(u.size() - 1);
    }
};

struct initial_reference_result {
    reference_profile reference;
    std::size_t slowest_dim = 0;
    double slowest_duration = 0.0;
    // Time-optimal traversal of every dimension; empty plans for stationary dimensions.
    std::vector<traversal_plan> plans;
};

initial_reference_result initial_reference(const multipath& mp, double dt = k_default_time_step, double band = k_default_band);

enum class violation_kind { undershoot, overshoot };

const char* to_string(violation_kind kind) noexcept;

// Consecutive steps [first_step, last_step) whose bounds could not reach the band. Step k spans
// [k * dt, (k + 1) * dt].
struct violation_region {
    violation_kind kind = violation_kind::undershoot;
    std::size_t first_step = 0;
    std::size_t last_step = 0;
    // Integrated |p_i - p_i_ref| over the region, rad * s.
    double deviation = 0.0;
};

struct tracked_dimension {
    trajectory motion;
    // Values at k * dt for k = 0..steps.
    std::vector<double> s;
    std::vector<double> u;
    std::vector<violation_region> violations;
    // Time at which each waypoint after the start was reached.
    std::vector<double> arrival_times;
};

// Follows `ref` with one dimension. Each step stays inside the band around u_ref(t + dt) when the
// bounds allow it and otherwise records a violation. Within the band, the mapping factor is the
// one whose blend meets the reference k_lookahead_time ahead. Comparisons use the dimension's own
// path length so flat stretches of s_i(u) never force motion.
tracked_dimension track_dimension(const multipath& mp, std::size_t i, const reference_profile& ref);

// Replays a precomputed plan as a tracked run on the reference grid.
tracked_dimension replay_dimension(const multipath& mp, std::size_t i, const traversal_plan& plan, const reference_profile& ref);

// Integrated |p_i(t) - p_i_ref(t)| over each region by the trapezoidal rule on the dt grid.
std::vector<double> violation_position_deviation(const multipath& mp, std::size_t i, const trajectory& motion,
                                                 const std::vector<violation_region>& regions, const reference_profile& ref);

// Rewrites the reference from `region` up to the step of largest lag (or lead) with the achieved
// u_i (values at k * dt), then resumes the old reference from the achieved value, shifted and
// stretched in time.
reference_profile update_reference(const reference_profile& ref, const violation_region& region, const std::vector<double>& achieved_u);

struct deviation_stats {
    double mean = 0.0;
    double max = 0.0;
};

// Euclidean distance between the generated joint path and the reference polyline at equal
// fractions of their arc lengths, sampled at max(k_min_deviation_points, number of dt samples)
// points.
deviation_stats path_deviation(const multipath& mp, const std::vector<trajectory>& motions, double dt = k_default_time_step);

// Same metric on an already sampled joint path.
deviation_stats path_deviation(const multipath& mp, const std::vector<point>& generated);

struct worst_region {
    std::size_t dimension = 0;
    std::size_t region = 0;
    double deviation = 0.0;
};

struct iteration_result {
    bool ok = false;
    std::string error;
    reference_profile reference;
    std::vector<tracked_dimension> dims;
    deviation_stats deviation;
    double duration = 0.0;
    std::optional<worst_region> worst;

    std::vector<trajectory> motions() const;
};

struct iterate_result {
    std::vector<iteration_result> iterations;
    std::size_t best_index = 0;
    std::size_t slowest_dim = 0;
    double slowest_duration = 0.0;

    const iteration_result& best() const {
        return iterations.at(best_index);
    }
};

// Tracks every dimension against a reference that is repaired at its worst region after each
// iteration. Iteration 1 replays the slowest dimension's optimal traversal. Throws
// infeasible_error if no iteration succeeds.
iterate_result iterate(const multipath& mp, double dt = k_default_time_step, double band = k_default_band, int n_iters = k_default_iterations);

}  // namespace jerkpath
