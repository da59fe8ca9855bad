#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <jerkpath/kinematics.hpp>
#include <jerkpath/otg.hpp>

namespace jerkpath {

// Positions closer than this are the same position.
inline constexpr double k_position_epsilon = 1e-9;
// Sections shorter than this are merged into a neighbor.
inline constexpr double k_section_epsilon = 1e-6;
// Relative bracket width at which the acceleration searches stop.
inline constexpr double k_search_relative_tol = 1e-4;
inline constexpr int k_search_max_iterations = 25;

enum class waypoint_kind { start, local_min, local_max, end };

const char* to_string(waypoint_kind kind) noexcept;

// Signed target-acceleration bounds at a waypoint. a_in_max belongs to the section that starts
// at the waypoint, a_out_max to the section that ends there.
struct acc_range {
    double a_in_max = 0.0;
    double a_out_max = 0.0;
    double a_max = 0.0;
    double a_min = 0.0;
};

struct waypoint1d {
    double position = 0.0;
    waypoint_kind kind = waypoint_kind::start;
    std::size_t sample_index = 0;
    acc_range acc;
};

struct section {
    std::size_t index = 0;
    std::size_t from_waypoint = 0;
    std::size_t to_waypoint = 0;
    int direction = 1;
    double start_s = 0.0;
    double end_s = 0.0;
    // Signed search results; zero until waypoint_acc_ranges runs.
    double a_in_max = 0.0;
    double a_out_max = 0.0;

    double length() const noexcept {
        return end_s - start_s;
    }
    direction_constraint constraint() const noexcept {
        return direction > 0 ? direction_constraint::nonneg : direction_constraint::nonpos;
    }
};

struct path_point {
    double position = 0.0;
    std::size_t section_index = 0;
};

// A one-dimensional path split into strictly monotone sections between its extrema.
class path1d {
   public:
    // Throws degenerate_path_error if all samples are equal within k_position_epsilon.
    static path1d decompose(std::span<const double> samples);

    // A path that never moves. It has one waypoint and no sections.
    static path1d stationary(double position);

    const std::vector<waypoint1d>& waypoints() const noexcept {
        return waypoints_;
    }
    const std::vector<section>& sections() const noexcept {
        return sections_;
    }
    std::vector<waypoint1d>& waypoints() noexcept {
        return waypoints_;
    }
    std::vector<section>& sections() noexcept {
        return sections_;
    }
    double total_s() const noexcept {
        return total_s_;
    }
    bool is_stationary() const noexcept {
        return sections_.empty();
    }

    const waypoint1d& from(const section& sec) const {
        return waypoints_[sec.from_waypoint];
    }
    const waypoint1d& to(const section& sec) const {
        return waypoints_[sec.to_waypoint];
    }

    // Path length of a position on the given section. Throws invalid_argument_error if the
    // position lies outside the section by more than k_position_epsilon.
    double s_of_p(double position, std::size_t section_index) const;

    // Position and section at path length s. Boundary values belong to the earlier section.
    path_point p_of_s(double s) const;

    // Section holding input sample `sample_index` (the earlier one at a shared waypoint).
    std::size_t section_of_sample(std::size_t sample_index) const;

   private:
    std::vector<waypoint1d> waypoints_;
    std::vector<section> sections_;
    double total_s_ = 0.0;
};

// Non-decreasing path length of every input sample of `samples`, the sequence `path` was
// decomposed from. Small back-steps inside merged sections are flattened.
std::vector<double> sample_path_lengths(const path1d& path, std::span<const double> samples);

// One probe of a threshold search, recorded in order.
struct search_probe {
    double magnitude;
    bool valid;
};

// Largest acceleration (signed along the section) one can start the section with, from rest,
// and still reach the far waypoint at rest with zero acceleration on a monotone trajectory.
double max_input_acc(const path1d& path, std::size_t section_index, const kinematic_limits& limits, double tol,
                     std::vector<search_probe>* trace = nullptr);

// Largest acceleration (signed against the section direction) one can arrive at the far
// waypoint with, starting from rest at the near waypoint.
double max_output_acc(const path1d& path, std::size_t section_index, const kinematic_limits& limits, double tol,
                      std::vector<search_probe>* trace = nullptr);

// Default search tolerance for the given limits.
double default_search_tol(const kinematic_limits& limits);

// Populates acc ranges of all waypoints and the per-section maxima. Start and end waypoints get
// zero ranges, and a_min is the value for a start at rest on the incoming section, which is 0.
void waypoint_acc_ranges(path1d& path, const kinematic_limits& limits, double tol);

// Smallest-magnitude target acceleration at the end of `section_index` reachable from `state`
// on a monotone trajectory, searched in [0, |a_max|] of that waypoint. Throws infeasible_error if
// none exists.
double min_target_acc(const kinematic_state& state, const path1d& path, std::size_t section_index, const kinematic_limits& limits,
                      double tol);

// Plans from (p_from, 0, alpha * a_in_max) to (p_to, beta * a_out_max) and validates it.
bool check_combined_feasibility(const path1d& path, std::size_t section_index, double alpha, double beta, const kinematic_limits& limits);

struct traversal_plan {
    trajectory motion;
    // Time at which each waypoint is reached; the first entry is zero.
    std::vector<double> waypoint_times;
    // Sections where the a_max chain was invalid and a reduced target acceleration was used.
    std::vector<std::size_t> reduced_sections;
};

// Waypoint-to-waypoint chain with the a_max target at every intermediate waypoint.
traversal_plan time_optimal_traversal(const path1d& path, const kinematic_limits& limits);

// Same chain with zero target accelerations (full stop at every waypoint).
traversal_plan stop_and_go_traversal(const path1d& path, const kinematic_limits& limits);

// Path length reached by `plan` at time t.
double plan_path_length(const path1d& path, const traversal_plan& plan, double t);

}  // namespace jerkpath
