#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <jerkpath/datasets.hpp>
#include <jerkpath/errors.hpp>
#include <jerkpath/multipath.hpp>

namespace jerkpath {

// Malformed file content. The message names the source and the offending row or field.
class parse_error : public invalid_argument_error {
   public:
    using invalid_argument_error::invalid_argument_error;
};

std::string read_file(const std::filesystem::path& file);

// Writes to a temporary sibling and renames it over `file`.
void write_file_atomic(const std::filesystem::path& file, const std::string& content);

// Path files: {"dimensions": D, "waypoints": [[D values], ...]} in rad.
std::vector<point> parse_path(const std::string& text, const std::string& source = "path");
std::string format_path(const std::vector<point>& samples);
std::vector<point> load_path(const std::filesystem::path& file);
void save_path(const std::filesystem::path& file, const std::vector<point>& samples);

// Limits files: {"v_max": [...], "a_max": [...], "j_max": [...], "jerk_limit_factor": f}.
// The factor is optional and defaults to 1.
limits_config parse_limits(const std::string& text, const std::string& source = "limits");
std::string format_limits(const limits_config& limits);
limits_config load_limits(const std::filesystem::path& file);
void save_limits(const std::filesystem::path& file, const limits_config& limits);

// Joint trajectories sampled on a time grid. Rows index time, columns index dimensions.
struct trajectory_table {
    std::vector<double> t;
    std::vector<std::vector<double>> p;
    std::vector<std::vector<double>> v;
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> j;

    std::size_t dimensions() const noexcept {
        return p.empty() ? 0 : p.front().size();
    }
    friend bool operator==(const trajectory_table&, const trajectory_table&) = default;
};

// Samples at k * dt up to the longest duration, with a final row at that duration.
trajectory_table sample_trajectories(const std::vector<trajectory>& motions, double dt);

// CSV with header t,p_0..p_{D-1},v_0..,a_0..,j_0.. and 12 significant digits.
std::string format_trajectory_csv(const trajectory_table& table);
trajectory_table parse_trajectory_csv(const std::string& text, const std::string& source = "trajectory");
trajectory_table load_trajectory(const std::filesystem::path& file);
void save_trajectory(const std::filesystem::path& file, const trajectory_table& table);

struct iteration_metrics {
    std::size_t iteration = 0;
    bool ok = false;
    std::string error;
    double duration_s = 0.0;
    double deviation_mean_rad = 0.0;
    double deviation_max_rad = 0.0;
    std::size_t violation_regions = 0;

    friend bool operator==(const iteration_metrics&, const iteration_metrics&) = default;
};

struct metrics_report {
    double duration_s = 0.0;
    double deviation_mean_rad = 0.0;
    double deviation_max_rad = 0.0;
    // One-based.
    std::size_t best_iteration = 0;
    std::size_t slowest_dimension = 0;
    double slowest_duration_s = 0.0;
    std::vector<iteration_metrics> per_iteration;

    friend bool operator==(const metrics_report&, const metrics_report&) = default;
};

metrics_report make_metrics(const iterate_result& result);
std::string format_metrics(const metrics_report& report);
metrics_report parse_metrics(const std::string& text, const std::string& source = "metrics");
metrics_report load_metrics(const std::filesystem::path& file);
void save_metrics(const std::filesystem::path& file, const metrics_report& report);

}  // namespace jerkpath
