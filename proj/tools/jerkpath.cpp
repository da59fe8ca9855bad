#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <jerkpath/datasets.hpp>
#include <jerkpath/errors.hpp>
#include <jerkpath/io.hpp>
#include <jerkpath/multipath.hpp>
#include <jerkpath/path1d.hpp>

using namespace jerkpath;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum exit_code { ok = 0, input_error = 2, infeasible = 3, internal = 4 };

struct limits_options {
    std::string file;
    double jerk_factor = 0.0;

    // Defaults to the seven-joint limits when no file is given.
    limits_config load() const {
        limits_config l = file.empty() ? default_limits() : load_limits(file);
        if (jerk_factor > 0.0) {
            l.jerk_limit_factor = jerk_factor;
        }
        return l;
    }

    limits_config load(std::size_t dimensions) const {
        limits_config l = load();
        if (l.dimensions() != dimensions) {
            throw invalid_argument_error("limits cover " + std::to_string(l.dimensions()) + " dimensions, the path has " +
                                         std::to_string(dimensions));
        }
        return l;
    }

    void add_to(CLI::App& cmd) {
        cmd.add_option("--limits", file, "Limits JSON file (default: seven-joint arm limits)")->check(CLI::ExistingFile);
        cmd.add_option("--jerk-factor", jerk_factor, "Overrides the jerk limit factor of the limits file")->check(CLI::PositiveNumber);
    }
};

std::string pad(std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", k);
    return buf;
}

void make_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw invalid_argument_error("cannot create " + dir + ": " + ec.message());
    }
}

// One dimension of a path file as an analyzed 1-D path. A one-dimensional file takes the limits
// of joint `joint` when the limits cover more dimensions.
path1d load_dimension(const std::string& path_file, std::size_t dim, std::size_t joint, const limits_options& lo, kinematic_limits& limits) {
    const std::vector<point> samples = load_path(path_file);
    const std::size_t d = samples.front().size();
    if (dim >= d) {
        throw invalid_argument_error("--dim " + std::to_string(dim) + " is out of range for a " + std::to_string(d) + "-dimensional path");
    }
    const limits_config config = lo.load();
    const std::size_t row = d == 1 && config.dimensions() != 1 ? joint : dim;
    if (row >= config.dimensions() || (d > 1 && config.dimensions() != d)) {
        throw invalid_argument_error("limits cover " + std::to_string(config.dimensions()) + " dimensions, the path has " + std::to_string(d));
    }
    limits = config.to_limits()[row];
    std::vector<double> column;
    for (const point& p : samples) {
        column.push_back(p[dim]);
    }
    path1d path = path1d::decompose(column);
    waypoint_acc_ranges(path, limits, default_search_tol(limits));
    return path;
}

int run_parameterize(const std::string& path_file, const limits_options& lo, double dt, double du, int iters, const std::string& out) {
    multipath mp = multipath::build(load_path(path_file));
    mp.analyze(lo.load(mp.dimensions()).to_limits());
    const iterate_result result = iterate(mp, dt, du, iters);
    make_dir(out);
    save_trajectory(fs::path(out) / "trajectory.csv", sample_trajectories(result.best().motions(), dt));
    const metrics_report report = make_metrics(result);
    save_metrics(fs::path(out) / "metrics.json", report);
    std::string summary = "iteration,ok,duration_s,deviation_mean_rad,deviation_max_rad,violation_regions\n";
    for (const iteration_metrics& m : report.per_iteration) {
        char row[256];
        std::snprintf(row, sizeof row, "%zu,%d,%.12g,%.12g,%.12g,%zu\n", m.iteration, m.ok ? 1 : 0, m.duration_s, m.deviation_mean_rad,
                      m.deviation_max_rad, m.violation_regions);
        summary += row;
    }
    write_file_atomic(fs::path(out) / "iterations.csv", summary);
    std::printf("duration %.6f s, mean deviation %.6f rad, max deviation %.6f rad, best iteration %zu of %zu\n", report.duration_s,
                report.deviation_mean_rad, report.deviation_max_rad, report.best_iteration, report.per_iteration.size());
    return ok;
}

int run_traverse(const std::string& path_file, std::size_t dim, std::size_t joint, const limits_options& lo, bool zero_targets, const std::string& out, double dt) {
    kinematic_limits limits;
    const path1d path = load_dimension(path_file, dim, joint, lo, limits);
    const traversal_plan plan = zero_targets ? stop_and_go_traversal(path, limits) : time_optimal_traversal(path, limits);
    make_dir(out);
    save_trajectory(fs::path(out) / "trajectory.csv", sample_trajectories({plan.motion}, dt));
    json summary;
    summary["duration_s"] = plan.motion.duration();
    summary["waypoint_times_s"] = plan.waypoint_times;
    summary["reduced_sections"] = plan.reduced_sections;
    write_file_atomic(fs::path(out) / "traversal.json", summary.dump(2) + "\n");
    std::printf("duration %.6f s over %zu sections\n", plan.motion.duration(), path.sections().size());
    return ok;
}

int run_feasible_acc(const std::string& path_file, std::size_t dim, std::size_t joint, const limits_options& lo) {
    kinematic_limits limits;
    const path1d path = load_dimension(path_file, dim, joint, lo, limits);
    std::printf("waypoint,kind,position,a_in_max,a_out_max,a_min,a_max\n");
    for (std::size_t k = 0; k < path.waypoints().size(); ++k) {
        const waypoint1d& wp = path.waypoints()[k];
        std::printf("%zu,%s,%.12g,%.12g,%.12g,%.12g,%.12g\n", k, to_string(wp.kind), wp.position, wp.acc.a_in_max, wp.acc.a_out_max, wp.acc.a_min,
                    wp.acc.a_max);
    }
    return ok;
}

int run_gen_dataset(const std::string& kind, std::uint64_t seed, std::size_t count, const std::string& out, const random_walk_config& walk) {
    make_dir(out);
    save_limits(fs::path(out) / "limits.json", default_limits());
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t s = seed + k;
        if (kind == "random-walk") {
            save_path(fs::path(out) / ("walk_" + pad(k) + ".json"), gen_random_walk(s, 7, walk));
            continue;
        }
        const std::size_t n = random_waypoint_count(s);
        for (std::size_t i = 0; i < k_joint_position_range.size(); ++i) {
            std::vector<point> samples;
            for (const double x : gen_random_1d(s * 7 + i, n, k_joint_position_range[i])) {
                samples.push_back({x});
            }
            save_path(fs::path(out) / ("random1d_joint" + std::to_string(i) + "_" + pad(k) + ".json"), samples);
        }
    }
    std::printf("wrote %zu %s paths to %s\n", count, kind.c_str(), out.c_str());
    return ok;
}

int run_evaluate(const std::string& path_file, const std::string& trajectory_file) {
    const multipath mp = multipath::build(load_path(path_file));
    const trajectory_table table = load_trajectory(trajectory_file);
    if (table.dimensions() != mp.dimensions()) {
        throw invalid_argument_error("trajectory has " + std::to_string(table.dimensions()) + " dimensions, the path has " +
                                     std::to_string(mp.dimensions()));
    }
    const deviation_stats dev = path_deviation(mp, table.p);
    json out;
    out["duration_s"] = table.t.back();
    out["deviation_mean_rad"] = dev.mean;
    out["deviation_max_rad"] = dev.max;
    std::cout << out.dump(2) << "\n";
    return ok;
}

int run_plot_data(const std::string& trajectory_file, const std::string& out) {
    const trajectory_table table = load_trajectory(trajectory_file);
    const std::size_t d = table.dimensions();
    json root;
    root["t"] = table.t;
    const auto columns = [&](const std::vector<std::vector<double>>& rows) {
        json series = json::array();
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<double> col;
            for (const auto& row : rows) {
                col.push_back(row[i]);
            }
            series.push_back(col);
        }
        return series;
    };
    root["position"] = columns(table.p);
    root["velocity"] = columns(table.v);
    root["acceleration"] = columns(table.a);
    root["jerk"] = columns(table.j);
    std::vector<double> arc{0.0};
    for (std::size_t k = 1; k < table.p.size(); ++k) {
        double sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sq += (table.p[k][i] - table.p[k - 1][i]) * (table.p[k][i] - table.p[k - 1][i]);
        }
        arc.push_back(arc.back() + std::sqrt(sq));
    }
    root["arc_length"] = arc;
    write_file_atomic(out, root.dump() + "\n");
    return ok;
}

int fail(const char* category, const std::string& detail, int code) {
    std::cerr << "error[" << category << "]: " << detail << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jerk-limited time parameterization of joint paths"};
    app.require_subcommand(1);

    std::string path_file, trajectory_file, out;
    limits_options lo;
    double dt = k_default_time_step;
    double du = k_default_band;
    int iters = k_default_iterations;
    std::size_t dim = 0;
    std::size_t joint = 0;
    bool zero_targets = false;
    std::string kind = "random-walk";
    std::uint64_t seed = 0;
    std::size_t count = 20;
    random_walk_config walk;

    CLI::App* parameterize = app.add_subcommand("parameterize", "Track all dimensions of a path and write the best iteration");
    parameterize->add_option("--path", path_file, "Path JSON file")->required()->check(CLI::ExistingFile);
    lo.add_to(*parameterize);
    parameterize->add_option("--dt", dt, "Time step, s")->check(CLI::PositiveNumber);
    parameterize->add_option("--du", du, "Band half-width around the reference, rad")->check(CLI::NonNegativeNumber);
    parameterize->add_option("--iters", iters, "Number of iterations")->check(CLI::Range(1, 100000));
    parameterize->add_option("--out", out, "Output directory")->required();

    CLI::App* traverse = app.add_subcommand("traverse-1d", "Time-optimized traversal of one dimension");
    traverse->add_option("--path", path_file, "Path JSON file")->required()->check(CLI::ExistingFile);
    traverse->add_option("--dim", dim, "Dimension index")->required();
    traverse->add_option("--joint", joint, "Limits row used for a one-dimensional path file");
    lo.add_to(*traverse);
    traverse->add_option("--dt", dt, "Sampling period of the written trajectory, s")->check(CLI::PositiveNumber);
    traverse->add_flag("--zero-targets", zero_targets, "Stop at every waypoint instead of using a_max targets");
    traverse->add_option("--out", out, "Output directory")->required();

    CLI::App* feasible = app.add_subcommand("feasible-acc", "Print the waypoint acceleration ranges of one dimension");
    feasible->add_option("--path", path_file, "Path JSON file")->required()->check(CLI::ExistingFile);
    feasible->add_option("--dim", dim, "Dimension index")->required();
    feasible->add_option("--joint", joint, "Limits row used for a one-dimensional path file");
    lo.add_to(*feasible);

    CLI::App* gen = app.add_subcommand("gen-dataset", "Generate random paths");
    gen->add_option("--kind", kind, "Dataset kind")->check(CLI::IsMember({"random-1d", "random-walk"}));
    gen->add_option("--seed", seed, "Seed of the first path; path k uses seed + k");
    gen->add_option("--count", count, "Number of paths")->check(CLI::PositiveNumber);
    gen->add_option("--duration", walk.duration, "Random-walk duration, s")->check(CLI::PositiveNumber);
    gen->add_option("--accel-scale", walk.accel_scale, "Random-walk acceleration bound, rad/s^2")->check(CLI::NonNegativeNumber);
    gen->add_option("--out", out, "Output directory")->required();

    CLI::App* evaluate = app.add_subcommand("evaluate", "Recompute the path deviation of a trajectory file");
    evaluate->add_option("--path", path_file, "Path JSON file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--trajectory", trajectory_file, "Trajectory CSV file")->required()->check(CLI::ExistingFile);

    CLI::App* plot = app.add_subcommand("plot-data", "Write per-quantity time series of a trajectory as JSON");
    plot->add_option("--trajectory", trajectory_file, "Trajectory CSV file")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", out, "Output JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("input", e.what(), input_error);
    }

    try {
        if (parameterize->parsed()) {
            return run_parameterize(path_file, lo, dt, du, iters, out);
        }
        if (traverse->parsed()) {
            return run_traverse(path_file, dim, joint, lo, zero_targets, out, dt);
        }
        if (feasible->parsed()) {
            return run_feasible_acc(path_file, dim, joint, lo);
        }
        if (gen->parsed()) {
            return run_gen_dataset(kind, seed, count, out, walk);
        }
        if (evaluate->parsed()) {
            return run_evaluate(path_file, trajectory_file);
        }
        if (plot->parsed()) {
            return run_plot_data(trajectory_file, out);
        }
    } catch (const invalid_argument_error& e) {
        return fail("input", e.what(), input_error);
    } catch (const infeasible_error& e) {
        return fail("infeasible", e.what(), infeasible);
    } catch (const internal_error& e) {
        return fail("internal", e.what(), internal);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), internal);
    }
    return fail("internal", "no subcommand ran", internal);
}
