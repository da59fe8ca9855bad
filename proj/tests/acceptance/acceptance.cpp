// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <jerkpath/datasets.hpp>
#include <jerkpath/errors.hpp>
#include <jerkpath/io.hpp>
#include <jerkpath/multipath.hpp>
#include <jerkpath/otg.hpp>
#include <jerkpath/path1d.hpp>
#include <jerkpath/traversal.hpp>

using namespace jerkpath;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

constexpr double k_dt = 0.0025;
constexpr double k_du = 0.01;
constexpr double k_margin = 1e-8;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Largest excess over the limits of a trajectory, and of velocity against `direction`.
struct limit_audit {
    double worst_limit = 0.0;
    double worst_direction = 0.0;
    std::size_t motions = 0;

    void add(const trajectory& traj, const kinematic_limits& l) {
        ++motions;
        for (const jerk_segment& seg : traj.segments()) {
            if (seg.duration > 0.0) {
                worst_limit = std::max({worst_limit, seg.jerk - l.j_max, l.j_min - seg.jerk});
            }
        }
        const trajectory_extrema ex = extrema(traj);
        worst_limit = std::max({worst_limit, ex.acceleration.max - l.a_max, l.a_min - ex.acceleration.min, ex.velocity.max - l.v_max,
                                l.v_min - ex.velocity.min});
    }

    // `arrivals` holds the time each waypoint after the start was reached.
    void add_on_path(const trajectory& traj, const kinematic_limits& l, const path1d& path, const std::vector<double>& arrivals) {
        add(traj, l);
        if (path.is_stationary()) {
            return;
        }
        if (arrivals.size() != path.sections().size()) {
            worst_direction = std::max(worst_direction, 1.0);
            return;
        }
        double t0 = 0.0;
        for (std::size_t k = 0; k < arrivals.size(); ++k) {
            const trajectory piece = traj.slice(t0, arrivals[k]);
            const trajectory_extrema ex = extrema(piece);
            const double against = path.sections()[k].direction > 0 ? -ex.velocity.min : ex.velocity.max;
            worst_direction = std::max(worst_direction, against);
            t0 = arrivals[k];
        }
    }

    bool ok() const {
        return worst_limit <= k_margin && worst_direction <= k_margin;
    }
};

limit_audit end_to_end;

// Start states that can still be brought to rest inside the velocity limits.
kinematic_state random_safe_state(std::mt19937_64& rng, const kinematic_limits& l) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const kinematic_state s{0.0, l.v_min + (l.v_max - l.v_min) * unit(rng), l.a_min + (l.a_max - l.a_min) * unit(rng)};
        const double v_natural = s.acceleration >= 0.0 ? s.velocity + s.acceleration * s.acceleration / (2.0 * -l.j_min)
                                                       : s.velocity - s.acceleration * s.acceleration / (2.0 * l.j_max);
        if (v_natural <= l.v_max && v_natural >= l.v_min) {
            return s;
        }
    }
}

// Seconds per solve, the fastest of three repetitions.
double time_solve(const std::function<void()>& solve) {
    double best = 1e9;
    for (int r = 0; r < 3; ++r) {
        const auto t0 = clock_type::now();
        solve();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

double slowest_solve = 0.0;

verdict analytic_optimality() {
    verdict v{true, ""};
    // Jerk-limited only: T = 4 (d / (2 j))^(1/3).
    const auto jerk_only = kinematic_limits::symmetric(1e3, 1e3, 2.0);
    const double expected_jerk_only = 4.0 * std::cbrt(4.0 / (2.0 * 2.0));
    const double t1 = plan_to_state({0.0, 0.0, 0.0}, {4.0, 0.0}, jerk_only).duration();
    // Velocity-saturated: T = d / v + v / a + a / j.
    const auto saturated = kinematic_limits::symmetric(2.0, 2.0, 2.0);
    const double expected_saturated = 16.0 / 2.0 + 2.0 / 2.0 + 2.0 / 2.0;
    const double t2 = plan_to_state({0.0, 0.0, 0.0}, {16.0, 0.0}, saturated).duration();
    const double e1 = std::abs(t1 - expected_jerk_only);
    const double e2 = std::abs(t2 - expected_saturated);
    v.pass = e1 <= 1e-6 && e2 <= 1e-6 && std::abs(expected_jerk_only - 4.0) < 1e-12 && std::abs(expected_saturated - 10.0) < 1e-12;
    for (int k = 0; k < 100; ++k) {
        slowest_solve = std::max(slowest_solve, time_solve([&] { plan_to_state({0.0, 0.0, 0.0}, {4.0, 0.0}, jerk_only); }));
        slowest_solve = std::max(slowest_solve, time_solve([&] { plan_to_state({0.0, 0.0, 0.0}, {16.0, 0.0}, saturated); }));
    }
    v.detail = fmt("T = %.9f s (error %.1e), T = %.9f s (error %.1e)", t1, e1, t2, e2);
    return v;
}

verdict random_problems(bool& timing_ok) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    limit_audit audit;
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto limits = kinematic_limits::symmetric(0.5 + 4.0 * unit(rng), 0.5 + 8.0 * unit(rng), 1.0 + 50.0 * unit(rng));
        const kinematic_state start = random_safe_state(rng, limits);
        target_state target{-5.0 + 10.0 * unit(rng), limits.a_min + (limits.a_max - limits.a_min) * unit(rng)};
        // Arriving at rest with acceleration af needs |af|^2 / (2 j) of velocity headroom.
        const double reach = std::sqrt(2.0 * limits.j_max * limits.v_max);
        target.acceleration = std::clamp(target.acceleration, -reach, reach);
        try {
            trajectory traj;
            slowest_solve = std::max(slowest_solve, time_solve([&] { traj = plan_to_state(start, target, limits); }));
            audit.add(traj, limits);
            const auto end = traj.end_state();
            if (std::abs(end.position - target.position) > k_target_epsilon || std::abs(end.velocity) > k_target_epsilon ||
                std::abs(end.acceleration - target.acceleration) > k_target_epsilon) {
                ++failures;
            }
        } catch (const infeasible_error& e) {
            ++failures;
            std::printf("  [2] problem %d infeasible: %s\n", i, e.what());
        }
    }
    timing_ok = slowest_solve < 1e-3;
    return {failures == 0 && audit.ok(),
            fmt("%d failures, worst limit excess %.2e", failures, audit.worst_limit)};
}

// A random two-section path: a section of length L1 followed by a reversal of length L2.
struct random_section {
    path1d path;
    kinematic_limits limits;
};

std::vector<random_section> random_sections(int count) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<kinematic_limits> joints = default_limits().to_limits();
    std::vector<random_section> out;
    for (int k = 0; k < count; ++k) {
        const kinematic_limits& limits = joints[static_cast<std::size_t>(k) % joints.size()];
        const double l1 = std::pow(10.0, -3.0 + 3.0 * unit(rng));
        const double l2 = std::pow(10.0, -3.0 + 3.0 * unit(rng));
        const double d = unit(rng) < 0.5 ? -1.0 : 1.0;
        const std::vector<double> samples{0.0, d * l1, d * (l1 - l2)};
        path1d path = path1d::decompose(samples);
        waypoint_acc_ranges(path, limits, default_search_tol(limits));
        out.push_back({std::move(path), limits});
    }
    return out;
}

bool plan_valid(const kinematic_state& s, const target_state& t, const kinematic_limits& l, direction_constraint d) {
    try {
        return validate(plan_to_state(s, t, l), l, d).valid;
    } catch (const infeasible_error&) {
        return false;
    }
}

// Grid scan of a predicate over [0, limit] that is expected to switch once, from `before` to
// `!before`, at index `boundary` (the first grid point with the other value; 512 if none).
struct scan {
    std::vector<bool> values;
    std::size_t boundary = 0;
    double cell = 0.0;
    // Grid points disagreeing with a single switch more than two cells from the boundary.
    int far_mismatches = 0;
    int transitions = 0;
};

scan grid_scan(const std::function<bool(double)>& pred, double limit, bool before) {
    constexpr std::size_t n = 512;
    scan s;
    s.cell = limit / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        s.values.push_back(pred(s.cell * static_cast<double>(i)));
    }
    s.boundary = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (s.values[i] != before) {
            s.boundary = i;
            break;
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        s.transitions += s.values[i] != s.values[i - 1] ? 1 : 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool expected = i < s.boundary ? before : !before;
        const double distance = std::abs(static_cast<double>(i) - static_cast<double>(s.boundary));
        if (s.values[i] != expected && distance > 2.0) {
            ++s.far_mismatches;
        }
    }
    return s;
}

// The search result must lie within tol of the grid cell holding the switch.
bool matches_scan(double result, const scan& s, double tol) {
    const double hi = std::min(static_cast<double>(s.boundary), 511.0) * s.cell;
    const double lo = s.boundary == 0 ? 0.0 : (static_cast<double>(s.boundary) - 1.0) * s.cell;
    return result >= lo - tol && result <= hi + tol;
}

verdict binary_searches(const std::vector<random_section>& sections) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int mismatches = 0;
    int counterexamples = 0;
    int multi_transition = 0;
    int nontrivial_min = 0;
    for (std::size_t k = 0; k < sections.size(); ++k) {
        const path1d& path = sections[k].path;
        const kinematic_limits& l = sections[k].limits;
        const section& sec = path.sections()[0];
        const double d = sec.direction;
        const double p0 = path.from(sec).position;
        const double p1 = path.to(sec).position;
        const double tol = default_search_tol(l);
        const double in_limit = d > 0 ? l.a_max : -l.a_min;
        const double out_limit = d > 0 ? -l.a_min : l.a_max;

        const scan in = grid_scan([&](double a) { return plan_valid({p0, 0.0, d * a}, {p1, 0.0}, l, sec.constraint()); }, in_limit, true);
        const scan out = grid_scan([&](double a) { return plan_valid({p0, 0.0, 0.0}, {p1, -d * a}, l, sec.constraint()); }, out_limit, true);
        const double in_found = std::abs(max_input_acc(path, 0, l, tol));
        const double out_found = std::abs(max_output_acc(path, 0, l, tol));

        // A state on the way to the waypoint, taken from the time-optimal traversal.
        const traversal_plan plan = time_optimal_traversal(path, l);
        const kinematic_state state = plan.motion.sample((0.05 + 0.9 * unit(rng)) * plan.waypoint_times[1]);
        const double hi = std::abs(path.to(sec).acc.a_max);
        const scan mn = grid_scan([&](double a) { return plan_valid(state, {p1, -d * a}, l, sec.constraint()); }, hi, false);
        double min_found = -1.0;
        try {
            min_found = std::abs(min_target_acc(state, path, 0, l, tol));
        } catch (const infeasible_error&) {
        }
        nontrivial_min += mn.boundary > 0 ? 1 : 0;

        const bool ok_in = matches_scan(in_found, in, tol);
        const bool ok_out = matches_scan(out_found, out, tol);
        const bool ok_min = min_found >= 0.0 && matches_scan(min_found, mn, tol);
        for (const auto* s : {&in, &out, &mn}) {
            counterexamples += s->far_mismatches > 0 ? 1 : 0;
            multi_transition += s->transitions > 1 ? 1 : 0;
        }
        if (!ok_in || !ok_out || !ok_min) {
            ++mismatches;
            std::printf("  [3] section %zu (L = %.4g rad): in %.6g vs cell %zu, out %.6g vs cell %zu, min %.6g vs cell %zu\n", k,
                        sec.length(), in_found, in.boundary, out_found, out.boundary, min_found, mn.boundary);
        }
    }
    return {mismatches == 0 && counterexamples == 0,
            fmt("%zu sections, %d off-grid results, %d threshold counterexamples, %d scans with a near-boundary flicker, "
                "%d nonzero minimum targets",
                sections.size(), mismatches, counterexamples, multi_transition, nontrivial_min)};
}

verdict combined_feasibility(const std::vector<random_section>& sections) {
    int exceptions = 0;
    int far_exceptions = 0;
    int checks = 0;
    for (std::size_t k = 0; k < 50 && k < sections.size(); ++k) {
        for (int ia = 0; ia <= 10; ++ia) {
            for (int ib = 0; ib <= 10; ++ib) {
                const double alpha = 0.1 * ia;
                const double beta = 0.1 * ib;
                ++checks;
                if (!check_combined_feasibility(sections[k].path, 0, alpha, beta, sections[k].limits)) {
                    ++exceptions;
                    const bool near_corner = ia >= 8 && ib >= 8;
                    far_exceptions += near_corner ? 0 : 1;
                    std::printf("  [4] section %zu: infeasible at alpha = %.1f, beta = %.1f%s\n", k, alpha, beta, near_corner ? "" : " (far from (1, 1))");
                }
            }
        }
    }
    const bool pass = far_exceptions == 0 && exceptions * 100 <= checks;
    return {pass, fmt("%d of %d grid points infeasible, %d away from (1, 1)", exceptions, checks, far_exceptions)};
}

struct joint_path {
    std::size_t joint;
    std::vector<double> samples;
};

std::vector<joint_path> random_1d_paths() {
    std::vector<joint_path> out;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t n = random_waypoint_count(s);
        for (std::size_t i = 0; i < k_joint_position_range.size(); ++i) {
            out.push_back({i, gen_random_1d(s * 7 + i, n, k_joint_position_range[i])});
        }
    }
    return out;
}

path1d analyzed(const std::vector<double>& samples, const kinematic_limits& l) {
    path1d path = path1d::decompose(samples);
    waypoint_acc_ranges(path, l, default_search_tol(l));
    return path;
}

verdict one_dimensional_speedup(const std::vector<joint_path>& paths) {
    const std::array<double, 4> factors{1.0, 2.0, 3.0, 40.0};
    std::array<double, 4> mean{};
    int not_faster = 0;
    int not_strict = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        limits_config config = default_limits();
        config.jerk_limit_factor = factors[f];
        const std::vector<kinematic_limits> joints = config.to_limits();
        for (const joint_path& jp : paths) {
            const kinematic_limits& l = joints[jp.joint];
            const path1d path = analyzed(jp.samples, l);
            const traversal_plan fast = time_optimal_traversal(path, l);
            end_to_end.add_on_path(fast.motion, l, path, {fast.waypoint_times.begin() + 1, fast.waypoint_times.end()});
            mean[f] += fast.motion.duration() / static_cast<double>(paths.size());
            if (f == 0) {
                const traversal_plan slow = stop_and_go_traversal(path, l);
                end_to_end.add_on_path(slow.motion, l, path, {slow.waypoint_times.begin() + 1, slow.waypoint_times.end()});
                const double tf = fast.motion.duration();
                const double ts = slow.motion.duration();
                not_faster += tf > ts ? 1 : 0;
                not_strict += path.waypoints().size() > 2 && !(tf < ts) ? 1 : 0;
            }
        }
    }
    const double drop12 = mean[0] - mean[1];
    const double drop23 = mean[1] - mean[2];
    const bool trend = mean[1] <= mean[0] && mean[2] <= mean[1] && mean[3] <= mean[2] && drop12 > drop23;
    return {not_faster == 0 && not_strict == 0 && trend,
            fmt("%zu paths, %d slower and %d not strictly faster than zero targets; mean duration %.4f / %.4f / %.4f / %.4f s for "
                "jerk factors 1 / 2 / 3 / 40",
                paths.size(), not_faster, not_strict, mean[0], mean[1], mean[2], mean[3])};
}

verdict mapping_factor(const std::vector<joint_path>& paths) {
    const std::vector<kinematic_limits> joints = default_limits().to_limits();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_step = 0.0;
    std::size_t probes = 0;
    double worst_duration = 0.0;
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const kinematic_limits& l = joints[paths[k].joint];
        const path1d path = analyzed(paths[k].samples, l);

        const mapping_run run = run_with_mapping(path, l, [](double) { return 1.0; }, k_dt);
        end_to_end.add_on_path(run.motion, l, path, run.arrival_times);
        const double optimal = time_optimal_traversal(path, l).motion.duration();
        worst_duration = std::max(worst_duration, std::abs(run.motion.duration() - optimal));

        // Step-level check on a subset of paths, probing every few steps of a varied run.
        if (k % 7 != 0) {
            continue;
        }
        traverser tr(path, l, k_dt);
        std::size_t step_index = 0;
        while (!tr.finished()) {
            const traversal_state before = tr.state();
            const step_bounds b = tr.bounds();
            if (!b.arrival && step_index % 5 == 0) {
                for (const double m : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                    const step_result r = step(before, m, k_dt, path, l);
                    worst_step = std::max(worst_step, std::abs(r.next.s - (b.s_lower + m * (b.s_upper - b.s_lower))));
                    ++probes;
                }
            }
            tr.advance(0.5 + 0.5 * unit(rng));
            ++step_index;
        }
        end_to_end.add_on_path(tr.motion(), l, path, tr.arrival_times());
    }
    return {worst_step <= 1e-6 && worst_duration <= 2.0 * k_dt,
            fmt("%zu step probes, worst |s - s_desired| %.2e rad; %zu m = 1 runs, worst duration gap %.2e s", probes, worst_step, paths.size(),
                worst_duration)};
}

// Runs every random walk at one jerk factor and audits every generated motion.
std::vector<iterate_result> run_walks(double factor, int count) {
    std::vector<iterate_result> out;
    limits_config config = default_limits();
    config.jerk_limit_factor = factor;
    const std::vector<kinematic_limits> joints = config.to_limits();
    for (int seed = 0; seed < count; ++seed) {
        multipath mp = multipath::build(gen_random_walk(static_cast<std::uint64_t>(seed), 7));
        mp.analyze(joints);
        iterate_result r = iterate(mp, k_dt, k_du, k_default_iterations);
        for (const iteration_result& it : r.iterations) {
            if (!it.ok) {
                continue;
            }
            for (std::size_t i = 0; i < it.dims.size(); ++i) {
                end_to_end.add_on_path(it.dims[i].motion, joints[i], mp.path(i), it.dims[i].arrival_times);
            }
        }
        std::printf("  [7/8] jerk factor %.1f, walk %2d: u %.2f rad, slowest %.3f s, best iteration %2zu, duration %.3f s, "
                    "deviation %.4f rad (iteration 1: %.4f)\n",
                    factor, seed, mp.u_total(), r.slowest_duration, r.best_index + 1, r.best().duration, r.best().deviation.mean,
                    r.iterations.front().deviation.mean);
        std::fflush(stdout);
        out.push_back(std::move(r));
    }
    return out;
}

verdict multi_dimensional(const std::vector<iterate_result>& runs, double suite_seconds) {
    int below_slowest = 0;
    int worse_than_first = 0;
    int monotone = 0;
    for (const iterate_result& r : runs) {
        below_slowest += r.best().duration < r.slowest_duration - 2.0 * k_dt ? 1 : 0;
        worse_than_first += r.best().deviation.mean > r.iterations.front().deviation.mean ? 1 : 0;
        const auto& its = r.iterations;
        const bool mono = its.size() >= 3 && its[0].ok && its[1].ok && its[2].ok && its[1].deviation.mean < its[0].deviation.mean &&
                          its[2].deviation.mean < its[1].deviation.mean;
        monotone += mono ? 1 : 0;
    }
    const int n = static_cast<int>(runs.size());
    const bool pass = below_slowest == 0 && worse_than_first == 0 && monotone * 10 >= 7 * n && suite_seconds <= 900.0;
    return {pass, fmt("%d paths: %d below the slowest dimension, %d best worse than iteration 1, %d of %d monotone over 3 iterations; "
                      "suite runtime %.0f s",
                      n, below_slowest, worse_than_first, monotone, n, suite_seconds)};
}

verdict jerk_factor_trend(const std::vector<iterate_result>& base, const std::vector<std::vector<iterate_result>>& others,
                          const std::vector<double>& factors) {
    bool pass = true;
    std::string detail;
    const std::size_t n = base.size();
    for (std::size_t f = 0; f < others.size(); ++f) {
        std::size_t both = 0;
        std::size_t faster = 0;
        std::size_t closer = 0;
        double mean_duration = 0.0;
        double mean_deviation = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool d = others[f][k].best().duration <= base[k].best().duration;
            const bool e = others[f][k].best().deviation.mean <= base[k].best().deviation.mean;
            faster += d ? 1 : 0;
            closer += e ? 1 : 0;
            both += d && e ? 1 : 0;
            mean_duration += others[f][k].best().duration / static_cast<double>(n);
            mean_deviation += others[f][k].best().deviation.mean / static_cast<double>(n);
        }
        pass = pass && both * 10 >= 9 * n;
        detail += fmt("%sfactor %.1f: %zu of %zu paths not slower and not less accurate (%zu / %zu), mean %.3f s %.4f rad", f ? "; " : "",
                      factors[f], both, n, faster, closer, mean_duration, mean_deviation);
    }
    double base_duration = 0.0;
    double base_deviation = 0.0;
    for (const iterate_result& r : base) {
        base_duration += r.best().duration / static_cast<double>(n);
        base_deviation += r.best().deviation.mean / static_cast<double>(n);
    }
    detail += fmt("; factor 1: mean %.3f s %.4f rad", base_duration, base_deviation);
    return {pass, detail};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(JERKPATH_CLI) + " " + args + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

verdict determinism() {
    const fs::path root = fs::temp_directory_path() / "jerkpath_acceptance";
    fs::remove_all(root);
    int failures = 0;
    std::vector<std::string> compared;
    for (const char* run : {"a", "b"}) {
        const fs::path dir = root / run;
        failures += run_cli("gen-dataset --kind random-walk --seed 11 --count 1 --out " + (dir / "walk").string()) != 0;
        failures += run_cli("gen-dataset --kind random-1d --seed 11 --count 1 --out " + (dir / "1d").string()) != 0;
        failures += run_cli("parameterize --path " + (dir / "walk" / "walk_0000.json").string() + " --limits " +
                            (dir / "walk" / "limits.json").string() + " --out " + (dir / "out").string()) != 0;
        failures += run_cli("traverse-1d --path " + (dir / "1d" / "random1d_joint3_0000.json").string() + " --dim 0 --joint 3 --out " +
                            (dir / "tr").string()) != 0;
    }
    for (const char* file : {"walk/walk_0000.json", "walk/limits.json", "1d/random1d_joint3_0000.json", "out/trajectory.csv",
                             "out/metrics.json", "out/iterations.csv", "tr/trajectory.csv", "tr/traversal.json"}) {
        const fs::path a = root / "a" / file;
        const fs::path b = root / "b" / file;
        if (!fs::exists(a) || !fs::exists(b) || read_file(a) != read_file(b)) {
            ++failures;
            std::printf("  [9] %s differs between runs\n", file);
        }
        compared.push_back(file);
    }
    return {failures == 0, fmt("%zu files compared byte for byte, %d differences or failed runs", compared.size(), failures)};
}

}  // namespace

// With arguments, runs only the listed criteria (1 to 9).
int main(int argc, char** argv) {
    const auto t0 = clock_type::now();
    std::array<bool, 10> selected{};
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k < 1 || k > 9) {
            std::fprintf(stderr, "unknown criterion %s\n", argv[a]);
            return 2;
        }
        selected[static_cast<std::size_t>(k)] = true;
    }
    if (argc == 1) {
        selected.fill(true);
    }
    std::array<verdict, 10> v;

    verdict random{true, ""};
    if (selected[1] || selected[2]) {
        v[1] = analytic_optimality();
        bool timing_ok = false;
        random = random_problems(timing_ok);
        v[1].pass = v[1].pass && timing_ok;
        v[1].detail += fmt("; slowest solve %.1f us", slowest_solve * 1e6);
    }

    if (selected[3] || selected[4]) {
        const std::vector<random_section> sections = random_sections(100);
        v[3] = binary_searches(sections);
        v[4] = combined_feasibility(sections);
    }

    if (selected[2] || selected[5] || selected[6]) {
        const std::vector<joint_path> paths = random_1d_paths();
        v[5] = one_dimensional_speedup(paths);
        v[6] = mapping_factor(paths);
    }
    std::fflush(stdout);

    std::vector<iterate_result> base;
    if (selected[2] || selected[7] || selected[8]) {
        base = run_walks(1.0, 20);
    }
    if (selected[8]) {
        const std::vector<double> factors{1.5, 2.0, 4.0};
        std::vector<std::vector<iterate_result>> others;
        for (const double f : factors) {
            others.push_back(run_walks(f, 20));
        }
        v[8] = jerk_factor_trend(base, others, factors);
    }

    if (selected[9]) {
        v[9] = determinism();
    }

    v[2] = {random.pass && end_to_end.ok(),
            random.detail + fmt("; %zu end-to-end motions, worst limit excess %.2e, worst direction excess %.2e", end_to_end.motions,
                                end_to_end.worst_limit, end_to_end.worst_direction)};
    if (selected[7]) {
        v[7] = multi_dimensional(base, seconds_since(t0));
    }

    bool all = true;
    const std::array<const char*, 10> names{"",
                                            "analytic optimality",
                                            "constraint satisfaction",
                                            "binary-search correctness",
                                            "combined feasibility grid",
                                            "1-D speedup",
                                            "mapping-factor contract",
                                            "multi-dimensional tracking",
                                            "jerk-factor trend",
                                            "determinism"};
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!selected[k]) {
            continue;
        }
        std::printf("%s criterion %zu (%s): %s\n", v[k].pass ? "PASS" : "FAIL", k, names[k], v[k].detail.c_str());
        all = all && v[k].pass;
    }
    return all ? 0 : 1;
}
