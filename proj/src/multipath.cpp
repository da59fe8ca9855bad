#include <jerkpath/multipath.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <jerkpath/errors.hpp>

namespace jerkpath {

namespace {

double distance(const point& a, const point& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(sum);
}

point lerp(const point& a, const point& b, double w) {
    point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + w * (b[i] - a[i]);
    }
    return out;
}

// Interpolates values over a strictly increasing grid, clamping outside it.
double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double x) {
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) {
        return values.front();
    }
    if (it == grid.end()) {
        return values.back();
    }
    const auto k = static_cast<std::size_t>(it - grid.begin());
    const double w = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
    return values[k - 1] + w * (values[k] - values[k - 1]);
}

// Maps a point of the polyline `pts` with cumulative lengths `len` at arc length x.
point polyline_at(const std::vector<point>& pts, const std::vector<double>& len, double x) {
    const auto it = std::upper_bound(len.begin(), len.end(), x);
    if (it == len.begin()) {
        return pts.front();
    }
    if (it == len.end()) {
        return pts.back();
    }
    const auto k = static_cast<std::size_t>(it - len.begin());
    return lerp(pts[k - 1], pts[k], (x - len[k - 1]) / (len[k] - len[k - 1]));
}

std::size_t grid_steps(double duration, double dt) {
    return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

// The u of path length s closest to the reference value, so flat stretches read as on time.
double u_near(const multipath& mp, std::size_t i, double s, double u_ref) {
    return std::clamp(u_ref, mp.u_of_s(i, s), mp.u_of_s_latest(i, s));
}

void check_reference(const reference_profile& ref) {
    if (ref.u.empty() || !(ref.dt > 0.0) || !(ref.band >= 0.0)) {
        throw invalid_argument_error("reference profile needs samples, a positive time step and a nonnegative band");
    }
}

}  // namespace

multipath multipath::build(const std::vector<point>& samples) {
    if (samples.size() < 2) {
        throw invalid_argument_error("a path needs at least 2 samples");
    }
    const std::size_t d = samples.front().size();
    if (d == 0) {
        throw invalid_argument_error("a path needs at least one dimension");
    }
    multipath mp;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const point& p = samples[k];
        if (p.size() != d) {
            throw invalid_argument_error("sample " + std::to_string(k) + " has " + std::to_string(p.size()) + " values, expected " + std::to_string(d));
        }
        if (!std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); })) {
            throw invalid_argument_error("sample " + std::to_string(k) + " is not finite");
        }
        const bool moved = mp.samples_.empty() || [&] {
            for (std::size_t i = 0; i < d; ++i) {
                if (std::abs(p[i] - mp.samples_.back()[i]) > k_position_epsilon) {
                    return true;
                }
            }
            return false;
        }();
        if (moved) {
            mp.samples_.push_back(p);
        }
    }
    if (mp.samples_.size() < 2) {
        throw degenerate_path_error("all samples are equal");
    }

    mp.u_.push_back(0.0);
    for (std::size_t k = 1; k < mp.samples_.size(); ++k) {
        mp.u_.push_back(mp.u_.back() + distance(mp.samples_[k - 1], mp.samples_[k]));
    }

    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> column;
        for (const point& p : mp.samples_) {
            column.push_back(p[i]);
        }
        try {
            mp.paths_.push_back(path1d::decompose(column));
            mp.s_.push_back(sample_path_lengths(mp.paths_.back(), column));
        } catch (const degenerate_path_error&) {
            mp.paths_.push_back(path1d::stationary(column.front()));
            mp.s_.emplace_back(column.size(), 0.0);
        }
    }
    return mp;
}

double multipath::s_of_u(std::size_t i, double u) const {
    const double slack = 1e-9 * (1.0 + u_total());
    if (!(u >= -slack && u <= u_total() + slack)) {
        throw invalid_argument_error("u = " + std::to_string(u) + " is outside the path");
    }
    return interpolate(u_, s_.at(i), u);
}

double multipath::u_of_s(std::size_t i, double s) const {
    const std::vector<double>& table = s_.at(i);
    const double slack = 1e-9 * (1.0 + table.back());
    if (!(s >= -slack && s <= table.back() + slack)) {
        throw invalid_argument_error("s = " + std::to_string(s) + " is outside dimension " + std::to_string(i));
    }
    const auto it = std::lower_bound(table.begin(), table.end(), s);
    if (it == table.begin()) {
        return 0.0;
    }
    if (it == table.end()) {
        return u_of_s_latest(i, table.back());
    }
    const auto k = static_cast<std::size_t>(it - table.begin());
    return u_[k - 1] + (s - table[k - 1]) / (table[k] - table[k - 1]) * (u_[k] - u_[k - 1]);
}

double multipath::u_of_s_latest(std::size_t i, double s) const {
    const std::vector<double>& table = s_.at(i);
    const auto it = std::upper_bound(table.begin(), table.end(), s);
    if (it == table.end()) {
        return u_total();
    }
    if (it == table.begin()) {
        return 0.0;
    }
    const auto k = static_cast<std::size_t>(it - table.begin());
    return u_[k - 1] + (s - table[k - 1]) / (table[k] - table[k - 1]) * (u_[k] - u_[k - 1]);
}

point multipath::point_at(double u) const {
    return polyline_at(samples_, u_, u);
}

void multipath::analyze(const std::vector<kinematic_limits>& limits) {
    if (limits.size() != dimensions()) {
        throw invalid_argument_error("expected limits for " + std::to_string(dimensions()) + " dimensions, got " + std::to_string(limits.size()));
    }
    for (std::size_t i = 0; i < dimensions(); ++i) {
        limits[i].check();
        if (!paths_[i].is_stationary()) {
            waypoint_acc_ranges(paths_[i], limits[i], default_search_tol(limits[i]));
        }
    }
    limits_ = limits;
}

const std::vector<kinematic_limits>& multipath::limits() const {
    if (!analyzed()) {
        throw invalid_argument_error("multipath has not been analyzed for limits");
    }
    return limits_;
}

double reference_profile::at(double t) const {
    const double x = std::max(t, 0.0) / dt;
    const auto k = static_cast<std::size_t>(x);
    if (k + 1 >= u.size()) {
        return u.back();
    }
    const double w = x - static_cast<double>(k);
    return u[k] + w * (u[k + 1] - u[k]);
}

initial_reference_result initial_reference(const multipath& mp, double dt, double band) {
    if (!(dt > 0.0) || !(band >= 0.0)) {
        throw invalid_argument_error("time step must be positive and the band nonnegative");
    }
    initial_reference_result out;
    double slowest = -1.0;
    for (std::size_t i = 0; i < mp.dimensions(); ++i) {
        const path1d& path = mp.path(i);
        if (path.is_stationary()) {
            out.plans.push_back({trajectory({path.waypoints().front().position, 0.0, 0.0}), {0.0}, {}});
            continue;
        }
        out.plans.push_back(time_optimal_traversal(path, mp.limits()[i]));
        const double duration = out.plans.back().motion.duration();
        if (duration > slowest) {
            slowest = duration;
            out.slowest_dim = i;
        }
    }
    out.slowest_duration = slowest;

    const std::size_t i = out.slowest_dim;
    const traversal_plan& plan = out.plans[i];
    const std::size_t n = grid_steps(slowest, dt);
    out.reference.dt = dt;
    out.reference.band = band;
    double running = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = std::min(static_cast<double>(k) * dt, slowest);
        running = std::max(running, mp.u_of_s(i, plan_path_length(mp.path(i), plan, t)));
        out.reference.u.push_back(running);
    }
    // The slowest dimension may stop moving before the path ends.
    out.reference.u.back() = mp.u_total();
    return out;
}

const char* to_string(violation_kind kind) noexcept {
    return kind == violation_kind::undershoot ? "undershoot" : "overshoot";
}

tracked_dimension track_dimension(const multipath& mp, std::size_t i, const reference_profile& ref) {
    check_reference(ref);
    const path1d& path = mp.path(i);
    const double dt = ref.dt;
    tracked_dimension out;
    out.s.push_back(0.0);
    out.u.push_back(u_near(mp, i, 0.0, ref.at(0.0)));
    if (path.is_stationary()) {
        out.motion = trajectory({path.waypoints().front().position, 0.0, 0.0});
        return out;
    }

    traverser tr(path, mp.limits()[i], dt);
    std::optional<violation_region> open;
    std::size_t k = 0;
    while (!tr.finished()) {
        const double t_next = static_cast<double>(k + 1) * dt;
        const double u_target = ref.at(t_next);
        const double s_target = mp.s_of_u(i, u_target);
        const double s_band_lo = mp.s_of_u(i, std::max(0.0, u_target - ref.band));
        const double s_band_hi = mp.s_of_u(i, std::min(mp.u_total(), u_target + ref.band));

        const step_bounds& b = tr.bounds();
        std::optional<violation_kind> violated;
        double m = 1.0;
        if (b.arrival) {
            // The step follows the upper trajectory into the next section whatever m is.
        } else if (b.s_upper < s_band_lo - k_position_epsilon) {
            violated = violation_kind::undershoot;
        } else if (b.s_lower > s_band_hi + k_position_epsilon) {
            violated = violation_kind::overshoot;
            m = 0.0;
        } else if (b.s_upper > b.s_lower) {
            // Aim at the reference a short horizon ahead, which damps the response, and keep the
            // next step inside the band.
            const auto m_step = [&](double x) { return (std::clamp(x, b.s_lower, b.s_upper) - b.s_lower) / (b.s_upper - b.s_lower); };
            m = m_step(s_target);
            const auto [far_lower, far_upper] = tr.lookahead(k_lookahead_time);
            if (far_upper > far_lower) {
                const double far_target = mp.s_of_u(i, ref.at(static_cast<double>(k) * dt + k_lookahead_time));
                const double m_far = std::clamp((far_target - far_lower) / (far_upper - far_lower), 0.0, 1.0);
                m = std::clamp(m_far, m_step(s_band_lo), m_step(s_band_hi));
            }
        }

        if (open && (!violated || *violated != open->kind)) {
            open->last_step = k;
            out.violations.push_back(*open);
            open.reset();
        }
        if (violated && !open) {
            open = violation_region{*violated, k, k, 0.0};
        }

        tr.advance(m);
        ++k;
        const double s = tr.finished() ? path.total_s() : tr.state().s;
        out.s.push_back(s);
        out.u.push_back(u_near(mp, i, s, ref.at(t_next)));
    }
    if (open) {
        open->last_step = k;
        out.violations.push_back(*open);
    }
    out.motion = tr.motion();
    out.arrival_times = tr.arrival_times();
    const std::vector<double> deviation = violation_position_deviation(mp, i, out.motion, out.violations, ref);
    for (std::size_t r = 0; r < deviation.size(); ++r) {
        out.violations[r].deviation = deviation[r];
    }
    return out;
}

tracked_dimension replay_dimension(const multipath& mp, std::size_t i, const traversal_plan& plan, const reference_profile& ref) {
    check_reference(ref);
    tracked_dimension out;
    out.motion = plan.motion;
    if (!plan.waypoint_times.empty()) {
        out.arrival_times.assign(plan.waypoint_times.begin() + 1, plan.waypoint_times.end());
    }
    const std::size_t n = grid_steps(plan.motion.duration(), ref.dt);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * ref.dt;
        const double s = mp.path(i).is_stationary() ? 0.0 : plan_path_length(mp.path(i), plan, std::min(t, plan.motion.duration()));
        out.s.push_back(s);
        out.u.push_back(u_near(mp, i, s, ref.at(t)));
    }
    return out;
}

std::vector<double> violation_position_deviation(const multipath& mp, std::size_t i, const trajectory& motion,
                                                 const std::vector<violation_region>& regions, const reference_profile& ref) {
    check_reference(ref);
    const path1d& path = mp.path(i);
    const auto gap = [&](std::size_t k) {
        const double t = static_cast<double>(k) * ref.dt;
        const double p_ref = path.is_stationary() ? path.waypoints().front().position : path.p_of_s(mp.s_of_u(i, ref.at(t))).position;
        return std::abs(motion.sample(t).position - p_ref);
    };
    std::vector<double> out;
    for (const violation_region& r : regions) {
        double sum = 0.0;
        double prev = gap(r.first_step);
        for (std::size_t k = r.first_step + 1; k <= r.last_step; ++k) {
            const double cur = gap(k);
            sum += 0.5 * (prev + cur) * ref.dt;
            prev = cur;
        }
        out.push_back(sum);
    }
    return out;
}

reference_profile update_reference(const reference_profile& ref, const violation_region& region, const std::vector<double>& achieved_u) {
    check_reference(ref);
    if (achieved_u.empty() || region.first_step >= achieved_u.size()) {
        return ref;
    }
    const std::vector<double>& old = ref.u;
    const auto old_at = [&](std::size_t k) { return old[std::min(k, old.size() - 1)]; };
    const auto achieved_at = [&](std::size_t k) { return achieved_u[std::min(k, achieved_u.size() - 1)]; };
    const auto old_index = [&](double u) {
        return static_cast<std::size_t>(std::lower_bound(old.begin(), old.end(), u) - old.begin());
    };

    // Cut where the dimension is furthest behind (undershoot) or ahead (overshoot) of the old
    // timing, so its catch-up phase does not enter the reference.
    const std::size_t last = std::min(region.last_step, achieved_u.size() - 1);
    std::size_t cut = region.first_step;
    long best = 0;
    for (std::size_t k = region.first_step; k <= last; ++k) {
        const long shift = static_cast<long>(k) - static_cast<long>(old_index(achieved_u[k]));
        const bool better = region.kind == violation_kind::undershoot ? shift > best : shift < best;
        if (k == region.first_step || better) {
            best = shift;
            cut = k;
        }
    }

    const std::size_t a = region.first_step > k_update_margin_steps ? region.first_step - k_update_margin_steps : 0;
    const double margin = static_cast<double>(k_update_margin_steps);
    reference_profile out = ref;
    out.u.clear();
    for (std::size_t k = 0; k < a; ++k) {
        out.u.push_back(old_at(k));
    }
    for (std::size_t k = a; k <= cut; ++k) {
        const double w = std::min(1.0, static_cast<double>(k - a) / margin);
        out.u.push_back((1.0 - w) * old_at(k) + w * achieved_at(k));
    }
    // Continue with the old reference, shifted in time to start from the cut value. Its clock
    // speeds up from the rate achieved at the cut to full rate over the resume ramp.
    const auto old_frac = [&](double x) {
        const auto k0 = std::min(static_cast<std::size_t>(x), old.size() - 1);
        const double w = x - static_cast<double>(k0);
        return (1.0 - w) * old_at(k0) + w * old_at(k0 + 1);
    };
    const double value = out.u.back();
    const std::size_t r = std::min(old_index(value), old.size() - 1);
    double tau = static_cast<double>(r);
    if (r > 0 && old[r] > old[r - 1]) {
        tau = static_cast<double>(r - 1) + (value - old[r - 1]) / (old[r] - old[r - 1]);
    }
    const double achieved_rate = out.u.size() >= 2 ? out.u.back() - out.u[out.u.size() - 2] : 0.0;
    const double old_rate = old_frac(tau + 1.0) - old_frac(tau);
    const double rho0 = old_rate > 1e-12 ? std::clamp(achieved_rate / old_rate, 0.0, 1.0) : 1.0;
    for (std::size_t j = 1; tau < static_cast<double>(old.size() - 1); ++j) {
        tau += rho0 + (1.0 - rho0) * std::min(1.0, static_cast<double>(j) / static_cast<double>(k_resume_ramp_steps));
        out.u.push_back(old_frac(tau));
    }
    if (out.u.back() < old.back()) {
        out.u.push_back(old.back());
    }
    double running = 0.0;
    for (double& u : out.u) {
        running = std::max(running, u);
        u = running;
    }
    return out;
}

deviation_stats path_deviation(const multipath& mp, const std::vector<point>& generated) {
    if (generated.empty()) {
        throw invalid_argument_error("no generated samples");
    }
    std::vector<double> len{0.0};
    for (std::size_t k = 1; k < generated.size(); ++k) {
        if (generated[k].size() != mp.dimensions()) {
            throw invalid_argument_error("generated sample " + std::to_string(k) + " has the wrong dimension");
        }
        len.push_back(len.back() + distance(generated[k - 1], generated[k]));
    }
    // Drop repeated points so arc length is strictly increasing.
    std::vector<point> pts{generated.front()};
    std::vector<double> plen{0.0};
    for (std::size_t k = 1; k < generated.size(); ++k) {
        if (len[k] > plen.back()) {
            pts.push_back(generated[k]);
            plen.push_back(len[k]);
        }
    }

    const std::size_t n = std::max(k_min_deviation_points, generated.size());
    deviation_stats out;
    for (std::size_t j = 0; j < n; ++j) {
        const double u = plen.back() * static_cast<double>(j) / static_cast<double>(n - 1);
        const double u_ref = mp.u_total() * static_cast<double>(j) / static_cast<double>(n - 1);
        const double d = distance(polyline_at(pts, plen, u), mp.point_at(u_ref));
        out.mean += d;
        out.max = std::max(out.max, d);
    }
    out.mean /= static_cast<double>(n);
    return out;
}

deviation_stats path_deviation(const multipath& mp, const std::vector<trajectory>& motions, double dt) {
    if (motions.size() != mp.dimensions()) {
        throw invalid_argument_error("expected one trajectory per dimension");
    }
    double duration = 0.0;
    for (const trajectory& m : motions) {
        duration = std::max(duration, m.duration());
    }
    const std::size_t n = grid_steps(duration, dt);
    std::vector<point> generated;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = std::min(static_cast<double>(k) * dt, duration);
        point p;
        for (const trajectory& m : motions) {
            p.push_back(m.sample(t).position);
        }
        generated.push_back(std::move(p));
    }
    return path_deviation(mp, generated);
}

std::vector<trajectory> iteration_result::motions() const {
    std::vector<trajectory> out;
    for (const tracked_dimension& d : dims) {
        out.push_back(d.motion);
    }
    return out;
}

iterate_result iterate(const multipath& mp, double dt, double band, int n_iters) {
    if (n_iters < 1) {
        throw invalid_argument_error("at least one iteration is required");
    }
    const initial_reference_result init = initial_reference(mp, dt, band);
    iterate_result out;
    out.slowest_dim = init.slowest_dim;
    out.slowest_duration = init.slowest_duration;

    reference_profile ref = init.reference;
    for (int it = 0; it < n_iters; ++it) {
        // From the third iteration on, an unchanged reference reproduces the previous result.
        if (it >= 2 && !out.iterations.back().worst) {
            out.iterations.push_back(out.iterations.back());
            continue;
        }
        iteration_result result;
        result.reference = ref;
        try {
            for (std::size_t i = 0; i < mp.dimensions(); ++i) {
                if (it == 0 && i == init.slowest_dim) {
                    result.dims.push_back(replay_dimension(mp, i, init.plans[i], ref));
                } else {
                    result.dims.push_back(track_dimension(mp, i, ref));
                }
            }
            for (const tracked_dimension& d : result.dims) {
                result.duration = std::max(result.duration, d.motion.duration());
            }
            for (tracked_dimension& d : result.dims) {
                if (d.motion.duration() < result.duration) {
                    d.motion.append_hold(result.duration - d.motion.duration());
                }
            }
            result.deviation = path_deviation(mp, result.motions(), dt);
            for (std::size_t i = 0; i < result.dims.size(); ++i) {
                const auto& regions = result.dims[i].violations;
                for (std::size_t r = 0; r < regions.size(); ++r) {
                    if (!result.worst || regions[r].deviation > result.worst->deviation) {
                        result.worst = worst_region{i, r, regions[r].deviation};
                    }
                }
            }
            result.ok = true;
        } catch (const infeasible_error& e) {
            result = iteration_result{};
            result.reference = ref;
            result.error = e.what();
        }
        if (result.worst) {
            ref = update_reference(ref, result.dims[result.worst->dimension].violations[result.worst->region],
                                   result.dims[result.worst->dimension].u);
        }
        out.iterations.push_back(std::move(result));
    }

    bool found = false;
    for (std::size_t k = 0; k < out.iterations.size(); ++k) {
        const iteration_result& r = out.iterations[k];
        if (r.ok && (!found || r.deviation.mean < out.iterations[out.best_index].deviation.mean)) {
            out.best_index = k;
            found = true;
        }
    }
    if (!found) {
        throw infeasible_error("no iteration succeeded: " + out.iterations.front().error);
    }
    return out;
}

}  // namespace jerkpath
