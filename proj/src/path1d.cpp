#include <jerkpath/path1d.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <jerkpath/errors.hpp>

namespace jerkpath {

const char* to_string(waypoint_kind kind) noexcept {
    switch (kind) {
        case waypoint_kind::start:
            return "start";
        case waypoint_kind::local_min:
            return "local_min";
        case waypoint_kind::local_max:
            return "local_max";
        case waypoint_kind::end:
            return "end";
    }
    return "unknown";
}

path1d path1d::decompose(std::span<const double> samples) {
    if (samples.size() < 2) {
        throw invalid_argument_error("path needs at least 2 samples");
    }
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!std::isfinite(samples[k])) {
            throw invalid_argument_error("path sample " + std::to_string(k) + " is not finite");
        }
    }

    // Plateaus collapse onto their first sample.
    std::vector<std::size_t> kept{0};
    for (std::size_t k = 1; k < samples.size(); ++k) {
        if (std::abs(samples[k] - samples[kept.back()]) > k_position_epsilon) {
            kept.push_back(k);
        }
    }
    if (kept.size() < 2) {
        throw degenerate_path_error("all path samples are equal");
    }

    std::vector<waypoint1d> wps;
    wps.push_back({samples[kept.front()], waypoint_kind::start, kept.front(), {}});
    for (std::size_t k = 1; k + 1 < kept.size(); ++k) {
        const double before = samples[kept[k]] - samples[kept[k - 1]];
        const double after = samples[kept[k + 1]] - samples[kept[k]];
        if ((before > 0.0) != (after > 0.0)) {
            wps.push_back({samples[kept[k]], before > 0.0 ? waypoint_kind::local_max : waypoint_kind::local_min, kept[k], {}});
        }
    }
    wps.push_back({samples[kept.back()], waypoint_kind::end, kept.back(), {}});

    // Merge the shortest too-short section into its neighbors until none is left.
    while (wps.size() > 2) {
        std::size_t shortest = 0;
        double shortest_len = std::abs(wps[1].position - wps[0].position);
        for (std::size_t k = 1; k + 1 < wps.size(); ++k) {
            const double len = std::abs(wps[k + 1].position - wps[k].position);
            if (len < shortest_len) {
                shortest = k;
                shortest_len = len;
            }
        }
        if (shortest_len >= k_section_epsilon) {
            break;
        }
        if (shortest == 0) {
            wps.erase(wps.begin() + 1);
        } else if (shortest + 2 == wps.size()) {
            wps.erase(wps.begin() + static_cast<std::ptrdiff_t>(shortest));
        } else {
            wps.erase(wps.begin() + static_cast<std::ptrdiff_t>(shortest), wps.begin() + static_cast<std::ptrdiff_t>(shortest) + 2);
        }
    }

    path1d path;
    path.waypoints_ = std::move(wps);
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < path.waypoints_.size(); ++k) {
        const double delta = path.waypoints_[k + 1].position - path.waypoints_[k].position;
        section sec;
        sec.index = k;
        sec.from_waypoint = k;
        sec.to_waypoint = k + 1;
        sec.direction = delta > 0.0 ? 1 : -1;
        sec.start_s = s;
        s += std::abs(delta);
        sec.end_s = s;
        path.sections_.push_back(sec);
    }
    path.total_s_ = s;
    return path;
}

path1d path1d::stationary(double position) {
    path1d path;
    path.waypoints_.push_back({position, waypoint_kind::start, 0, {}});
    return path;
}

double path1d::s_of_p(double position, std::size_t section_index) const {
    if (sections_.empty()) {
        return 0.0;
    }
    if (section_index >= sections_.size()) {
        throw invalid_argument_error("s_of_p: section index out of range");
    }
    const section& sec = sections_[section_index];
    const double p_from = from(sec).position;
    const double p_to = to(sec).position;
    if (position < std::min(p_from, p_to) - k_position_epsilon || position > std::max(p_from, p_to) + k_position_epsilon) {
        throw invalid_argument_error("s_of_p: position " + std::to_string(position) + " outside section " + std::to_string(section_index));
    }
    return std::clamp(sec.start_s + sec.direction * (position - p_from), sec.start_s, sec.end_s);
}

path_point path1d::p_of_s(double s) const {
    if (!(s >= -k_position_epsilon && s <= total_s_ + k_position_epsilon)) {
        throw invalid_argument_error("p_of_s: path length " + std::to_string(s) + " outside [0, total_s]");
    }
    if (sections_.empty()) {
        return {waypoints_.front().position, 0};
    }
    s = std::clamp(s, 0.0, total_s_);
    const auto it = std::lower_bound(sections_.begin(), sections_.end(), s, [](const section& sec, double value) { return sec.end_s < value; });
    const section& sec = it == sections_.end() ? sections_.back() : *it;
    return {from(sec).position + sec.direction * (s - sec.start_s), sec.index};
}

std::size_t path1d::section_of_sample(std::size_t sample_index) const {
    if (sections_.empty()) {
        return 0;
    }
    const auto it = std::lower_bound(sections_.begin(), sections_.end(), sample_index,
                                     [this](const section& sec, std::size_t idx) { return to(sec).sample_index < idx; });
    return it == sections_.end() ? sections_.size() - 1 : it->index;
}

std::vector<double> sample_path_lengths(const path1d& path, std::span<const double> samples) {
    std::vector<double> s(samples.size(), 0.0);
    if (path.is_stationary()) {
        return s;
    }
    double running = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const section& sec = path.sections()[path.section_of_sample(k)];
        const double value = sec.start_s + sec.direction * (samples[k] - path.from(sec).position);
        running = std::max(running, std::clamp(value, sec.start_s, sec.end_s));
        s[k] = running;
    }
    return s;
}

namespace {

bool plan_is_valid(const kinematic_state& start, const target_state& target, const kinematic_limits& limits, direction_constraint dir) {
    try {
        return validate(plan_to_state(start, target, limits), limits, dir).valid;
    } catch (const infeasible_error&) {
        return false;
    }
}

// Largest magnitude in [0, limit] accepted by `valid`, assuming acceptance below a threshold.
// The returned value has always been tested.
double largest_valid(const std::function<bool(double)>& valid, double limit, double tol, std::vector<search_probe>* trace) {
    const auto probe = [&](double magnitude) {
        const bool ok = valid(magnitude);
        if (trace != nullptr) {
            trace->push_back({magnitude, ok});
        }
        return ok;
    };
    if (probe(limit)) {
        return limit;
    }
    double lo = 0.0;
    double hi = limit;
    bool lo_tested = false;
    for (int it = 0; it < k_search_max_iterations && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid)) {
            lo = mid;
            lo_tested = true;
        } else {
            hi = mid;
        }
    }
    if (!lo_tested && !probe(0.0)) {
        throw internal_error("zero acceleration is not valid on a section from rest");
    }
    return lo;
}

double input_limit(const section& sec, const kinematic_limits& limits) {
    return sec.direction > 0 ? limits.a_max : -limits.a_min;
}

double output_limit(const section& sec, const kinematic_limits& limits) {
    return sec.direction > 0 ? -limits.a_min : limits.a_max;
}

const section& checked_section(const path1d& path, std::size_t section_index) {
    if (section_index >= path.sections().size()) {
        throw invalid_argument_error("section index " + std::to_string(section_index) + " out of range");
    }
    return path.sections()[section_index];
}

}  // namespace

double default_search_tol(const kinematic_limits& limits) {
    return k_search_relative_tol * std::min({limits.a_max, -limits.a_min});
}

double max_input_acc(const path1d& path, std::size_t section_index, const kinematic_limits& limits, double tol,
                     std::vector<search_probe>* trace) {
    const section& sec = checked_section(path, section_index);
    const double p_from = path.from(sec).position;
    const double p_to = path.to(sec).position;
    const double d = sec.direction;
    const auto valid = [&](double a) { return plan_is_valid({p_from, 0.0, d * a}, {p_to, 0.0}, limits, sec.constraint()); };
    return d * largest_valid(valid, input_limit(sec, limits), tol, trace);
}

double max_output_acc(const path1d& path, std::size_t section_index, const kinematic_limits& limits, double tol,
                      std::vector<search_probe>* trace) {
    const section& sec = checked_section(path, section_index);
    const double p_from = path.from(sec).position;
    const double p_to = path.to(sec).position;
    const double d = sec.direction;
    const auto valid = [&](double a) { return plan_is_valid({p_from, 0.0, 0.0}, {p_to, -d * a}, limits, sec.constraint()); };
    return -d * largest_valid(valid, output_limit(sec, limits), tol, trace);
}

void waypoint_acc_ranges(path1d& path, const kinematic_limits& limits, double tol) {
    limits.check();
    auto& secs = path.sections();
    auto& wps = path.waypoints();
    for (auto& sec : secs) {
        sec.a_in_max = max_input_acc(path, sec.index, limits, tol);
        sec.a_out_max = max_output_acc(path, sec.index, limits, tol);
    }
    for (std::size_t k = 0; k < wps.size(); ++k) {
        acc_range range;
        if (k < secs.size()) {
            range.a_in_max = secs[k].a_in_max;
        }
        if (k > 0) {
            range.a_out_max = secs[k - 1].a_out_max;
        }
        if (k > 0 && k + 1 < wps.size()) {
            const double sign = wps[k].kind == waypoint_kind::local_min ? 1.0 : -1.0;
            range.a_max = sign * std::min(std::abs(range.a_in_max), std::abs(range.a_out_max));
        }
        wps[k].acc = range;
    }
}

double min_target_acc(const kinematic_state& state, const path1d& path, std::size_t section_index, const kinematic_limits& limits,
                      double tol) {
    const section& sec = checked_section(path, section_index);
    const waypoint1d& target = path.to(sec);
    const double d = sec.direction;
    const auto valid = [&](double a) { return plan_is_valid(state, {target.position, -d * a}, limits, sec.constraint()); };
    if (valid(0.0)) {
        return 0.0;
    }
    double hi = std::abs(target.acc.a_max);
    if (hi == 0.0 || !valid(hi)) {
        throw infeasible_error("no target acceleration at waypoint " + std::to_string(sec.to_waypoint) + " is reachable on the section");
    }
    double lo = 0.0;
    for (int it = 0; it < k_search_max_iterations && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (valid(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return -d * hi;
}

bool check_combined_feasibility(const path1d& path, std::size_t section_index, double alpha, double beta, const kinematic_limits& limits) {
    const section& sec = checked_section(path, section_index);
    return plan_is_valid({path.from(sec).position, 0.0, alpha * sec.a_in_max}, {path.to(sec).position, beta * sec.a_out_max}, limits,
                         sec.constraint());
}

namespace {

traversal_plan chain(const path1d& path, const kinematic_limits& limits, bool use_a_max) {
    traversal_plan plan;
    kinematic_state state{path.waypoints().front().position, 0.0, 0.0};
    plan.motion = trajectory(state);
    plan.waypoint_times.push_back(0.0);
    for (const section& sec : path.sections()) {
        const waypoint1d& to = path.to(sec);
        const double target_acc = use_a_max ? to.acc.a_max : 0.0;
        trajectory piece;
        bool ok = false;
        try {
            piece = plan_to_state(state, {to.position, target_acc}, limits);
            ok = validate(piece, limits, sec.constraint()).valid;
        } catch (const infeasible_error&) {
        }
        if (!ok) {
            // Scale the target acceleration down until the section is valid again.
            const double sign = target_acc < 0.0 ? -1.0 : 1.0;
            const auto valid = [&](double a) { return plan_is_valid(state, {to.position, sign * a}, limits, sec.constraint()); };
            const double magnitude = largest_valid(valid, std::abs(target_acc), default_search_tol(limits), nullptr);
            piece = plan_to_state(state, {to.position, sign * magnitude}, limits);
            plan.reduced_sections.push_back(sec.index);
        }
        plan.motion.append(piece);
        plan.waypoint_times.push_back(plan.motion.duration());
        state = plan.motion.end_state();
    }
    return plan;
}

}  // namespace

traversal_plan time_optimal_traversal(const path1d& path, const kinematic_limits& limits) {
    return chain(path, limits, true);
}

traversal_plan stop_and_go_traversal(const path1d& path, const kinematic_limits& limits) {
    return chain(path, limits, false);
}

double plan_path_length(const path1d& path, const traversal_plan& plan, double t) {
    if (path.is_stationary()) {
        return 0.0;
    }
    const auto it = std::upper_bound(plan.waypoint_times.begin(), plan.waypoint_times.end(), t);
    const auto idx = static_cast<std::size_t>(std::distance(plan.waypoint_times.begin(), it));
    if (idx >= plan.waypoint_times.size()) {
        return path.total_s();
    }
    const std::size_t sec = std::min(idx == 0 ? 0 : idx - 1, path.sections().size() - 1);
    const section& s = path.sections()[sec];
    const double position = plan.motion.sample(t).position;
    const double value = s.start_s + s.direction * (position - path.from(s).position);
    return std::clamp(value, s.start_s, s.end_s);
}

}  // namespace jerkpath
