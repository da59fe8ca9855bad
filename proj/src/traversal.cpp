#include <jerkpath/traversal.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <jerkpath/errors.hpp>

namespace jerkpath {

namespace {

const section& current_section(const traversal_state& ts, const path1d& path) {
    if (path.is_stationary() || ts.section_index >= path.sections().size()) {
        throw invalid_argument_error("traversal state has no current section");
    }
    return path.sections()[ts.section_index];
}

std::optional<trajectory> valid_plan(const kinematic_state& start, const target_state& target, const kinematic_limits& limits,
                                     direction_constraint dir) {
    try {
        trajectory traj = plan_to_state(start, target, limits);
        if (validate(traj, limits, dir).valid) {
            return traj;
        }
    } catch (const infeasible_error&) {
    }
    return std::nullopt;
}

std::optional<trajectory> min_target_plan(const traversal_state& ts, const path1d& path, const kinematic_limits& limits) {
    const section& sec = current_section(ts, path);
    try {
        const double a = min_target_acc(ts.state, path, sec.index, limits, default_search_tol(limits));
        return valid_plan(ts.state, {path.to(sec).position, a}, limits, sec.constraint());
    } catch (const infeasible_error&) {
        return std::nullopt;
    }
}

// Braking trajectory if it is valid and stops before the end of the current section.
std::optional<trajectory> on_path_brake(const traversal_state& ts, const path1d& path, const kinematic_limits& limits) {
    const section& sec = current_section(ts, path);
    trajectory brake = plan_brake(ts.state, limits);
    const double overshoot = sec.direction * (brake.end_state().position - path.to(sec).position);
    if (overshoot <= k_position_epsilon && validate(brake, limits, sec.constraint()).valid) {
        return brake;
    }
    return std::nullopt;
}

struct lower_plan {
    trajectory motion;
    bool to_waypoint;
};

lower_plan plan_lower(const traversal_state& ts, const path1d& path, const kinematic_limits& limits) {
    if (auto brake = on_path_brake(ts, path, limits)) {
        return {std::move(*brake), false};
    }
    if (auto plan = min_target_plan(ts, path, limits)) {
        return {std::move(*plan), true};
    }
    throw infeasible_error("no lower trajectory stays on section " + std::to_string(ts.section_index) + " from " + to_string(ts.state));
}

// Pointwise combination (1 - w) * a + w * b over [0, horizon]. Both inputs are extended by
// zero-jerk holds where they end early.
trajectory blend(const trajectory& a, const trajectory& b, double w, double horizon) {
    std::vector<double> cuts{0.0, horizon};
    for (const trajectory* traj : {&a, &b}) {
        double offset = 0.0;
        for (const auto& seg : traj->segments()) {
            offset += seg.duration;
            if (offset > 0.0 && offset < horizon) {
                cuts.push_back(offset);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto jerk_at = [](const trajectory& traj, double t) {
        double offset = 0.0;
        for (const auto& seg : traj.segments()) {
            if (t < offset + seg.duration) {
                return seg.jerk;
            }
            offset += seg.duration;
        }
        return 0.0;
    };
    const auto mix = [w](double x, double y) { return (1.0 - w) * x + w * y; };

    const kinematic_state sa = a.start_state();
    const kinematic_state sb = b.start_state();
    kinematic_state state{mix(sa.position, sb.position), mix(sa.velocity, sb.velocity), mix(sa.acceleration, sb.acceleration)};
    std::vector<jerk_segment> segments;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        const double jerk = mix(jerk_at(a, mid), jerk_at(b, mid));
        const double duration = cuts[k + 1] - cuts[k];
        segments.push_back({duration, jerk, state});
        state = integrate_segment(state, jerk, duration);
    }
    return trajectory(std::move(segments));
}

}  // namespace

trajectory upper_trajectory(const traversal_state& ts, const path1d& path, const kinematic_limits& limits) {
    const section& sec = current_section(ts, path);
    const waypoint1d& wp = path.to(sec);
    if (auto plan = valid_plan(ts.state, {wp.position, wp.acc.a_max}, limits, sec.constraint())) {
        return std::move(*plan);
    }
    if (auto plan = min_target_plan(ts, path, limits)) {
        return std::move(*plan);
    }
    if (auto brake = on_path_brake(ts, path, limits)) {
        return std::move(*brake);
    }
    throw infeasible_error("no upper trajectory stays on section " + std::to_string(ts.section_index) + " from " + to_string(ts.state));
}

trajectory lower_trajectory(const traversal_state& ts, const path1d& path, const kinematic_limits& limits) {
    return plan_lower(ts, path, limits).motion;
}

traverser::traverser(const path1d& path, const kinematic_limits& limits, double dt) : path_(&path), limits_(limits), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw invalid_argument_error("time step must be positive");
    }
    limits.check();
    state_.state = {path.waypoints().front().position, 0.0, 0.0};
    state_.finished = path.is_stationary();
    motion_ = trajectory(state_.state);
}

traverser::traverser(const path1d& path, const kinematic_limits& limits, double dt, const traversal_state& start)
    : traverser(path, limits, dt) {
    state_ = start;
    motion_ = trajectory(start.state);
    best_s_ = start.s;
}

// Continuation of the previous blended step, used when fresh planning finds no valid trajectory
// from the reached state. Valid only if it respects the limits and ends at rest, or at the
// waypoint with zero velocity.
std::optional<trajectory> traverser::continuation() const {
    if (!has_previous_) {
        return std::nullopt;
    }
    const double total = std::max(previous_lower_.duration(), previous_upper_.duration());
    if (total <= previous_horizon_ + k_time_epsilon) {
        return std::nullopt;
    }
    const section& sec = path_->sections()[state_.section_index];
    const trajectory tail = blend(previous_lower_, previous_upper_, previous_m_, total).slice(previous_horizon_, total);
    const kinematic_state end = tail.end_state();
    const bool at_rest = std::abs(end.velocity) <= k_target_epsilon && std::abs(end.acceleration) <= k_target_epsilon;
    const bool at_waypoint = std::abs(end.velocity) <= k_target_epsilon && std::abs(end.position - path_->to(sec).position) <= k_target_epsilon;
    if ((!at_rest && !at_waypoint) || !validate(tail, limits_, sec.constraint()).valid) {
        return std::nullopt;
    }
    return tail;
}

void traverser::compute_bounds(double horizon) {
    const section& sec = path_->sections()[state_.section_index];
    bool lower_to_waypoint = false;
    try {
        upper_ = upper_trajectory(state_, *path_, limits_);
    } catch (const infeasible_error&) {
        auto tail = continuation();
        if (!tail) {
            throw;
        }
        upper_ = std::move(*tail);
    }
    try {
        lower_plan lower = plan_lower(state_, *path_, limits_);
        lower_ = std::move(lower.motion);
        lower_to_waypoint = lower.to_waypoint;
    } catch (const infeasible_error&) {
        auto tail = continuation();
        if (!tail) {
            throw;
        }
        lower_ = std::move(*tail);
        lower_to_waypoint = std::abs(lower_.end_state().position - path_->to(sec).position) <= k_target_epsilon;
    }

    // Braking fallbacks end at rest short of the waypoint and never count as arrivals.
    const double wp = path_->to(sec).position;
    bounds_.arrival = upper_.duration() <= horizon + k_time_epsilon && std::abs(upper_.end_state().position - wp) <= k_target_epsilon;
    if (!bounds_.arrival && lower_to_waypoint && lower_.duration() <= horizon + k_time_epsilon) {
        // The lower plan reaches the waypoint first; it becomes the committed arrival.
        upper_ = lower_;
        bounds_.arrival = true;
    }
    bounds_.upper_state = upper_.sample(std::min(horizon, upper_.duration()));
    bounds_.lower_state = lower_.sample(horizon);
    bounds_.s_upper = bounds_.arrival ? sec.end_s : path_->s_of_p(bounds_.upper_state.position, sec.index);
    bounds_.s_lower = path_->s_of_p(bounds_.lower_state.position, sec.index);
}

const step_bounds& traverser::bounds() {
    if (!bounds_valid_) {
        if (state_.finished) {
            bounds_ = {state_.s, state_.s, state_.state, state_.state, false};
        } else {
            compute_bounds(dt_);
        }
        bounds_valid_ = true;
    }
    return bounds_;
}

std::pair<double, double> traverser::lookahead(double horizon) {
    if (bounds().arrival || state_.finished) {
        return {bounds_.s_lower, bounds_.s_upper};
    }
    const auto s_at = [&](const trajectory& x) {
        return path_->s_of_p(x.sample(std::min(horizon, x.duration())).position, state_.section_index);
    };
    return {s_at(lower_), s_at(upper_)};
}

void traverser::arrive(const trajectory& to_waypoint) {
    motion_.append(to_waypoint);
    state_.t += to_waypoint.duration();
    state_.state = to_waypoint.end_state();
    arrival_times_.push_back(state_.t);
    has_previous_ = false;
    const section& sec = path_->sections()[state_.section_index];
    if (sec.index + 1 == path_->sections().size()) {
        state_.finished = true;
        state_.s = path_->total_s();
    } else {
        ++state_.section_index;
        state_.s = path_->s_of_p(state_.state.position, state_.section_index);
    }
}

// Blends the current bounds over the rest of the step and plans the next step from the reached
// state. A blend of two valid trajectories can end in a state with no valid continuation, so
// mapping factors closer to 0 or 1 are tried until planning succeeds.
void traverser::commit_blend(double m, double horizon) {
    const traversal_state start = state_;
    const trajectory lower = lower_;
    const trajectory upper = upper_;
    std::vector<double> candidates{m};
    for (const double f : {0.1, 0.3, 1.0}) {
        candidates.push_back(m + (1.0 - m) * f);
        candidates.push_back(m - m * f);
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const trajectory piece = blend(lower, upper, candidates[c], horizon);
        state_ = start;
        state_.t += horizon;
        state_.state = piece.end_state();
        state_.s = path_->s_of_p(state_.state.position, state_.section_index);
        previous_lower_ = lower;
        previous_upper_ = upper;
        previous_m_ = candidates[c];
        previous_horizon_ = horizon;
        has_previous_ = true;
        try {
            compute_bounds(dt_);
            bounds_valid_ = true;
        } catch (const infeasible_error&) {
            if (c + 1 < candidates.size()) {
                continue;
            }
            bounds_valid_ = false;
        }
        motion_.append(piece);
        return;
    }
}

void traverser::advance(double m) {
    m = std::clamp(m, 0.0, 1.0);
    const double t_end = state_.t + dt_;
    bounds();
    bool first = true;
    bounds_valid_ = false;
    while (!state_.finished) {
        const double horizon = t_end - state_.t;
        if (horizon <= k_time_epsilon) {
            break;
        }
        if (!first) {
            compute_bounds(horizon);
        }
        first = false;
        if (bounds_.arrival) {
            arrive(upper_);
            continue;
        }
        commit_blend(m, horizon);
        break;
    }
    if (state_.finished && t_end - state_.t > 0.0) {
        motion_.append_hold(t_end - state_.t);
    }
    state_.t = t_end;

    if (state_.finished || state_.s > best_s_ + k_progress_epsilon) {
        best_s_ = std::max(best_s_, state_.s);
        stalled_steps_ = 0;
    } else if (++stalled_steps_ >= k_stall_steps) {
        throw stall_error("no progress along the path for " + std::to_string(k_stall_steps) + " steps", state_.s);
    }
}

step_result step(const traversal_state& ts, double m, double dt, const path1d& path, const kinematic_limits& limits) {
    traverser tr(path, limits, dt, ts);
    step_result result;
    result.bounds = tr.bounds();
    tr.advance(m);
    result.next = tr.state();
    result.motion = tr.motion();
    return result;
}

mapping_run run_with_mapping(const path1d& path, const kinematic_limits& limits, const std::function<double(double)>& m_schedule, double dt) {
    traverser tr(path, limits, dt);
    mapping_run run;
    while (!tr.finished()) {
        const double m = m_schedule(tr.state().t);
        const step_bounds b = tr.bounds();
        tr.advance(m);
        run.steps.push_back({tr.state().t, m, tr.state().s, b.s_lower, b.s_upper, b.arrival});
    }
    run.motion = tr.motion();
    run.arrival_times = tr.arrival_times();
    return run;
}

}  // namespace jerkpath
