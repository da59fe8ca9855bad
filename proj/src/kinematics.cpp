#include <jerkpath/kinematics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <jerkpath/errors.hpp>

namespace jerkpath {

bool kinematic_state::is_finite() const noexcept {
    return std::isfinite(position) && std::isfinite(velocity) && std::isfinite(acceleration);
}

kinematic_limits kinematic_limits::symmetric(double v, double a, double j) {
    kinematic_limits limits{-v, v, -a, a, -j, j};
    limits.check();
    return limits;
}

void kinematic_limits::check() const {
    const auto straddles = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo < 0.0 && 0.0 < hi; };
    if (!straddles(v_min, v_max)) {
        throw invalid_argument_error("velocity limits must satisfy v_min < 0 < v_max");
    }
    if (!straddles(a_min, a_max)) {
        throw invalid_argument_error("acceleration limits must satisfy a_min < 0 < a_max");
    }
    if (!straddles(j_min, j_max)) {
        throw invalid_argument_error("jerk limits must satisfy j_min < 0 < j_max");
    }
}

kinematic_limits kinematic_limits::mirrored() const noexcept {
    return {-v_max, -v_min, -a_max, -a_min, -j_max, -j_min};
}

kinematic_state integrate_segment(const kinematic_state& start, double jerk, double dt) {
    if (!start.is_finite() || !std::isfinite(jerk) || !std::isfinite(dt)) {
        throw invalid_argument_error("integrate_segment: non-finite input");
    }
    if (dt < 0.0) {
        throw invalid_argument_error("integrate_segment: negative duration");
    }
    const double dt2 = dt * dt;
    return {start.position + start.velocity * dt + start.acceleration * dt2 / 2.0 + jerk * dt2 * dt / 6.0,
            start.velocity + start.acceleration * dt + jerk * dt2 / 2.0, start.acceleration + jerk * dt};
}

kinematic_state jerk_segment::end() const {
    return integrate_segment(start, jerk, duration);
}

kinematic_state jerk_segment::at(double t) const {
    return integrate_segment(start, jerk, std::clamp(t, 0.0, duration));
}

std::string to_string(const kinematic_state& state) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g, %.17g, %.17g)", state.position, state.velocity, state.acceleration);
    return buf;
}

const char* to_string(violated_quantity q) noexcept {
    switch (q) {
        case violated_quantity::none:
            return "none";
        case violated_quantity::velocity:
            return "velocity";
        case violated_quantity::acceleration:
            return "acceleration";
        case violated_quantity::jerk:
            return "jerk";
        case violated_quantity::direction:
            return "direction";
    }
    return "unknown";
}

namespace {

bool states_match(const kinematic_state& a, const kinematic_state& b, double tol) {
    return std::abs(a.position - b.position) <= tol && std::abs(a.velocity - b.velocity) <= tol &&
           std::abs(a.acceleration - b.acceleration) <= tol;
}

}  // namespace

trajectory::trajectory(const kinematic_state& state) : start_(state) {}

trajectory::trajectory(std::vector<jerk_segment> segments) {
    if (segments.empty()) {
        return;
    }
    start_ = segments.front().start;
    offsets_.reserve(segments.size());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (segments[k].duration < 0.0 || !std::isfinite(segments[k].duration)) {
            throw internal_error("trajectory: segment with negative or non-finite duration");
        }
        if (k > 0 && !states_match(segments[k - 1].end(), segments[k].start, k_continuity_epsilon)) {
            throw internal_error("trajectory: segments are not state-continuous at index " + std::to_string(k));
        }
        offsets_.push_back(duration_);
        duration_ += segments[k].duration;
    }
    segments_ = std::move(segments);
}

trajectory trajectory::from_phases(const kinematic_state& start, std::span<const double> jerks, std::span<const double> durations) {
    if (jerks.size() != durations.size()) {
        throw invalid_argument_error("from_phases: jerk and duration counts differ");
    }
    trajectory result(start);
    kinematic_state state = start;
    for (std::size_t k = 0; k < jerks.size(); ++k) {
        if (durations[k] <= 0.0) {
            continue;
        }
        result.offsets_.push_back(result.duration_);
        result.segments_.push_back({durations[k], jerks[k], state});
        result.duration_ += durations[k];
        state = integrate_segment(state, jerks[k], durations[k]);
    }
    return result;
}

kinematic_state trajectory::end_state() const {
    return segments_.empty() ? start_ : segments_.back().end();
}

kinematic_state trajectory::sample(double t) const {
    if (!(t >= 0.0)) {
        throw invalid_argument_error("trajectory::sample: time must be non-negative");
    }
    if (segments_.empty()) {
        return start_;
    }
    if (t >= duration_) {
        return end_state();
    }
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), t);
    const auto k = static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
    return segments_[k].at(t - offsets_[k]);
}

double trajectory::jerk_at(double t) const {
    if (!(t >= 0.0)) {
        throw invalid_argument_error("trajectory::jerk_at: time must be non-negative");
    }
    if (segments_.empty() || t >= duration_) {
        return 0.0;
    }
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), t);
    return segments_[static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1].jerk;
}

trajectory trajectory::slice(double t0, double t1) const {
    t0 = std::clamp(t0, 0.0, duration_);
    t1 = std::clamp(t1, t0, duration_);
    trajectory result(sample(t0));
    if (segments_.empty() || t1 <= t0) {
        return result;
    }
    std::vector<jerk_segment> out;
    const auto first = std::upper_bound(offsets_.begin(), offsets_.end(), t0);
    for (auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, std::distance(offsets_.begin(), first) - 1)); k < segments_.size(); ++k) {
        const double seg_start = offsets_[k];
        if (seg_start >= t1) {
            break;
        }
        const double seg_end = seg_start + segments_[k].duration;
        const double lo = std::max(seg_start, t0);
        const double hi = std::min(seg_end, t1);
        if (hi <= lo) {
            continue;
        }
        // Start states come from the stored segments so long slices do not accumulate drift.
        out.push_back({hi - lo, segments_[k].jerk, segments_[k].at(lo - seg_start)});
    }
    return out.empty() ? result : trajectory(std::move(out));
}

void trajectory::append(const trajectory& other) {
    if (!states_match(end_state(), other.start_state(), k_continuity_epsilon)) {
        throw internal_error("trajectory::append: discontinuous join");
    }
    if (segments_.empty() && other.segments_.empty()) {
        return;
    }
    if (segments_.empty()) {
        *this = other;
        return;
    }
    for (const auto& seg : other.segments_) {
        offsets_.push_back(duration_);
        segments_.push_back(seg);
        duration_ += seg.duration;
    }
}

void trajectory::append_hold(double duration) {
    if (duration <= 0.0) {
        return;
    }
    const kinematic_state state = end_state();
    offsets_.push_back(duration_);
    segments_.push_back({duration, 0.0, state});
    duration_ += duration;
}

namespace {

void include(quantity_range& range, double value) {
    range.min = std::min(range.min, value);
    range.max = std::max(range.max, value);
}

}  // namespace

trajectory_extrema extrema(const trajectory& traj) {
    const kinematic_state s0 = traj.start_state();
    trajectory_extrema ex{{s0.position, s0.position}, {s0.velocity, s0.velocity}, {s0.acceleration, s0.acceleration}};
    for (const auto& seg : traj.segments()) {
        const kinematic_state& s = seg.start;
        const kinematic_state e = seg.end();
        include(ex.position, s.position);
        include(ex.position, e.position);
        include(ex.velocity, s.velocity);
        include(ex.velocity, e.velocity);
        include(ex.acceleration, s.acceleration);
        include(ex.acceleration, e.acceleration);

        // Velocity is quadratic; its stationary point is where the affine acceleration crosses zero.
        if (seg.jerk != 0.0) {
            const double t_star = -s.acceleration / seg.jerk;
            if (t_star > 0.0 && t_star < seg.duration) {
                include(ex.velocity, seg.at(t_star).velocity);
            }
        }

        // Position is cubic; its stationary points are the roots of the velocity quadratic.
        const double qa = seg.jerk / 2.0;
        const double qb = s.acceleration;
        const double qc = s.velocity;
        const auto probe = [&](double t) {
            if (t > 0.0 && t < seg.duration) {
                include(ex.position, seg.at(t).position);
            }
        };
        if (qa == 0.0) {
            if (qb != 0.0) {
                probe(-qc / qb);
            }
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                // Numerically stable pair of roots.
                const double q = -0.5 * (qb + std::copysign(root, qb));
                if (q != 0.0) {
                    probe(q / qa);
                    probe(qc / q);
                } else {
                    probe(0.0);
                }
            }
        }
    }
    return ex;
}

validity_report validate(const trajectory& traj, const kinematic_limits& limits, direction_constraint direction) {
    validity_report report;
    const auto consider = [&](violated_quantity q, double margin) {
        if (margin > k_limit_epsilon && (report.valid || margin > report.worst_margin)) {
            report.valid = false;
            report.violated = q;
            report.worst_margin = margin;
        }
    };

    for (const auto& seg : traj.segments()) {
        if (seg.duration <= 0.0) {
            continue;
        }
        consider(violated_quantity::jerk, std::max(seg.jerk - limits.j_max, limits.j_min - seg.jerk));
    }
    const trajectory_extrema ex = extrema(traj);
    consider(violated_quantity::acceleration, std::max(ex.acceleration.max - limits.a_max, limits.a_min - ex.acceleration.min));
    consider(violated_quantity::velocity, std::max(ex.velocity.max - limits.v_max, limits.v_min - ex.velocity.min));

    if (report.valid) {
        if (direction == direction_constraint::nonneg) {
            consider(violated_quantity::direction, -ex.velocity.min);
        } else if (direction == direction_constraint::nonpos) {
            consider(violated_quantity::direction, ex.velocity.max);
        }
    }
    return report;
}

}  // namespace jerkpath
