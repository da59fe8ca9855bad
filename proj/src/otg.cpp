#include <jerkpath/otg.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <jerkpath/errors.hpp>

namespace jerkpath {

namespace {

constexpr int k_phase_count = 7;
constexpr int k_uniform_samples = 20;
constexpr int k_max_root_iterations = 200;
constexpr double k_root_residual = 1e-10;
constexpr double k_param_epsilon = 1e-12;

// Problem in the frame where the first acceleration ramp rises ("up-down-down-up" jerk pattern).
// The opposite pattern is solved by mirroring the problem through p -> -p.
struct frame {
    double v0;
    double a0;
    double distance;  // target position minus start position
    double af;
    double v_hi;  // velocity bound in the direction of travel (> 0)
    double v_lo;  // opposite velocity bound (< 0)
    double a_hi;
    double a_lo;
    double j_up;    // magnitude of rising ramps
    double j_down;  // magnitude of falling ramps
};

struct profile {
    std::array<double, k_phase_count> jerk{};
    std::array<double, k_phase_count> duration{};

    double total() const {
        double t = 0.0;
        for (double d : duration) {
            t += d;
        }
        return t;
    }

    int active_phases() const {
        return static_cast<int>(std::count_if(duration.begin(), duration.end(), [](double d) { return d > 0.0; }));
    }
};

struct pva {
    double p;
    double v;
    double a;
};

inline pva step(const pva& s, double j, double t) {
    const double t2 = t * t;
    return {s.p + s.v * t + s.a * t2 / 2.0 + j * t2 * t / 6.0, s.v + s.a * t + j * t2 / 2.0, s.a + j * t};
}

pva run(const profile& prof, const pva& start) {
    pva s = start;
    for (int k = 0; k < k_phase_count; ++k) {
        if (prof.duration[k] > 0.0) {
            s = step(s, prof.jerk[k], prof.duration[k]);
        }
    }
    return s;
}

struct velocity_bounds {
    double lo;
    double hi;
};

velocity_bounds velocity_range(const profile& prof, const pva& start) {
    velocity_bounds vb{start.v, start.v};
    pva s = start;
    for (int k = 0; k < k_phase_count; ++k) {
        const double dt = prof.duration[k];
        if (dt <= 0.0) {
            continue;
        }
        const double j = prof.jerk[k];
        if (j != 0.0) {
            const double ts = -s.a / j;
            if (ts > 0.0 && ts < dt) {
                const double v = step(s, j, ts).v;
                vb.lo = std::min(vb.lo, v);
                vb.hi = std::max(vb.hi, v);
            }
        }
        s = step(s, j, dt);
        vb.lo = std::min(vb.lo, s.v);
        vb.hi = std::max(vb.hi, s.v);
    }
    return vb;
}

enum class trough_branch { negative, positive };

// Shape of an up-down-down-up profile for a given first-peak parameter. `tau` below a_hi is the
// first acceleration peak; above a_hi it encodes a plateau of (tau - a_hi) / j_up seconds.
struct shape {
    double peak;
    double peak_hold;
    double trough;
    double trough_hold;
    double peak_velocity;  // velocity where the falling ramp crosses zero acceleration, if it does
    double x;              // squared trough before plateau clipping
};

std::optional<shape> make_shape(const frame& f, double tau, trough_branch branch) {
    const double peak = std::min(tau, f.a_hi);
    const double hold = std::max(0.0, tau - f.a_hi) / f.j_up;
    const double w = f.v0 + (peak * peak - f.a0 * f.a0) / (2.0 * f.j_up) + peak * hold;
    const double c = peak * peak / (2.0 * f.j_down) + f.af * f.af / (2.0 * f.j_up);
    const double k = 1.0 / (2.0 * f.j_down) + 1.0 / (2.0 * f.j_up);
    double x = (c + w) / k;
    const double scale = 1.0 + f.a_hi * f.a_hi + peak * peak;
    if (x < -k_param_epsilon * scale) {
        return std::nullopt;
    }
    x = std::max(x, 0.0);

    shape sh{peak, hold, 0.0, 0.0, w + std::max(peak, 0.0) * std::max(peak, 0.0) / (2.0 * f.j_down), x};
    const double tol = k_param_epsilon * (1.0 + std::abs(f.a_hi) + std::abs(f.a_lo));
    if (branch == trough_branch::negative) {
        sh.trough = -std::sqrt(x);
        if (sh.trough < f.a_lo) {
            sh.trough = f.a_lo;
            sh.trough_hold = (w + c - k * f.a_lo * f.a_lo) / (-f.a_lo);
        }
        if (sh.trough > peak + tol || sh.trough > f.af + tol) {
            return std::nullopt;
        }
    } else {
        sh.trough = std::sqrt(x);
        if (sh.trough > std::min(peak, f.af) + tol) {
            return std::nullopt;
        }
    }
    sh.trough = std::min({sh.trough, peak, f.af});
    return sh;
}

profile make_profile(const frame& f, const shape& sh, double cruise) {
    profile prof;
    prof.jerk = {f.j_up, 0.0, -f.j_down, 0.0, -f.j_down, 0.0, f.j_up};
    prof.duration[0] = std::max(0.0, (sh.peak - f.a0) / f.j_up);
    prof.duration[1] = sh.peak_hold;
    // A falling ramp through zero acceleration is split there, around the optional cruise.
    if (cruise > 0.0 || (sh.peak > 0.0 && sh.trough < 0.0)) {
        prof.duration[2] = std::max(0.0, sh.peak / f.j_down);
        prof.duration[3] = cruise;
        prof.duration[4] = std::max(0.0, -sh.trough / f.j_down);
    } else {
        prof.duration[2] = std::max(0.0, (sh.peak - sh.trough) / f.j_down);
    }
    prof.duration[5] = std::max(0.0, sh.trough_hold);
    prof.duration[6] = std::max(0.0, (f.af - sh.trough) / f.j_up);
    return prof;
}

struct candidate {
    profile prof;
    double time;
};

bool within_limits(const frame& f, const profile& prof) {
    const pva start{0.0, f.v0, f.a0};
    const velocity_bounds vb = velocity_range(prof, start);
    const double vtol = k_limit_epsilon * 0.5;
    if (vb.hi > f.v_hi + vtol || vb.lo < f.v_lo - vtol) {
        return false;
    }
    // Accelerations are bounded by construction except for the start and target values.
    return true;
}

void consider(const frame& f, const profile& prof, std::optional<candidate>& best) {
    const pva end = run(prof, {0.0, f.v0, f.a0});
    const double scale = 1.0 + std::abs(f.distance);
    if (std::abs(end.p - f.distance) > 1e-9 * scale || std::abs(end.v) > 1e-9 * (1.0 + std::abs(f.v0)) ||
        std::abs(end.a - f.af) > 1e-9 * (1.0 + std::abs(f.af))) {
        return;
    }
    if (!within_limits(f, prof)) {
        return;
    }
    const double t = prof.total();
    if (!best || t < best->time - 1e-12 ||
        (std::abs(t - best->time) <= 1e-12 && prof.active_phases() < best->prof.active_phases())) {
        best = candidate{prof, t};
    }
}

// Value of tau at which coef * peak^2 + peak * hold reaches `gain`, growing the peak up to a_hi
// first and the plateau afterwards.
double tau_for_gain(const frame& f, double gain, double coef) {
    if (gain <= coef * f.a_hi * f.a_hi) {
        return std::sqrt(std::max(0.0, gain / coef));
    }
    return f.a_hi + f.j_up * (gain - coef * f.a_hi * f.a_hi) / f.a_hi;
}

void solve_branch(const frame& f, trough_branch branch, double tau_max, std::optional<candidate>& best, double& residual) {
    const double tau_min = f.a0;
    if (!(tau_max >= tau_min)) {
        return;
    }

    std::array<double, k_uniform_samples + 12> taus{};
    std::size_t n = 0;
    for (int i = 0; i <= k_uniform_samples; ++i) {
        taus[n++] = tau_min + (tau_max - tau_min) * static_cast<double>(i) / k_uniform_samples;
    }
    // Breakpoints where the shape changes character.
    const double k = 1.0 / (2.0 * f.j_down) + 1.0 / (2.0 * f.j_up);
    const double kk = (f.v0 + (f.af * f.af - f.a0 * f.a0) / (2.0 * f.j_up)) / k;
    const auto add = [&](double tau) {
        if (tau > tau_min && tau < tau_max && n < taus.size()) {
            taus[n++] = tau;
        }
    };
    add(0.0);
    add(f.a_hi);
    for (double target_x : {0.0, f.af * f.af, f.a_lo * f.a_lo}) {
        // x = (k*peak^2 + peak*hold + k*kk) / k for peak >= 0
        add(tau_for_gain(f, k * (target_x - kk), k));
    }
    std::sort(taus.begin(), taus.begin() + static_cast<std::ptrdiff_t>(n));

    const auto eval = [&](double tau, shape& sh) -> std::optional<double> {
        const auto s = make_shape(f, tau, branch);
        if (!s) {
            return std::nullopt;
        }
        sh = *s;
        const profile prof = make_profile(f, sh, 0.0);
        return run(prof, {0.0, f.v0, f.a0}).p - f.distance;
    };

    std::optional<double> prev_value;
    double prev_tau = 0.0;
    shape sh{};
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = taus[i];
        const auto value = eval(tau, sh);
        if (value) {
            residual = std::min(residual, std::abs(*value));
            if (std::abs(*value) <= k_root_residual * 1e-2 * (1.0 + std::abs(f.distance))) {
                consider(f, make_profile(f, sh, 0.0), best);
            } else if (prev_value && (*prev_value < 0.0) != (*value < 0.0)) {
                // Illinois-modified regula falsi on [prev_tau, tau].
                double lo = prev_tau;
                double hi = tau;
                double f_lo = *prev_value;
                double f_hi = *value;
                int side = 0;
                shape root_shape = sh;
                bool found = false;
                for (int it = 0; it < k_max_root_iterations; ++it) {
                    double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
                    if (!(mid > lo && mid < hi) || it % 8 == 7) {
                        mid = 0.5 * (lo + hi);
                    }
                    shape mid_shape{};
                    const auto f_mid = eval(mid, mid_shape);
                    if (!f_mid) {
                        break;
                    }
                    root_shape = mid_shape;
                    if (std::abs(*f_mid) <= k_root_residual * 1e-2 * (1.0 + std::abs(f.distance)) || hi - lo <= 1e-15 * (1.0 + std::abs(hi))) {
                        found = true;
                        break;
                    }
                    if ((*f_mid < 0.0) == (f_lo < 0.0)) {
                        lo = mid;
                        f_lo = *f_mid;
                        if (side == -1) {
                            f_hi /= 2.0;
                        }
                        side = -1;
                    } else {
                        hi = mid;
                        f_hi = *f_mid;
                        if (side == 1) {
                            f_lo /= 2.0;
                        }
                        side = 1;
                    }
                }
                if (found) {
                    consider(f, make_profile(f, root_shape, 0.0), best);
                }
            }
        }
        prev_value = value;
        prev_tau = tau;
    }
}

// Largest tau whose zero-crossing velocity stays within v_hi, for peaks >= 0.
double velocity_capped_tau(const frame& f) {
    const double k = 1.0 / (2.0 * f.j_down) + 1.0 / (2.0 * f.j_up);
    const double gain = f.v_hi - f.v0 + f.a0 * f.a0 / (2.0 * f.j_up);
    return tau_for_gain(f, gain, k);
}

void solve_frame(const frame& f, std::optional<candidate>& best, double& residual) {
    const double tau_v = velocity_capped_tau(f);

    solve_branch(f, trough_branch::negative, tau_v, best, residual);

    // With a positive trough the velocity rises monotonically after the first peak up to the
    // final zero, so the plateau is bounded by reaching zero velocity at its end.
    const double gain_pos = -f.v0 + f.a0 * f.a0 / (2.0 * f.j_up);
    solve_branch(f, trough_branch::positive, std::max(tau_for_gain(f, gain_pos, 1.0 / (2.0 * f.j_up)), f.a0), best, residual);

    // Cruise at the velocity limit.
    if (tau_v >= f.a0) {
        if (const auto sh = make_shape(f, tau_v, trough_branch::negative); sh && sh->peak >= 0.0 && sh->trough <= 0.0) {
            const profile base = make_profile(f, *sh, 0.0);
            const double reach = run(base, {0.0, f.v0, f.a0}).p;
            const double rest = f.distance - reach;
            residual = std::min(residual, std::abs(rest));
            if (rest > 0.0) {
                consider(f, make_profile(f, *sh, rest / f.v_hi), best);
            }
        }
    }
}

frame make_frame(const kinematic_state& start, const target_state& target, const kinematic_limits& l, bool mirror) {
    if (!mirror) {
        return {start.velocity, start.acceleration, target.position - start.position, target.acceleration, l.v_max, l.v_min, l.a_max, l.a_min, l.j_max, -l.j_min};
    }
    return {-start.velocity, -start.acceleration, start.position - target.position, -target.acceleration, -l.v_min, -l.v_max, -l.a_min, -l.a_max, -l.j_min, l.j_max};
}

trajectory to_trajectory(const kinematic_state& start, const profile& prof, bool mirror) {
    std::array<double, k_phase_count> jerks = prof.jerk;
    if (mirror) {
        for (double& j : jerks) {
            j = -j;
        }
    }
    return trajectory::from_phases(start, jerks, prof.duration);
}

void check_inputs(const kinematic_state& start, const kinematic_limits& limits) {
    if (!start.is_finite()) {
        throw invalid_argument_error("start state is not finite");
    }
    limits.check();
}

}  // namespace

trajectory plan_to_state(const kinematic_state& start, const target_state& target, const kinematic_limits& limits) {
    check_inputs(start, limits);
    if (!std::isfinite(target.position) || !std::isfinite(target.acceleration)) {
        throw invalid_argument_error("target state is not finite");
    }
    if (target.acceleration > limits.a_max + k_limit_epsilon || target.acceleration < limits.a_min - k_limit_epsilon) {
        throw infeasible_error("target acceleration outside the acceleration limits", 0.0);
    }
    if (start.velocity == 0.0 && start.acceleration == target.acceleration && start.position == target.position) {
        return trajectory(start);
    }

    // A negligible acceleration pushing past the velocity limit counts as cruising at the limit.
    kinematic_state from = start;
    if ((from.velocity >= limits.v_max - k_limit_epsilon && from.acceleration > 0.0 && from.acceleration < k_param_epsilon) ||
        (from.velocity <= limits.v_min + k_limit_epsilon && from.acceleration < 0.0 && from.acceleration > -k_param_epsilon)) {
        from.acceleration = 0.0;
    }

    std::optional<candidate> best[2];
    double residual = std::numeric_limits<double>::infinity();
    for (int m = 0; m < 2; ++m) {
        solve_frame(make_frame(from, target, limits, m == 1), best[m], residual);
    }
    const int pick = !best[0] ? 1 : (!best[1] ? 0 : (best[1]->time < best[0]->time - 1e-12 ||
                                                             (std::abs(best[1]->time - best[0]->time) <= 1e-12 &&
                                                              best[1]->prof.active_phases() < best[0]->prof.active_phases())
                                                         ? 1
                                                         : 0));
    if (!best[pick]) {
        throw infeasible_error("no jerk-limited profile reaches the target within the limits", residual);
    }
    return to_trajectory(from, best[pick]->prof, pick == 1);
}

trajectory plan_brake(const kinematic_state& start, const kinematic_limits& limits) {
    check_inputs(start, limits);
    const double v0 = start.velocity;
    const double a0 = start.acceleration;
    // Velocity reached by ramping the acceleration straight to zero.
    const double v_natural = a0 >= 0.0 ? v0 + a0 * a0 / (2.0 * -limits.j_min) : v0 - a0 * a0 / (2.0 * limits.j_max);

    if (v_natural == 0.0) {
        const double jerk = a0 > 0.0 ? limits.j_min : limits.j_max;
        const double t = a0 == 0.0 ? 0.0 : -a0 / jerk;
        const std::array<double, 1> jerks{jerk};
        const std::array<double, 1> durations{t};
        return trajectory::from_phases(start, jerks, durations);
    }

    // Mirror so that the remaining velocity is positive and has to be removed by a trough.
    const bool mirror = v_natural < 0.0;
    const double sv = mirror ? -v0 : v0;
    const double sa = mirror ? -a0 : a0;
    const double j_up = mirror ? -limits.j_min : limits.j_max;
    const double j_down = mirror ? limits.j_max : -limits.j_min;
    const double a_lo = mirror ? -limits.a_max : limits.a_min;

    const double k = 1.0 / (2.0 * j_down) + 1.0 / (2.0 * j_up);
    double trough = -std::sqrt(std::max(0.0, (sa * sa / (2.0 * j_down) + sv) / k));
    double hold = 0.0;
    if (trough < a_lo) {
        trough = a_lo;
        hold = (sv + sa * sa / (2.0 * j_down) - k * a_lo * a_lo) / (-a_lo);
    }
    const double sign = mirror ? -1.0 : 1.0;
    const std::array<double, 3> jerks{-j_down * sign, 0.0, j_up * sign};
    const std::array<double, 3> durations{std::max(0.0, (sa - trough) / j_down), std::max(0.0, hold), std::max(0.0, -trough / j_up)};
    return trajectory::from_phases(start, jerks, durations);
}

}  // namespace jerkpath
