#include "syncstab/eac.hpp"

#include "syncstab/equilibrium_index.hpp"
#include "syncstab/errors.hpp"

#include <cmath>

namespace syncstab {

namespace {

// Closed-form integral of the accelerating power P_syn_ref - P_syn_max sin(d).
double accelerating_integral(const RelativeSwingModel& m, double from, double to) {
    return m.sync_power_reference_pu * (to - from) +
           m.sync_power_max_pu * (std::cos(to) - std::cos(from));
}

// Root of f on [lo, hi] for f(lo) <= 0 <= f(hi), f monotone.
template <typename F>
double bisect(F&& f, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(FirstSwing c) {
    switch (c) {
        case FirstSwing::Stable: return "Stable";
        case FirstSwing::Unstable: return "Unstable";
        case FirstSwing::NoSep: return "NoSep";
    }
    return "?";
}

const char* to_string(SwingDirection d) {
    switch (d) {
        case SwingDirection::None: return "none";
        case SwingDirection::Forward: return "forward";
        case SwingDirection::Backward: return "backward";
    }
    return "?";
}

double acceleration_area(const RelativeSwingModel& model, double delta_0, double delta_s) {
    if (delta_0 > delta_s) {
        throw DomainError("acceleration_area requires delta_0 <= delta_s");
    }
    return accelerating_integral(model, delta_0, delta_s);
}

double deceleration_area(const RelativeSwingModel& model, double delta_s, double delta_end) {
    if (delta_s > delta_end) {
        throw DomainError("deceleration_area requires delta_s <= delta_end");
    }
    return -accelerating_integral(model, delta_s, delta_end);
}

EacResult classify_first_swing(const RelativeSwingModel& model, double delta_0,
                               double boundary_tolerance) {
    EacResult out;
    if (!sep_exists(model)) {
        out.classification = FirstSwing::NoSep;
        return out;
    }
    const Equilibria eq = equilibria(model);
    out.delta_s = eq.sep_rad;

    if (delta_0 >= eq.uep_forward_rad || delta_0 <= eq.uep_backward_rad) {
        out.direction = delta_0 >= eq.uep_forward_rad ? SwingDirection::Forward
                                                      : SwingDirection::Backward;
        out.delta_u = delta_0 >= eq.uep_forward_rad ? eq.uep_forward_rad : eq.uep_backward_rad;
        out.classification = FirstSwing::Unstable;
        return out;
    }

    if (delta_0 <= eq.sep_rad) {
        out.direction = delta_0 < eq.sep_rad ? SwingDirection::Forward : SwingDirection::None;
        out.delta_u = eq.uep_forward_rad;
        out.accel_area = acceleration_area(model, delta_0, eq.sep_rad);
        out.decel_area = deceleration_area(model, eq.sep_rad, eq.uep_forward_rad);
    } else {
        // Mirror image: decelerating power drives the angle back through the SEP
        // toward the backward UEP.
        out.direction = SwingDirection::Backward;
        out.delta_u = eq.uep_backward_rad;
        out.accel_area = -accelerating_integral(model, eq.sep_rad, delta_0);
        out.decel_area = accelerating_integral(model, eq.uep_backward_rad, eq.sep_rad);
    }

    out.critical = std::abs(out.accel_area - out.decel_area) < boundary_tolerance;
    if (out.accel_area < out.decel_area) {
        out.classification = FirstSwing::Stable;
        const double target = out.accel_area;
        if (out.direction == SwingDirection::Backward) {
            // Area from x up to delta_s decreases as x rises toward delta_s.
            out.delta_max = bisect(
                [&](double x) { return target - accelerating_integral(model, x, eq.sep_rad); },
                eq.uep_backward_rad, eq.sep_rad);
        } else if (target == 0.0) {
            out.delta_max = eq.sep_rad;
        } else {
            out.delta_max = bisect(
                [&](double x) { return -accelerating_integral(model, eq.sep_rad, x) - target; },
                eq.sep_rad, eq.uep_forward_rad);
        }
    } else {
        out.classification = FirstSwing::Unstable;
    }
    return out;
}

}  // namespace syncstab
