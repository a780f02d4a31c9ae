#include "syncstab/stability_region.hpp"

#include "syncstab/equilibrium_index.hpp"
#include "syncstab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace syncstab {

namespace {

// RK4 step with a signed time step; negative dt integrates backward in time.
SyncState signed_step(const RelativeSwingModel& model, const SyncState& s, double dt) {
    const auto shifted = [&](const SyncState& k, double h) {
        return SyncState{s.delta_rad + h * k.delta_rad, s.domega_pu + h * k.domega_pu};
    };
    const SyncState k1 = derivative(model, s);
    const SyncState k2 = derivative(model, shifted(k1, 0.5 * dt));
    const SyncState k3 = derivative(model, shifted(k2, 0.5 * dt));
    const SyncState k4 = derivative(model, shifted(k3, dt));
    return SyncState{
        s.delta_rad + dt / 6.0 * (k1.delta_rad + 2.0 * k2.delta_rad + 2.0 * k3.delta_rad + k4.delta_rad),
        s.domega_pu + dt / 6.0 * (k1.domega_pu + 2.0 * k2.domega_pu + 2.0 * k3.domega_pu + k4.domega_pu)};
}

Polyline trace_branch(const RelativeSwingModel& model, SyncState seed, double sep_rad,
                      const TraceOptions& options) {
    Polyline line{seed};
    const std::size_t every = std::max<std::size_t>(1, options.record_every);
    const auto n = static_cast<std::size_t>(std::ceil(options.t_max_s / options.dt_s));
    SyncState s = seed;
    for (std::size_t k = 1; k <= n; ++k) {
        s = signed_step(model, s, -options.dt_s);
        if (!std::isfinite(s.delta_rad) || !std::isfinite(s.domega_pu)) {
            break;
        }
        const bool done = std::abs(s.delta_rad - sep_rad) > options.delta_span_rad ||
                          std::abs(s.domega_pu) > options.omega_cap_pu;
        if (k % every == 0 || done || k == n) {
            line.push_back(s);
        }
        if (done) {
            break;
        }
    }
    return line;
}

}  // namespace

SaddleDirection stable_direction(const RelativeSwingModel& model, double uep_rad) {
    const double two_h = 2.0 * model.sync_inertia_s;
    const double omega_ref = model.reference_angular_velocity;
    // Jacobian [[0, Omega], [k, -d]] at the saddle.
    const double k = -model.sync_power_max_pu * std::cos(uep_rad) / two_h;
    const double d = model.sync_damping_pu / two_h;
    const double disc = d * d + 4.0 * omega_ref * k;
    const double mu = 0.5 * (-d - std::sqrt(std::max(disc, 0.0)));
    return SaddleDirection{mu, mu / omega_ref};
}

RegionBoundary trace_boundary(const RelativeSwingModel& model, const TraceOptions& options) {
    if (!sep_exists(model)) {
        throw RegionUndefinedError("stability region undefined: no SEP");
    }
    if (!(options.dt_s > 0.0) || !(options.t_max_s > 0.0) || !(options.epsilon_rad > 0.0)) {
        throw DomainError("trace options: dt, t_max and epsilon must be > 0");
    }
    const Equilibria eq = equilibria(model);
    RegionBoundary out;
    out.uep_forward_rad = eq.uep_forward_rad;
    out.uep_backward_rad = eq.uep_backward_rad;
    out.sep_rad = eq.sep_rad;
    out.model = model;

    const double eps = options.epsilon_rad;
    for (double uep : {eq.uep_forward_rad, eq.uep_backward_rad}) {
        const SaddleDirection dir = stable_direction(model, uep);
        for (double sign : {-1.0, 1.0}) {
            const SyncState seed{uep + sign * eps, sign * eps * dir.domega_per_rad};
            out.branches.push_back(trace_branch(model, seed, eq.sep_rad, options));
        }
    }
    return out;
}

void validate(const GridSpec& spec) {
    if (spec.n_delta < 2 || spec.n_omega < 2) {
        throw DomainError("grid: at least 2 points per axis");
    }
    if (!(spec.delta_max_rad > spec.delta_min_rad) || !(spec.omega_max_pu > spec.omega_min_pu)) {
        throw DomainError("grid: empty axis range");
    }
    if (!(spec.dt_s > 0.0) || !(spec.t_max_s > 0.0)) {
        throw DomainError("grid: dt and t_max must be > 0");
    }
}

std::size_t RegionGrid::stable_count() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), RegionLabel::Stable));
}

RegionLabel classify_point(const RelativeSwingModel& model, const SyncState& initial,
                           const GridSpec& spec) {
    const Equilibria eq = equilibria(model);
    if (!eq.exists) {
        throw RegionUndefinedError("stability region undefined: no SEP");
    }
    const double barrier = std::min(energy(model, {eq.uep_forward_rad, 0.0}),
                                    energy(model, {eq.uep_backward_rad, 0.0}));
    const auto in_well = [&](const SyncState& s) {
        return s.delta_rad > eq.uep_backward_rad && s.delta_rad < eq.uep_forward_rad &&
               energy(model, s) < barrier;
    };

    const auto n = static_cast<std::size_t>(std::ceil(spec.t_max_s / spec.dt_s));
    SyncState s = initial;
    for (std::size_t k = 0; k <= n; ++k) {
        if (past_uep(eq, s)) {
            return RegionLabel::Unstable;
        }
        if (k % 8 == 0 && in_well(s)) {
            return RegionLabel::Stable;
        }
        if (k < n) {
            s = step_rk4(model, s, spec.dt_s);
        }
    }
    const bool settled = std::abs(s.delta_rad - eq.sep_rad) < spec.band_delta_rad &&
                         std::abs(s.domega_pu) < spec.band_omega_pu;
    return settled ? RegionLabel::Stable : RegionLabel::Unstable;
}

RegionGrid classify_grid(const RelativeSwingModel& model, const GridSpec& spec) {
    validate(spec);
    if (!sep_exists(model)) {
        throw RegionUndefinedError("stability region undefined: no SEP");
    }
    RegionGrid grid;
    const auto axis = [](double lo, double hi, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        return v;
    };
    grid.delta_axis = axis(spec.delta_min_rad, spec.delta_max_rad, spec.n_delta);
    grid.omega_axis = axis(spec.omega_min_pu, spec.omega_max_pu, spec.n_omega);
    grid.labels.resize(spec.n_delta * spec.n_omega);
    for (std::size_t i = 0; i < spec.n_delta; ++i) {
        for (std::size_t j = 0; j < spec.n_omega; ++j) {
            grid.labels[i * spec.n_omega + j] =
                classify_point(model, {grid.delta_axis[i], grid.omega_axis[j]}, spec);
        }
    }
    grid.cell_area = (spec.delta_max_rad - spec.delta_min_rad) / static_cast<double>(spec.n_delta - 1) *
                     (spec.omega_max_pu - spec.omega_min_pu) / static_cast<double>(spec.n_omega - 1);
    grid.area_estimate = grid.cell_area * static_cast<double>(grid.stable_count());
    return grid;
}

}  // namespace syncstab
