#include "syncstab/transient_sim.hpp"

#include "syncstab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace syncstab {

namespace {

std::size_t step_count(double duration, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("time step must be > 0");
    }
    return static_cast<std::size_t>(std::llround(std::ceil(duration / dt - 1e-9)));
}

void require_finite(const SyncState& s) {
    if (!std::isfinite(s.delta_rad) || !std::isfinite(s.domega_pu)) {
        throw IntegrationDivergedError("non-finite synchronization state");
    }
}

struct StagedModels {
    RelativeSwingModel pre;
    RelativeSwingModel fault;
    RelativeSwingModel post;
    Equilibria pre_eq;
    Equilibria fault_eq;
    Equilibria post_eq;

    [[nodiscard]] const RelativeSwingModel& model(Stage s) const {
        return s == Stage::PreFault ? pre : (s == Stage::FaultOn ? fault : post);
    }
    [[nodiscard]] const Equilibria& limits(Stage s) const {
        return s == Stage::PreFault ? pre_eq : (s == Stage::FaultOn ? fault_eq : post_eq);
    }
};

StagedModels build_models(const VsgParams& vsg, const SgParams& sg, const LoadParams& load,
                          const BaseQuantities& base, const FaultScenario& scenario) {
    StagedModels m;
    m.pre = stage_model(vsg, sg, load, base, scenario.prefault);
    m.fault = stage_model(vsg, sg, load, base, scenario.faulted);
    m.post = scenario.postfault ? stage_model(vsg, sg, load, base, *scenario.postfault) : m.fault;
    m.pre_eq = limiting_equilibria(m.pre);
    m.fault_eq = limiting_equilibria(m.fault);
    m.post_eq = limiting_equilibria(m.post);
    return m;
}

// Appends one sample; the stage parameters determine power and current.
void record(Trajectory& traj, double t, const SyncState& s, const RelativeSwingModel& model,
            double vsg_voltage, double sg_voltage, double x_sum) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.sync_power.push_back(model.sync_power_max_pu * std::sin(s.delta_rad));
    traj.current_mag.push_back(current_magnitude(vsg_voltage, sg_voltage, s.delta_rad, x_sum));
}

// Shared stage-switching loop. `advance` moves the integrator by one step under
// the given stage and returns the new relative state.
template <typename Advance>
Trajectory run_staged(const VsgParams& vsg, const SgParams& sg, const FaultScenario& scenario,
                      const StagedModels& models, SyncState state, const SimOptions& options,
                      Advance&& advance) {
    const std::size_t n = step_count(scenario.t_end_s, options.dt_s);
    const std::size_t every = std::max<std::size_t>(1, options.record_every);
    Trajectory traj;
    traj.times.reserve(n / every + 2);
    traj.states.reserve(n / every + 2);
    traj.sync_power.reserve(n / every + 2);
    traj.current_mag.reserve(n / every + 2);

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * options.dt_s;
        const Stage stage = stage_at(scenario, t);
        const StageParams& params = stage_params(scenario, stage);
        if (k % every == 0 || k == n) {
            record(traj, t, state, models.model(stage), vsg.internal_voltage_pu,
                   params.sg_voltage_pu, total_reactance(apply_stage(vsg, params), sg));
        }
        if (!traj.los_time && past_uep(models.limits(stage), state)) {
            traj.los_time = t;
            if (options.stop_at_los) {
                if (traj.times.back() != t) {
                    record(traj, t, state, models.model(stage), vsg.internal_voltage_pu,
                           params.sg_voltage_pu, total_reactance(apply_stage(vsg, params), sg));
                }
                break;
            }
        }
        if (k == n) {
            break;
        }
        state = advance(stage, options.dt_s);
        require_finite(state);
    }
    traj.ssi = ssi(traj);
    return traj;
}

}  // namespace

void validate(const FaultScenario& scenario) {
    const auto fail = [](const char* what) { throw DomainError(what); };
    if (!(scenario.t_fault_s >= 0.0)) fail("scenario: t_fault must be >= 0");
    if (!(scenario.t_fault_s < scenario.t_end_s)) fail("scenario: t_fault must be < t_end");
    if (scenario.t_clear_s) {
        if (!(*scenario.t_clear_s > scenario.t_fault_s)) fail("scenario: t_clear must be > t_fault");
        if (!(*scenario.t_clear_s <= scenario.t_end_s)) fail("scenario: t_clear must be <= t_end");
        if (!scenario.postfault) fail("scenario: t_clear given without a post-fault stage");
    } else if (scenario.postfault) {
        fail("scenario: post-fault stage given without t_clear");
    }
}

Stage stage_at(const FaultScenario& scenario, double t) {
    if (t < scenario.t_fault_s) {
        return Stage::PreFault;
    }
    if (scenario.t_clear_s && t >= *scenario.t_clear_s) {
        return Stage::PostFault;
    }
    return Stage::FaultOn;
}

const StageParams& stage_params(const FaultScenario& scenario, Stage stage) {
    switch (stage) {
        case Stage::PreFault: return scenario.prefault;
        case Stage::FaultOn: return scenario.faulted;
        case Stage::PostFault: return scenario.postfault ? *scenario.postfault : scenario.faulted;
    }
    return scenario.faulted;
}

VsgParams apply_stage(VsgParams vsg, const StageParams& stage) {
    vsg.virtual_reactance_pu = stage.virtual_reactance_pu;
    vsg.power_reference_pu = stage.vsg_power_reference_pu;
    return vsg;
}

SgParams apply_stage(SgParams sg, const StageParams& stage) {
    sg.voltage_pu = stage.sg_voltage_pu;
    return sg;
}

RelativeSwingModel stage_model(const VsgParams& vsg, const SgParams& sg, const LoadParams& load,
                               const BaseQuantities& base, const StageParams& stage) {
    return reduce(apply_stage(vsg, stage), apply_stage(sg, stage), load, base);
}

SyncState derivative(const RelativeSwingModel& m, const SyncState& s) {
    return SyncState{
        m.reference_angular_velocity * s.domega_pu,
        (m.sync_power_reference_pu - m.sync_power_max_pu * std::sin(s.delta_rad) -
         m.sync_damping_pu * s.domega_pu) /
            (2.0 * m.sync_inertia_s)};
}

SyncState step_rk4(const RelativeSwingModel& model, const SyncState& s, double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("time step must be > 0");
    }
    const auto shifted = [&](const SyncState& k, double h) {
        return SyncState{s.delta_rad + h * k.delta_rad, s.domega_pu + h * k.domega_pu};
    };
    const SyncState k1 = derivative(model, s);
    const SyncState k2 = derivative(model, shifted(k1, 0.5 * dt));
    const SyncState k3 = derivative(model, shifted(k2, 0.5 * dt));
    const SyncState k4 = derivative(model, shifted(k3, dt));
    const SyncState next{
        s.delta_rad + dt / 6.0 * (k1.delta_rad + 2.0 * k2.delta_rad + 2.0 * k3.delta_rad + k4.delta_rad),
        s.domega_pu + dt / 6.0 * (k1.domega_pu + 2.0 * k2.domega_pu + 2.0 * k3.domega_pu + k4.domega_pu)};
    require_finite(next);
    return next;
}

double energy(const RelativeSwingModel& m, const SyncState& s) {
    return m.sync_inertia_s * s.domega_pu * s.domega_pu -
           (m.sync_power_reference_pu * s.delta_rad +
            m.sync_power_max_pu * std::cos(s.delta_rad)) /
               m.reference_angular_velocity;
}

Trajectory simulate_reduced(const VsgParams& vsg, const SgParams& sg, const LoadParams& load,
                            const BaseQuantities& base, const FaultScenario& scenario,
                            const SimOptions& options) {
    validate(scenario);
    const StagedModels models = build_models(vsg, sg, load, base, scenario);
    if (!sep_exists(models.pre)) {
        throw InvariantError("pre-fault operating point has no stable equilibrium");
    }
    SyncState state{models.pre_eq.sep_rad, 0.0};
    return run_staged(vsg, sg, scenario, models, state, options, [&](Stage stage, double dt) {
        state = step_rk4(models.model(stage), state, dt);
        return state;
    });
}

Trajectory simulate_full(const VsgParams& vsg, const SgParams& sg, const LoadParams& load,
                         const BaseQuantities& base, const FaultScenario& scenario,
                         const SimOptions& options) {
    validate(scenario);
    const StagedModels models = build_models(vsg, sg, load, base, scenario);
    const double omega_ref = base.reference_angular_velocity();

    struct StageCoefficients {
        double p_vref, p_net, p_syn_max;
    };
    const auto coefficients = [&](Stage stage) {
        const StageParams& p = stage_params(scenario, stage);
        const VsgParams v = apply_stage(vsg, p);
        const SgParams g = apply_stage(sg, p);
        return StageCoefficients{v.power_reference_pu,
                                 net_power(g.mechanical_power_pu, load_power(g.voltage_pu, load)),
                                 g.voltage_pu * v.internal_voltage_pu / total_reactance(v, g)};
    };
    const std::array<StageCoefficients, 3> stages{coefficients(Stage::PreFault),
                                                  coefficients(Stage::FaultOn),
                                                  coefficients(Stage::PostFault)};

    // Pre-fault steady state: a common frequency deviation lets both dampings
    // absorb the surplus P_vref + P_net, and the VSG output settles at
    // P_vref - D_v * omega_c.
    const StageCoefficients& pre = stages[0];
    const double damping_sum = vsg.damping_pu + sg.damping_pu;
    double omega_common = 0.0;
    double vsg_output = models.pre.sync_power_reference_pu;
    if (damping_sum > 0.0) {
        omega_common = (pre.p_vref + pre.p_net) / damping_sum;
        vsg_output = pre.p_vref - vsg.damping_pu * omega_common;
    }
    if (!(std::abs(vsg_output) < pre.p_syn_max)) {
        throw InvariantError("pre-fault operating point has no stable equilibrium");
    }

    using State4 = std::array<double, 4>;  // theta_v, domega_v, theta_g, domega_g
    State4 x{std::asin(vsg_output / pre.p_syn_max), omega_common, 0.0, omega_common};

    const double hv2 = 2.0 * vsg.inertia_s;
    const double hg2 = 2.0 * sg.inertia_s;
    const auto rhs = [&](const StageCoefficients& c, const State4& y) {
        const double p_v = c.p_syn_max * std::sin(y[0] - y[2]);
        const double p_g_surplus = c.p_net + p_v;  // P_m - P_g with P_g = P_L - P_v
        return State4{omega_ref * y[1], (c.p_vref - p_v - vsg.damping_pu * y[1]) / hv2,
                      omega_ref * y[3], (p_g_surplus - sg.damping_pu * y[3]) / hg2};
    };

    const auto relative = [](const State4& y) { return SyncState{y[0] - y[2], y[1] - y[3]}; };
    return run_staged(
        vsg, sg, scenario, models, relative(x), options, [&](Stage stage, double dt) {
            const StageCoefficients& c = stages[static_cast<std::size_t>(stage)];
            const auto axpy = [](const State4& a, double h, const State4& b) {
                return State4{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]};
            };
            const State4 k1 = rhs(c, x);
            const State4 k2 = rhs(c, axpy(x, 0.5 * dt, k1));
            const State4 k3 = rhs(c, axpy(x, 0.5 * dt, k2));
            const State4 k4 = rhs(c, axpy(x, dt, k3));
            for (std::size_t i = 0; i < 4; ++i) {
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            return relative(x);
        });
}

std::vector<SyncState> integrate(const RelativeSwingModel& model, const SyncState& initial,
                                 double duration, double dt) {
    const std::size_t n = step_count(duration, dt);
    std::vector<SyncState> out;
    out.reserve(n + 1);
    out.push_back(initial);
    SyncState s = initial;
    for (std::size_t k = 0; k < n; ++k) {
        s = step_rk4(model, s, dt);
        out.push_back(s);
    }
    return out;
}

bool past_uep(const Equilibria& eq, const SyncState& s) {
    return (s.delta_rad > eq.uep_forward_rad && s.domega_pu > 0.0) ||
           (s.delta_rad < eq.uep_backward_rad && s.domega_pu < 0.0);
}

std::optional<double> detect_los(const Trajectory& trajectory, const RelativeSwingModel& model) {
    const Equilibria eq = limiting_equilibria(model);
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        if (past_uep(eq, trajectory.states[i])) {
            return trajectory.times[i];
        }
    }
    return std::nullopt;
}

double ssi(const Trajectory& trajectory) {
    if (trajectory.states.empty()) {
        throw DomainError("SSI of an empty trajectory");
    }
    double delta_max = trajectory.states.front().delta_rad;
    for (const SyncState& s : trajectory.states) {
        delta_max = std::max(delta_max, s.delta_rad);
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return (two_pi - delta_max) / (two_pi + delta_max);
}

double current_magnitude(double vsg_voltage_pu, double sg_voltage_pu, double delta_rad,
                         double total_reactance_pu) {
    if (total_reactance_pu == 0.0) {
        throw SingularNetworkError("X_sum is zero");
    }
    const double squared = vsg_voltage_pu * vsg_voltage_pu + sg_voltage_pu * sg_voltage_pu -
                           2.0 * vsg_voltage_pu * sg_voltage_pu * std::cos(delta_rad);
    return std::sqrt(std::max(squared, 0.0)) / total_reactance_pu;
}

std::vector<double> current_trace(const Trajectory& trajectory, const VsgParams& vsg,
                                  const SgParams& sg, const FaultScenario& scenario) {
    std::vector<double> out;
    out.reserve(trajectory.size());
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const StageParams& p = stage_params(scenario, stage_at(scenario, trajectory.times[i]));
        out.push_back(current_magnitude(vsg.internal_voltage_pu, p.sg_voltage_pu,
                                        trajectory.states[i].delta_rad,
                                        total_reactance(apply_stage(vsg, p), sg)));
    }
    return out;
}

}  // namespace syncstab
