#pragma once

// Fixed-step time-domain simulation of the staged fault scenario, on either
// the reduced two-state relative model or the four-state two-machine model.

#include "syncstab/core_model.hpp"
#include "syncstab/equilibrium_index.hpp"

#include <optional>
#include <vector>

namespace syncstab {

struct SyncState {
    double delta_rad = 0.0;  // delta_vg = theta_v - theta_g, unwrapped
    double domega_pu = 0.0;  // omega_v - omega_g
};

/// Quantities that change between pre-fault, fault-on and post-fault stages.
struct StageParams {
    double sg_voltage_pu = 1.0;
    double virtual_reactance_pu = 0.0;
    double vsg_power_reference_pu = 0.0;
};

struct FaultScenario {
    double t_end_s = 10.0;
    double t_fault_s = 0.5;
    std::optional<double> t_clear_s;
    StageParams prefault;
    StageParams faulted;
    std::optional<StageParams> postfault;
};

enum class Stage { PreFault, FaultOn, PostFault };

/// Throws DomainError unless 0 <= t_fault < t_end and t_fault < t_clear <= t_end,
/// and a post-fault stage is given exactly when a clearing time is.
void validate(const FaultScenario& scenario);

[[nodiscard]] Stage stage_at(const FaultScenario& scenario, double t);
[[nodiscard]] const StageParams& stage_params(const FaultScenario& scenario, Stage stage);

/// Machine parameters with the stage overrides applied.
[[nodiscard]] VsgParams apply_stage(VsgParams vsg, const StageParams& stage);
[[nodiscard]] SgParams apply_stage(SgParams sg, const StageParams& stage);

[[nodiscard]] RelativeSwingModel stage_model(const VsgParams& vsg, const SgParams& sg,
                                             const LoadParams& load, const BaseQuantities& base,
                                             const StageParams& stage);

struct Trajectory {
    std::vector<double> times;
    std::vector<SyncState> states;
    std::vector<double> sync_power;   // P_syn_max sin(delta), pu
    std::vector<double> current_mag;  // |I_v|, pu
    std::optional<double> los_time;
    double ssi = 1.0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// Right-hand side of the relative swing equation.
[[nodiscard]] SyncState derivative(const RelativeSwingModel& model, const SyncState& s);

/// One classical RK4 step. Throws IntegrationDivergedError on a non-finite result.
[[nodiscard]] SyncState step_rk4(const RelativeSwingModel& model, const SyncState& s, double dt);

/// Lyapunov function of the relative model,
///   V = H_vg domega^2 - (P_syn_ref delta + P_syn_max cos delta) / Omega_ref,
/// constant along undamped trajectories and non-increasing with damping.
[[nodiscard]] double energy(const RelativeSwingModel& model, const SyncState& s);

struct SimOptions {
    double dt_s = 1e-4;
    std::size_t record_every = 1;  // keep every n-th sample; times stay uniform
    bool stop_at_los = false;
};

/// Integrates the reduced model from the pre-fault SEP through the scenario
/// stages. The model is rebuilt at each stage boundary (first sample at or past
/// the switching time); the state is continuous across it.
[[nodiscard]] Trajectory simulate_reduced(const VsgParams& vsg, const SgParams& sg,
                                          const LoadParams& load, const BaseQuantities& base,
                                          const FaultScenario& scenario,
                                          const SimOptions& options = {});

/// Same scenario on the four-state model (theta_v, domega_v, theta_g, domega_g),
/// reported as the relative angle and frequency. Starts from the pre-fault
/// steady state, where both machines share the frequency deviation that lets
/// their dampings absorb the generation surplus.
[[nodiscard]] Trajectory simulate_full(const VsgParams& vsg, const SgParams& sg,
                                       const LoadParams& load, const BaseQuantities& base,
                                       const FaultScenario& scenario,
                                       const SimOptions& options = {});

/// Integrates a single fixed model from `initial` for `duration` seconds.
[[nodiscard]] std::vector<SyncState> integrate(const RelativeSwingModel& model,
                                               const SyncState& initial, double duration,
                                               double dt);

/// First sample time at which the angle is past the forward UEP moving forward,
/// or past the backward UEP moving backward.
[[nodiscard]] std::optional<double> detect_los(const Trajectory& trajectory,
                                               const RelativeSwingModel& model);

/// True when `s` is past a UEP of `eq` and still moving away from the SEP.
[[nodiscard]] bool past_uep(const Equilibria& eq, const SyncState& s);

/// (2 pi - delta_max) / (2 pi + delta_max) with the signed maximum angle.
[[nodiscard]] double ssi(const Trajectory& trajectory);

/// |E_v e^{j delta} - E_g| / X_sum. Throws SingularNetworkError when X_sum = 0.
[[nodiscard]] double current_magnitude(double vsg_voltage_pu, double sg_voltage_pu,
                                       double delta_rad, double total_reactance_pu);

/// Current magnitude for each sample, with the stage parameters in force at
/// that sample's time.
[[nodiscard]] std::vector<double> current_trace(const Trajectory& trajectory,
                                                const VsgParams& vsg, const SgParams& sg,
                                                const FaultScenario& scenario);

}  // namespace syncstab
