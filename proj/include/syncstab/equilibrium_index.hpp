#pragma once

// Equilibria of the relative swing model and the stability-level index
//
//   lambda = 1 - |P_syn_ref| / P_syn_max
//
// together with its SCR form, its inertia-ratio form, the SEP-admissible range
// of the inertia matching constant H_v/H_g, and the two sensitivities used by
// the matching principles.

#include "syncstab/core_model.hpp"

#include <limits>

namespace syncstab {

struct Equilibria {
    double sep_rad = 0.0;           // in (-pi/2, pi/2)
    double uep_forward_rad = 0.0;   // pi - sep
    double uep_backward_rad = 0.0;  // -pi - sep
    bool exists = false;
};

/// |P_syn_ref| < P_syn_max.
[[nodiscard]] bool sep_exists(const RelativeSwingModel& model);

/// Angles are meaningless when `exists` is false.
/// Throws DegenerateModelError when P_syn_max = P_syn_ref = 0.
[[nodiscard]] Equilibria equilibria(const RelativeSwingModel& model);

/// Equilibria with the sine argument clamped to [-1, 1]. For a model without
/// an SEP this yields the saddle-node angles (+-pi/2), which the simulator uses
/// as loss-of-synchronism thresholds: past them the angle can only run away.
[[nodiscard]] Equilibria limiting_equilibria(const RelativeSwingModel& model);

/// Throws DegenerateModelError when P_syn_max = 0.
[[nodiscard]] double stability_index(const RelativeSwingModel& model);

/// gamma_SCR = 1 / (X_g + X_v). Throws SingularNetworkError on a zero sum.
[[nodiscard]] double scr(const VsgParams& vsg, const SgParams& sg);

/// lambda = 1 - (1/gamma + X_i) |P_syn_ref| / (E_v E_g).
[[nodiscard]] double lambda_from_scr(double scr_value, double virtual_reactance_pu,
                                     double sync_power_reference_pu, double vsg_voltage_pu,
                                     double sg_voltage_pu);

/// lambda written in terms of the two inertias (the inertia-ratio form).
[[nodiscard]] double lambda_from_inertia(double vsg_inertia_s, double sg_inertia_s,
                                         double vsg_power_reference_pu, double net_power_pu,
                                         double vsg_voltage_pu, double sg_voltage_pu,
                                         double total_reactance_pu);

/// Open interval of H_v/H_g for which an SEP exists. May be empty.
struct RatioInterval {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    // Set when P_net <= 0: the severe/shallow-fault classification does not
    // apply and the interval comes from the existence condition alone.
    bool degenerate_net_power = false;

    [[nodiscard]] bool empty() const { return !(lower < upper); }
    [[nodiscard]] bool bounded_above() const { return upper < std::numeric_limits<double>::infinity(); }
    [[nodiscard]] bool contains(double ratio) const { return ratio > lower && ratio < upper; }
};

[[nodiscard]] RatioInterval sep_ratio_bounds(double vsg_power_reference_pu, double net_power_pu,
                                             double vsg_voltage_pu, double sg_voltage_pu,
                                             double total_reactance_pu);

/// d lambda / d(H_v/H_g). Positive below the matched ratio P_vref/P_net,
/// negative above it. Throws NonDifferentiableError exactly at the kink.
[[nodiscard]] double dlambda_dratio(double vsg_power_reference_pu, double net_power_pu,
                                    double vsg_voltage_pu, double sg_voltage_pu,
                                    double total_reactance_pu, double vsg_inertia_s,
                                    double sg_inertia_s);

/// VSG sized relative to the SG through line-drop, virtual-drop, inertia-level
/// and capacity ratios at a shared pre-fault power factor.
struct PenetrationModel {
    double line_drop_ratio = 1.0;      // a:  X_v S_v = a X_g S_g
    double virtual_drop_ratio = 0.0;   // b:  X_i S_v = b X_g S_g
    double inertia_level_ratio = 1.0;  // c:  H_v / S_v = c H_g / S_g
    double capacity_ratio = 1.0;       // eta = S_v / S_g
    double power_factor = 1.0;         // P_vref / S_v = P_m / S_g
    double internal_voltage_pu = 1.0;  // E_v of the resulting VSG
};

void validate(const PenetrationModel& pm);

/// Builds the VSG implied by `pm` and `sg`. D_v keeps D_v/H_v = D_g/H_g.
[[nodiscard]] VsgParams make_vsg(const PenetrationModel& pm, const SgParams& sg);

/// The SG with P_m = cos(phi) S_g, as the shared power factor requires.
[[nodiscard]] SgParams make_sg(const PenetrationModel& pm, const SgParams& sg);

struct EtaSensitivity {
    double value = 0.0;
    int sign = 0;  // -1, 0, +1
};

/// d lambda / d eta in closed form, using sg.voltage_pu as E_g and the given
/// load power. Positive iff c > 1/(a+b).
[[nodiscard]] EtaSensitivity dlambda_deta(const PenetrationModel& pm, const SgParams& sg,
                                          double load_power_pu);

/// lambda of the fault-on model built from `pm`, with the SG voltage set to
/// `sg_fault_voltage_pu`.
[[nodiscard]] double lambda_of_eta(const PenetrationModel& pm, const SgParams& sg,
                                   const LoadParams& load, double sg_fault_voltage_pu,
                                   const BaseQuantities& base);

}  // namespace syncstab
