#pragma once

// Coordinated stabilisation: inertia matching plus virtual-impedance setting.
//
//   H_v   = (P_vref / P_net) H_g
//   X_i   = max{ (H_g/H_v) X_g - X_v,  |E_v e^{j delta_u} - E_g| / I_lim - X_v - X_g,  0 }
//
// P_net is evaluated with the fault-on load power, so the designed fault-on
// model has P_syn_ref = 0 and hence lambda = 1 and delta_u = pi.

#include "syncstab/core_model.hpp"

namespace syncstab {

struct DesignInput {
    SgParams sg;      // sg.voltage_pu is the pre-fault voltage
    VsgParams vsg;    // pre-design VSG; power_reference_pu is the fault-on reference
    LoadParams load;
    double fault_voltage_pu = 0.2;   // E_gf
    double current_limit_pu = 1.8;   // I_lim
};

void validate(const DesignInput& input);

enum class BindingConstraint { None, InertiaStrengthMatch, CurrentLimit };

[[nodiscard]] const char* to_string(BindingConstraint b);

struct DesignOutput {
    double inertia_s = 0.0;            // H_v,set
    double damping_pu = 0.0;           // D_v,set
    double virtual_reactance_pu = 0.0; // X_i,set
    BindingConstraint binding = BindingConstraint::None;
    double predicted_max_current_pu = 0.0;  // I_vmax at the fault-on UEP
    double predicted_lambda = 0.0;
};

struct InertiaSetting {
    double inertia_s = 0.0;
    double damping_pu = 0.0;
};

/// H_v = (P_vref/P_net) H_g, with D_v = (D_g/H_g) H_v so the damping ratios
/// stay equal. Throws DesignInfeasibleError unless P_net > 0 and P_vref > 0.
[[nodiscard]] InertiaSetting match_inertia(double vsg_power_reference_pu, double net_power_pu,
                                           const SgParams& sg);

/// |E_v e^{j delta_u} - E_g| / X_sum.
[[nodiscard]] double max_fault_current(double vsg_voltage_pu, double sg_voltage_pu,
                                       double uep_rad, double total_reactance_pu);

/// Smallest X_i >= 0 keeping I_vmax <= I_lim for a given UEP angle.
[[nodiscard]] double min_impedance_for_limit(double vsg_voltage_pu, double sg_voltage_pu,
                                             double uep_rad, double current_limit_pu,
                                             double vsg_line_reactance_pu,
                                             double sg_line_reactance_pu);

/// Same bound, but with delta_u = pi - asin(P_syn_ref / P_syn_max(X_i))
/// evaluated at the returned X_i itself. `sync_power_reference_pu` does not
/// depend on X_i. Throws DesignInfeasibleError if the iteration fails to
/// converge.
[[nodiscard]] double min_impedance_for_limit_consistent(double vsg_voltage_pu,
                                                        double sg_voltage_pu,
                                                        double sync_power_reference_pu,
                                                        double current_limit_pu,
                                                        double vsg_line_reactance_pu,
                                                        double sg_line_reactance_pu);

/// (H_g/H_v) X_g - X_v; the inertia-strength match c = 1/(a+b). May be negative.
[[nodiscard]] double matched_impedance(double sg_inertia_s, double vsg_inertia_s,
                                       double sg_line_reactance_pu,
                                       double vsg_line_reactance_pu);

struct ImpedanceSetting {
    double virtual_reactance_pu = 0.0;
    BindingConstraint binding = BindingConstraint::None;
    double uep_rad = 0.0;  // fault-on UEP used for the current bound
};

[[nodiscard]] ImpedanceSetting set_virtual_impedance(const DesignInput& input,
                                                     double vsg_inertia_s);

[[nodiscard]] DesignOutput design(const DesignInput& input);

/// The input's VSG with the design applied (H_v, D_v, X_i).
[[nodiscard]] VsgParams apply_design(VsgParams vsg, const DesignOutput& out);

}  // namespace syncstab
