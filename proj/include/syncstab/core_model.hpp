#pragma once

// Parameter sets of the VSG-SG two-machine system and its reduction to the
// relative swing equation
//
//   d(delta)/dt    = Omega_ref * domega
//   2 H_vg d(domega)/dt = P_syn_ref - P_syn_max sin(delta) - D_vg domega
//
// All powers, voltages and reactances are system-base per-unit. Machine-base
// or SI quantities are converted once at ingestion.

#include <numbers>

namespace syncstab {

/// System base. The reference angular velocity is derived, never stored.
struct BaseQuantities {
    double rated_voltage_v = 0.0;
    double rated_power_w = 0.0;
    double rated_frequency_hz = 0.0;

    [[nodiscard]] double reference_angular_velocity() const {
        return 2.0 * std::numbers::pi * rated_frequency_hz;
    }
    [[nodiscard]] double impedance_base_ohm() const {
        return rated_voltage_v * rated_voltage_v / rated_power_w;
    }
};

struct VsgParams {
    double inertia_s = 0.0;             // H_v
    double damping_pu = 0.0;            // D_v
    double power_reference_pu = 0.0;    // P_vref
    double internal_voltage_pu = 1.0;   // E_v
    double line_reactance_pu = 0.0;     // X_v
    double virtual_reactance_pu = 0.0;  // X_i
    double rated_power_pu = 1.0;        // S_v on the system base
};

struct SgParams {
    double inertia_s = 0.0;           // H_g
    double damping_pu = 0.0;          // D_g
    double mechanical_power_pu = 0.0; // P_m
    double voltage_pu = 1.0;          // E_g
    double line_reactance_pu = 0.0;   // X_g
    double rated_power_pu = 1.0;      // S_g on the system base
};

/// Purely resistive load.
struct LoadParams {
    double resistance_pu = 1.0;  // R_L
};

struct RelativeSwingModel {
    double sync_inertia_s = 0.0;           // H_vg
    double sync_damping_pu = 0.0;          // D_vg
    double sync_power_reference_pu = 0.0;  // P_syn,ref
    double sync_power_max_pu = 0.0;        // P_syn,max
    double reference_angular_velocity = 100.0 * std::numbers::pi;  // rad/s

    // False when D_v/H_v != D_g/H_g; the coefficients are still filled in but
    // the reduced model no longer reproduces the two-machine dynamics exactly.
    bool damping_ratio_matched = true;
};

// Each validate() throws InvariantError naming the offending field.
void validate(const BaseQuantities& base);
void validate(const VsgParams& vsg);
void validate(const SgParams& sg);
void validate(const LoadParams& load);

/// X = 2 pi f_n L / (U_n^2 / S_n). Throws DomainError for L < 0.
[[nodiscard]] double reactance_from_inductance(double inductance_h, const BaseQuantities& base);

/// P_L = E_g^2 / R_L.
[[nodiscard]] double load_power(double sg_voltage_pu, const LoadParams& load);

/// P_net = P_m - P_L, the power the SG has left after feeding the load.
[[nodiscard]] inline double net_power(double mechanical_power_pu, double load_power_pu) {
    return mechanical_power_pu - load_power_pu;
}

/// X_sum = X_i + X_v + X_g.
[[nodiscard]] double total_reactance(const VsgParams& vsg, const SgParams& sg);

/// True iff |D_v/H_v - D_g/H_g| <= tolerance * D_g/H_g.
[[nodiscard]] bool check_damping_ratio(const VsgParams& vsg, const SgParams& sg, double tolerance);

inline constexpr double kDampingRatioTolerance = 1e-9;

/// Reduces the two-machine system to the relative swing model. The SG voltage
/// in `sg` is the one in force for the stage being modelled; the load power is
/// recomputed from it. A damping-ratio mismatch is reported through
/// RelativeSwingModel::damping_ratio_matched, not by throwing.
/// Throws SingularNetworkError when X_sum = 0.
[[nodiscard]] RelativeSwingModel reduce(const VsgParams& vsg, const SgParams& sg,
                                        const LoadParams& load, const BaseQuantities& base,
                                        double ratio_tolerance = kDampingRatioTolerance);

}  // namespace syncstab
