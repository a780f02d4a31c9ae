#pragma once

// Fixtures and independent numerical oracles shared by the test binaries.
// Nothing here calls into the code under test except to build inputs.

#include "syncstab/core_model.hpp"
#include "syncstab/transient_sim.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace syncstab::test {

inline constexpr double kPi = std::numbers::pi;

inline BaseQuantities ref_base() {
    return BaseQuantities{95.22, 1000.0, 50.0};
}

// Reactances straight from 2 pi f L / (U^2/S), computed here rather than
// through reactance_from_inductance.
inline double ref_reactance(double henries) {
    return 2.0 * kPi * 50.0 * henries / (95.22 * 95.22 / 1000.0);
}

inline SgParams ref_sg() {
    SgParams sg;
    sg.inertia_s = 40.0;
    sg.damping_pu = 20.0;
    sg.mechanical_power_pu = 1.0;
    sg.voltage_pu = 1.0;
    sg.line_reactance_pu = ref_reactance(2.9e-3);
    return sg;
}

/// VSG with D_v = 0.5 H_v.
inline VsgParams ref_vsg(double inertia_s = 20.0) {
    VsgParams v;
    v.inertia_s = inertia_s;
    v.damping_pu = 0.5 * inertia_s;
    v.power_reference_pu = 0.3;
    v.internal_voltage_pu = 1.0;
    v.line_reactance_pu = ref_reactance(9.2e-3);
    v.virtual_reactance_pu = 0.0;
    return v;
}

inline LoadParams ref_load() {
    return LoadParams{1.0};
}

/// Fault at 0.5 s to `fault_voltage`, virtual impedance 1.45 mH switched in.
inline FaultScenario ref_scenario(double fault_voltage = 0.2, double t_end = 10.0) {
    FaultScenario sc;
    sc.t_end_s = t_end;
    sc.t_fault_s = 0.5;
    sc.prefault = StageParams{1.0, 0.0, 0.3};
    sc.faulted = StageParams{fault_voltage, ref_reactance(1.45e-3), 0.3};
    return sc;
}

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 10000) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

/// Composite trapezoid rule.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n = 10000) {
    const double h = (b - a) / n;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) {
        sum += f(a + i * h);
    }
    return sum * h;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Period of the undamped pendulum-like swing
///   2H d(dw)/dt = -Pmax sin(delta),  d(delta)/dt = Omega dw
/// released from rest at amplitude `amplitude`: T = 4 K(sin(a/2)) / w0,
/// w0 = sqrt(Omega Pmax / (2H)).
inline double pendulum_period(double inertia_s, double p_max, double omega_ref, double amplitude) {
    const double w0 = std::sqrt(omega_ref * p_max / (2.0 * inertia_s));
    return 4.0 * std::comp_ellint_1(std::sin(amplitude / 2.0)) / w0;
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

}  // namespace syncstab::test
