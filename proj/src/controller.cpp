#include "syncstab/controller.hpp"

#include "syncstab/equilibrium_index.hpp"
#include "syncstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace syncstab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxIterations = 100;

// Below this |P_syn_ref| the inertias count as matched and delta_u = pi.
constexpr double kMatchedTolerance = 1e-12;

double fault_net_power(const DesignInput& input) {
    return net_power(input.sg.mechanical_power_pu, load_power(input.fault_voltage_pu, input.load));
}

double sync_power_reference(const DesignInput& input, double vsg_inertia_s) {
    const double hg = input.sg.inertia_s;
    return (hg * input.vsg.power_reference_pu - vsg_inertia_s * fault_net_power(input)) /
           (vsg_inertia_s + hg);
}

// Forward UEP for a given X_sum; the saddle-node angle pi/2 when no SEP exists.
double uep_for(double vsg_voltage, double sg_voltage, double sync_power_reference,
               double x_sum) {
    const double p_max = vsg_voltage * sg_voltage / x_sum;
    if (p_max == 0.0) {
        return kPi / 2.0;
    }
    return kPi - std::asin(std::clamp(sync_power_reference / p_max, -1.0, 1.0));
}

}  // namespace

void validate(const DesignInput& input) {
    validate(input.sg);
    validate(input.vsg);
    validate(input.load);
    if (!(input.current_limit_pu > 0.0)) {
        throw InvariantError("design: current limit must be > 0");
    }
    if (!(input.fault_voltage_pu >= 0.0 && input.fault_voltage_pu <= input.sg.voltage_pu)) {
        throw InvariantError("design: fault voltage must lie in [0, pre-fault E_g]");
    }
}

const char* to_string(BindingConstraint b) {
    switch (b) {
        case BindingConstraint::None: return "None";
        case BindingConstraint::InertiaStrengthMatch: return "InertiaStrengthMatch";
        case BindingConstraint::CurrentLimit: return "CurrentLimit";
    }
    return "?";
}

InertiaSetting match_inertia(double vsg_power_reference_pu, double net_power_pu,
                             const SgParams& sg) {
    if (!(net_power_pu > 0.0)) {
        throw DesignInfeasibleError("inertia matching needs P_net > 0");
    }
    if (!(vsg_power_reference_pu > 0.0)) {
        throw DesignInfeasibleError("inertia matching needs P_vref > 0");
    }
    const double hv = vsg_power_reference_pu / net_power_pu * sg.inertia_s;
    return InertiaSetting{hv, sg.damping_pu / sg.inertia_s * hv};
}

double max_fault_current(double vsg_voltage_pu, double sg_voltage_pu, double uep_rad,
                         double total_reactance_pu) {
    if (!(total_reactance_pu > 0.0)) {
        throw SingularNetworkError("X_sum must be > 0");
    }
    const double squared = vsg_voltage_pu * vsg_voltage_pu + sg_voltage_pu * sg_voltage_pu -
                           2.0 * vsg_voltage_pu * sg_voltage_pu * std::cos(uep_rad);
    return std::sqrt(std::max(squared, 0.0)) / total_reactance_pu;
}

double min_impedance_for_limit(double vsg_voltage_pu, double sg_voltage_pu, double uep_rad,
                               double current_limit_pu, double vsg_line_reactance_pu,
                               double sg_line_reactance_pu) {
    if (!(current_limit_pu > 0.0)) {
        throw DomainError("current limit must be > 0");
    }
    // max_fault_current(...) * X_sum with X_sum factored out.
    const double phasor_gap = max_fault_current(vsg_voltage_pu, sg_voltage_pu, uep_rad, 1.0);
    return std::max(phasor_gap / current_limit_pu - vsg_line_reactance_pu - sg_line_reactance_pu,
                    0.0);
}

double min_impedance_for_limit_consistent(double vsg_voltage_pu, double sg_voltage_pu,
                                          double sync_power_reference_pu,
                                          double current_limit_pu, double vsg_line_reactance_pu,
                                          double sg_line_reactance_pu) {
    const double x_line = vsg_line_reactance_pu + sg_line_reactance_pu;
    const auto requirement = [&](double x_i) {
        const double uep = uep_for(vsg_voltage_pu, sg_voltage_pu, sync_power_reference_pu,
                                   x_line + x_i);
        return min_impedance_for_limit(vsg_voltage_pu, sg_voltage_pu, uep, current_limit_pu,
                                       vsg_line_reactance_pu, sg_line_reactance_pu);
    };

    // A larger X_i lowers P_syn_max, pulls delta_u toward pi/2 and so never
    // raises the requirement: requirement(x) - x is strictly decreasing and the
    // fixed point is bracketed by [0, (E_v + E_g)/I_lim].
    if (requirement(0.0) == 0.0) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = (vsg_voltage_pu + sg_voltage_pu) / current_limit_pu;
    for (int i = 0; i < kMaxIterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gap = requirement(mid) - mid;
        if (!std::isfinite(gap)) {
            break;
        }
        (gap > 0.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) {
            return hi;
        }
    }
    throw DesignInfeasibleError("virtual impedance fixed point did not converge");
}

double matched_impedance(double sg_inertia_s, double vsg_inertia_s, double sg_line_reactance_pu,
                         double vsg_line_reactance_pu) {
    if (!(vsg_inertia_s > 0.0)) {
        throw DomainError("H_v must be > 0");
    }
    return sg_inertia_s / vsg_inertia_s * sg_line_reactance_pu - vsg_line_reactance_pu;
}

ImpedanceSetting set_virtual_impedance(const DesignInput& input, double vsg_inertia_s) {
    validate(input);
    const VsgParams& vsg = input.vsg;
    const SgParams& sg = input.sg;
    const double e_v = vsg.internal_voltage_pu;
    const double e_gf = input.fault_voltage_pu;
    const double p_syn_ref = sync_power_reference(input, vsg_inertia_s);

    const double matched =
        matched_impedance(sg.inertia_s, vsg_inertia_s, sg.line_reactance_pu, vsg.line_reactance_pu);
    double for_limit = 0.0;
    if (std::abs(p_syn_ref) <= kMatchedTolerance) {
        for_limit = min_impedance_for_limit(e_v, e_gf, kPi, input.current_limit_pu,
                                            vsg.line_reactance_pu, sg.line_reactance_pu);
    } else {
        for_limit = min_impedance_for_limit_consistent(e_v, e_gf, p_syn_ref, input.current_limit_pu,
                                                       vsg.line_reactance_pu, sg.line_reactance_pu);
    }

    ImpedanceSetting out;
    if (matched <= 0.0 && for_limit <= 0.0) {
        out.virtual_reactance_pu = 0.0;
        out.binding = BindingConstraint::None;
    } else if (matched >= for_limit) {
        out.virtual_reactance_pu = matched;
        out.binding = BindingConstraint::InertiaStrengthMatch;
    } else {
        out.virtual_reactance_pu = for_limit;
        out.binding = BindingConstraint::CurrentLimit;
    }
    out.uep_rad = std::abs(p_syn_ref) <= kMatchedTolerance
                      ? kPi
                      : uep_for(e_v, e_gf, p_syn_ref,
                                out.virtual_reactance_pu + vsg.line_reactance_pu +
                                    sg.line_reactance_pu);
    return out;
}

DesignOutput design(const DesignInput& input) {
    validate(input);
    const InertiaSetting inertia =
        match_inertia(input.vsg.power_reference_pu, fault_net_power(input), input.sg);
    const ImpedanceSetting impedance = set_virtual_impedance(input, inertia.inertia_s);

    DesignOutput out;
    out.inertia_s = inertia.inertia_s;
    out.damping_pu = inertia.damping_pu;
    out.virtual_reactance_pu = impedance.virtual_reactance_pu;
    out.binding = impedance.binding;

    const VsgParams designed = apply_design(input.vsg, out);
    SgParams faulted = input.sg;
    faulted.voltage_pu = input.fault_voltage_pu;
    const double x_sum = total_reactance(designed, faulted);
    out.predicted_max_current_pu = max_fault_current(designed.internal_voltage_pu,
                                                     input.fault_voltage_pu, impedance.uep_rad, x_sum);
    const RelativeSwingModel model =
        reduce(designed, faulted, input.load, BaseQuantities{1.0, 1.0, 50.0});
    out.predicted_lambda = model.sync_power_max_pu > 0.0 ? stability_index(model)
                                                         : -std::numeric_limits<double>::infinity();
    return out;
}

VsgParams apply_design(VsgParams vsg, const DesignOutput& out) {
    vsg.inertia_s = out.inertia_s;
    vsg.damping_pu = out.damping_pu;
    vsg.virtual_reactance_pu = out.virtual_reactance_pu;
    return vsg;
}

}  // namespace syncstab
