#include "syncstab/equilibrium_index.hpp"

#include "syncstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace syncstab {

namespace {

constexpr double kPi = std::numbers::pi;

Equilibria from_sep(double sep) {
    return Equilibria{sep, kPi - sep, -kPi - sep, true};
}

// Restricts (0, inf) by `slope * r > offset`.
void intersect_halfline(double slope, double offset, RatioInterval& out) {
    if (slope > 0.0) {
        out.lower = std::max(out.lower, offset / slope);
    } else if (slope < 0.0) {
        out.upper = std::min(out.upper, offset / slope);
    } else if (!(0.0 > offset)) {
        out.upper = out.lower;
    }
}

}  // namespace

bool sep_exists(const RelativeSwingModel& model) {
    return std::abs(model.sync_power_reference_pu) < model.sync_power_max_pu;
}

Equilibria equilibria(const RelativeSwingModel& model) {
    const double p_ref = model.sync_power_reference_pu;
    const double p_max = model.sync_power_max_pu;
    if (p_max == 0.0 && p_ref == 0.0) {
        throw DegenerateModelError("P_syn_max = P_syn_ref = 0: every angle is an equilibrium");
    }
    if (!sep_exists(model)) {
        return Equilibria{};
    }
    return from_sep(std::asin(p_ref / p_max));
}

Equilibria limiting_equilibria(const RelativeSwingModel& model) {
    if (sep_exists(model)) {
        return equilibria(model);
    }
    const double p_ref = model.sync_power_reference_pu;
    double ratio = p_ref >= 0.0 ? 1.0 : -1.0;
    if (model.sync_power_max_pu > 0.0) {
        ratio = std::clamp(p_ref / model.sync_power_max_pu, -1.0, 1.0);
    }
    Equilibria eq = from_sep(std::asin(ratio));
    eq.exists = false;
    return eq;
}

double stability_index(const RelativeSwingModel& model) {
    if (model.sync_power_max_pu == 0.0) {
        throw DegenerateModelError("stability index undefined for P_syn_max = 0");
    }
    return 1.0 - std::abs(model.sync_power_reference_pu) / model.sync_power_max_pu;
}

double scr(const VsgParams& vsg, const SgParams& sg) {
    const double x = sg.line_reactance_pu + vsg.line_reactance_pu;
    if (x == 0.0) {
        throw SingularNetworkError("X_g + X_v is zero");
    }
    return 1.0 / x;
}

double lambda_from_scr(double scr_value, double virtual_reactance_pu,
                       double sync_power_reference_pu, double vsg_voltage_pu,
                       double sg_voltage_pu) {
    if (!(scr_value > 0.0)) {
        throw DomainError("SCR must be > 0");
    }
    const double voltage_product = vsg_voltage_pu * sg_voltage_pu;
    if (voltage_product == 0.0) {
        throw DegenerateModelError("E_v E_g = 0");
    }
    return 1.0 - (1.0 / scr_value + virtual_reactance_pu) * std::abs(sync_power_reference_pu) /
                     voltage_product;
}

double lambda_from_inertia(double vsg_inertia_s, double sg_inertia_s,
                           double vsg_power_reference_pu, double net_power_pu,
                           double vsg_voltage_pu, double sg_voltage_pu,
                           double total_reactance_pu) {
    const double h_total = vsg_inertia_s + sg_inertia_s;
    const double p_max = sg_voltage_pu * vsg_voltage_pu / total_reactance_pu;
    if (p_max == 0.0) {
        throw DegenerateModelError("E_v E_g = 0");
    }
    const double p_ref = sg_inertia_s / h_total * vsg_power_reference_pu -
                         vsg_inertia_s / h_total * net_power_pu;
    return 1.0 - std::abs(p_ref) / p_max;
}

RatioInterval sep_ratio_bounds(double vsg_power_reference_pu, double net_power_pu,
                               double vsg_voltage_pu, double sg_voltage_pu,
                               double total_reactance_pu) {
    if (!(vsg_power_reference_pu > 0.0)) {
        throw DomainError("P_vref must be > 0");
    }
    if (!(total_reactance_pu > 0.0)) {
        throw SingularNetworkError("X_sum must be > 0");
    }
    const double p_max = sg_voltage_pu * vsg_voltage_pu / total_reactance_pu;
    const double p_ref = vsg_power_reference_pu;
    const double p_net = net_power_pu;

    // With r = H_v/H_g, an SEP exists iff |P_vref - r P_net| < P_max (1 + r),
    // i.e. both
    //   r (P_net + P_max) > P_vref - P_max   (binds below the matched ratio)
    //   r (P_max - P_net) > -(P_max + P_vref) (binds above it, severe faults)
    RatioInterval out;
    out.degenerate_net_power = !(p_net > 0.0);
    intersect_halfline(p_net + p_max, p_ref - p_max, out);
    intersect_halfline(p_max - p_net, -(p_max + p_ref), out);
    if (out.empty()) {
        out.upper = out.lower;
    }
    return out;
}

double dlambda_dratio(double vsg_power_reference_pu, double net_power_pu, double vsg_voltage_pu,
                      double sg_voltage_pu, double total_reactance_pu, double vsg_inertia_s,
                      double sg_inertia_s) {
    const double p_max = sg_voltage_pu * vsg_voltage_pu / total_reactance_pu;
    if (p_max == 0.0) {
        throw DegenerateModelError("E_v E_g = 0");
    }
    // Sign of P_syn_ref picks the branch: positive below the matched ratio.
    const double imbalance =
        sg_inertia_s * vsg_power_reference_pu - vsg_inertia_s * net_power_pu;
    if (imbalance == 0.0) {
        throw NonDifferentiableError("lambda has a kink at H_v/H_g = P_vref/P_net");
    }
    const double h_total = vsg_inertia_s + sg_inertia_s;
    const double magnitude = sg_inertia_s * sg_inertia_s *
                             (vsg_power_reference_pu + net_power_pu) / (p_max * h_total * h_total);
    return imbalance > 0.0 ? magnitude : -magnitude;
}

void validate(const PenetrationModel& pm) {
    const auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw InvariantError(what);
        }
    };
    require(pm.line_drop_ratio >= 0.0, "penetration: a must be >= 0");
    require(pm.virtual_drop_ratio >= 0.0, "penetration: b must be >= 0");
    require(pm.inertia_level_ratio > 0.0, "penetration: c must be > 0");
    require(pm.capacity_ratio > 0.0, "penetration: eta must be > 0");
    require(pm.power_factor > 0.0 && pm.power_factor <= 1.0,
            "penetration: power factor must lie in (0, 1]");
    require(pm.internal_voltage_pu > 0.0, "penetration: E_v must be > 0");
}

VsgParams make_vsg(const PenetrationModel& pm, const SgParams& sg) {
    validate(pm);
    validate(sg);
    const double s_v = pm.capacity_ratio * sg.rated_power_pu;
    VsgParams vsg;
    vsg.rated_power_pu = s_v;
    vsg.line_reactance_pu = pm.line_drop_ratio * sg.line_reactance_pu * sg.rated_power_pu / s_v;
    vsg.virtual_reactance_pu =
        pm.virtual_drop_ratio * sg.line_reactance_pu * sg.rated_power_pu / s_v;
    vsg.inertia_s = pm.inertia_level_ratio * sg.inertia_s * s_v / sg.rated_power_pu;
    vsg.damping_pu = sg.damping_pu / sg.inertia_s * vsg.inertia_s;
    vsg.power_reference_pu = pm.power_factor * s_v;
    vsg.internal_voltage_pu = pm.internal_voltage_pu;
    return vsg;
}

SgParams make_sg(const PenetrationModel& pm, const SgParams& sg) {
    SgParams out = sg;
    out.mechanical_power_pu = pm.power_factor * sg.rated_power_pu;
    return out;
}

EtaSensitivity dlambda_deta(const PenetrationModel& pm, const SgParams& sg,
                            double load_power_pu) {
    validate(pm);
    const double c = pm.inertia_level_ratio;
    const double strength = pm.line_drop_ratio + pm.virtual_drop_ratio;
    const double voltage_product = sg.voltage_pu * pm.internal_voltage_pu;
    if (voltage_product == 0.0) {
        throw DegenerateModelError("E_v E_g = 0");
    }
    const double shared =
        std::abs((1.0 - c) * pm.power_factor * sg.rated_power_pu + c * load_power_pu);
    const double denom = voltage_product * (c * pm.capacity_ratio + 1.0) *
                         (c * pm.capacity_ratio + 1.0);
    // 1 - c(a+b) written as (a+b)(1/(a+b) - c): exactly zero when c = 1/(a+b).
    const double mismatch = strength > 0.0 ? strength * (1.0 / strength - c) : 1.0;
    const double value = -sg.line_reactance_pu * shared * mismatch / denom;
    return EtaSensitivity{value, (value > 0.0) - (value < 0.0)};
}

double lambda_of_eta(const PenetrationModel& pm, const SgParams& sg, const LoadParams& load,
                     double sg_fault_voltage_pu, const BaseQuantities& base) {
    const VsgParams vsg = make_vsg(pm, sg);
    SgParams faulted = make_sg(pm, sg);
    faulted.voltage_pu = sg_fault_voltage_pu;
    return stability_index(reduce(vsg, faulted, load, base));
}

}  // namespace syncstab
