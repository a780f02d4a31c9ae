#include "syncstab/core_model.hpp"

#include "syncstab/errors.hpp"

#include <cmath>
#include <string>

namespace syncstab {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw InvariantError(what);
    }
}

bool finite_all(std::initializer_list<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

}  // namespace

void validate(const BaseQuantities& base) {
    require(finite_all({base.rated_voltage_v, base.rated_power_w, base.rated_frequency_hz}),
            "base: non-finite value");
    require(base.rated_voltage_v > 0.0, "base.rated_voltage must be > 0");
    require(base.rated_power_w > 0.0, "base.rated_power must be > 0");
    require(base.rated_frequency_hz > 0.0, "base.rated_frequency must be > 0");
}

void validate(const VsgParams& vsg) {
    require(finite_all({vsg.inertia_s, vsg.damping_pu, vsg.power_reference_pu,
                        vsg.internal_voltage_pu, vsg.line_reactance_pu, vsg.virtual_reactance_pu,
                        vsg.rated_power_pu}),
            "vsg: non-finite value");
    require(vsg.inertia_s > 0.0, "vsg.inertia must be > 0");
    require(vsg.damping_pu >= 0.0, "vsg.damping must be >= 0");
    require(vsg.internal_voltage_pu > 0.0, "vsg.internal_voltage must be > 0");
    require(vsg.line_reactance_pu > 0.0, "vsg.line_reactance must be > 0");
    require(vsg.virtual_reactance_pu >= 0.0, "vsg.virtual_reactance must be >= 0");
    require(vsg.rated_power_pu > 0.0, "vsg.rated_power must be > 0");
}

void validate(const SgParams& sg) {
    require(finite_all({sg.inertia_s, sg.damping_pu, sg.mechanical_power_pu, sg.voltage_pu,
                        sg.line_reactance_pu, sg.rated_power_pu}),
            "sg: non-finite value");
    require(sg.inertia_s > 0.0, "sg.inertia must be > 0");
    require(sg.damping_pu >= 0.0, "sg.damping must be >= 0");
    require(sg.voltage_pu >= 0.0, "sg.voltage must be >= 0");
    require(sg.line_reactance_pu > 0.0, "sg.line_reactance must be > 0");
    require(sg.rated_power_pu > 0.0, "sg.rated_power must be > 0");
}

void validate(const LoadParams& load) {
    require(std::isfinite(load.resistance_pu) && load.resistance_pu > 0.0,
            "load.resistance must be > 0");
}

double reactance_from_inductance(double inductance_h, const BaseQuantities& base) {
    if (!(inductance_h >= 0.0)) {
        throw DomainError("inductance must be >= 0, got " + std::to_string(inductance_h));
    }
    validate(base);
    return base.reference_angular_velocity() * inductance_h / base.impedance_base_ohm();
}

double load_power(double sg_voltage_pu, const LoadParams& load) {
    if (!(sg_voltage_pu >= 0.0)) {
        throw DomainError("SG voltage must be >= 0");
    }
    validate(load);
    return sg_voltage_pu * sg_voltage_pu / load.resistance_pu;
}

double total_reactance(const VsgParams& vsg, const SgParams& sg) {
    return vsg.virtual_reactance_pu + vsg.line_reactance_pu + sg.line_reactance_pu;
}

bool check_damping_ratio(const VsgParams& vsg, const SgParams& sg, double tolerance) {
    const double vsg_ratio = vsg.damping_pu / vsg.inertia_s;
    const double sg_ratio = sg.damping_pu / sg.inertia_s;
    return std::abs(vsg_ratio - sg_ratio) <= tolerance * sg_ratio;
}

RelativeSwingModel reduce(const VsgParams& vsg, const SgParams& sg, const LoadParams& load,
                          const BaseQuantities& base, double ratio_tolerance) {
    validate(vsg);
    validate(sg);
    validate(load);
    validate(base);

    const double x_sum = total_reactance(vsg, sg);
    if (x_sum == 0.0) {
        throw SingularNetworkError("total reactance X_i + X_v + X_g is zero");
    }

    const double hv = vsg.inertia_s;
    const double hg = sg.inertia_s;
    const double h_total = hv + hg;
    const double p_net = net_power(sg.mechanical_power_pu, load_power(sg.voltage_pu, load));

    RelativeSwingModel model;
    model.sync_inertia_s = hv * hg / h_total;
    model.sync_damping_pu = hg * vsg.damping_pu / h_total;
    model.sync_power_reference_pu = (hg * vsg.power_reference_pu - hv * p_net) / h_total;
    model.sync_power_max_pu = sg.voltage_pu * vsg.internal_voltage_pu / x_sum;
    model.reference_angular_velocity = base.reference_angular_velocity();
    model.damping_ratio_matched = check_damping_ratio(vsg, sg, ratio_tolerance);
    return model;
}

}  // namespace syncstab
