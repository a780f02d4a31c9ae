#include "support.hpp"

#include "syncstab/controller.hpp"
#include "syncstab/equilibrium_index.hpp"
#include "syncstab/errors.hpp"
#include "syncstab/transient_sim.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace syncstab;
using namespace syncstab::test;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DesignInput ref_input(double fault_voltage = 0.2, double current_limit = 1.8) {
    DesignInput in;
    in.sg = ref_sg();
    in.vsg = ref_vsg(70.0);
    in.vsg.virtual_reactance_pu = ref_reactance(1.45e-3);
    in.load = ref_load();
    in.fault_voltage_pu = fault_voltage;
    in.current_limit_pu = current_limit;
    return in;
}

FaultScenario designed_scenario(const DesignOutput& out, double fault_voltage) {
    FaultScenario sc = ref_scenario(fault_voltage);
    sc.faulted.virtual_reactance_pu = out.virtual_reactance_pu;
    return sc;
}

}  // namespace

TEST_CASE("inertia matching", "[controller]") {
    SgParams sg = ref_sg();
    const InertiaSetting s = match_inertia(0.3, 0.96, sg);
    CHECK_THAT(s.inertia_s, WithinRel(12.5, 1e-14));
    CHECK_THAT(s.damping_pu, WithinRel(6.25, 1e-14));
    CHECK(match_inertia(0.7, 0.7, sg).inertia_s == sg.inertia_s);
    CHECK_THROWS_AS(match_inertia(0.3, 0.0, sg), DesignInfeasibleError);
    CHECK_THROWS_AS(match_inertia(0.3, -0.2, sg), DesignInfeasibleError);
    CHECK_THROWS_AS(match_inertia(0.0, 0.5, sg), DesignInfeasibleError);

    // The matched model has zero synchronising reference and lambda = 1.
    VsgParams vsg = ref_vsg(s.inertia_s);
    vsg.damping_pu = s.damping_pu;
    sg.voltage_pu = 0.2;
    const RelativeSwingModel m = reduce(vsg, sg, ref_load(), ref_base());
    CHECK(std::abs(m.sync_power_reference_pu) < 1e-15);
    CHECK_THAT(stability_index(m), WithinAbs(1.0, 1e-15));
    CHECK(m.damping_ratio_matched);
}

TEST_CASE("maximum fault current", "[controller]") {
    CHECK_THAT(max_fault_current(1.0, 0.2, kPi, 0.5), WithinRel(2.4, 1e-14));
    CHECK(max_fault_current(0.8, 0.8, 0.0, 0.3) == 0.0);
    CHECK_THROWS_AS(max_fault_current(1.0, 0.2, kPi, 0.0), SingularNetworkError);
}

TEST_CASE("maximum fault current bounds a near-critical stable swing", "[controller]") {
    // Undamped fault-on swing released from rest just inside the critical
    // angle: the first swing reaches almost delta_u, where the current peaks.
    VsgParams vsg = ref_vsg(20.0);
    vsg.virtual_reactance_pu = ref_reactance(1.45e-3);
    vsg.damping_pu = 0.0;
    SgParams sg = ref_sg();
    sg.damping_pu = 0.0;
    sg.voltage_pu = 0.2;
    const RelativeSwingModel m = reduce(vsg, sg, ref_load(), ref_base());
    const Equilibria eq = equilibria(m);
    const double x_sum = total_reactance(vsg, sg);
    // Start from rest on the other side at the angle whose energy is just below the UEP level.
    const double level = energy(m, {eq.uep_backward_rad, 0.0});
    double lo = eq.sep_rad;
    double hi = eq.sep_rad + 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (energy(m, {mid, 0.0}) < level ? lo : hi) = mid;
    }
    const double start = eq.sep_rad + 0.999 * (lo - eq.sep_rad);
    const std::vector<SyncState> path = integrate(m, {start, 0.0}, 8.0, 1e-4);
    double peak = 0.0;
    for (const SyncState& s : path) {
        REQUIRE(s.delta_rad > eq.uep_backward_rad);
        peak = std::max(peak, current_magnitude(1.0, 0.2, s.delta_rad, x_sum));
    }
    CHECK_THAT(peak, WithinRel(max_fault_current(1.0, 0.2, eq.uep_backward_rad, x_sum), 0.02));
}

TEST_CASE("minimum impedance for the current limit", "[controller]") {
    const double xv = ref_vsg().line_reactance_pu;
    const double xg = ref_sg().line_reactance_pu;
    // Shallow dip with a small swing: the line reactance already limits the current.
    CHECK(min_impedance_for_limit(1.0, 0.9, 0.5, 1.8, xv, xg) == 0.0);
    // Deep fault, UEP at pi.
    const double x = min_impedance_for_limit(1.0, 0.2, kPi, 1.8, xv, xg);
    CHECK(x > 0.0);
    CHECK_THAT(max_fault_current(1.0, 0.2, kPi, x + xv + xg), WithinRel(1.8, 1e-12));
    CHECK_THROWS_AS(min_impedance_for_limit(1.0, 0.2, kPi, 0.0, xv, xg), DomainError);

    // Past pi/2, |E_v e^{j delta} - E_g| grows with E_g, so at a fixed UEP the
    // requirement is larger for the shallower fault.
    double previous = 0.0;
    for (double eg : {0.1, 0.2, 0.4, 0.6}) {
        const double req = min_impedance_for_limit(1.0, eg, 2.0, 1.8, xv, xg);
        const double oracle = std::sqrt(1.0 + eg * eg - 2.0 * eg * std::cos(2.0)) / 1.8 - xv - xg;
        CHECK_THAT(req, WithinAbs(std::max(oracle, 0.0), 1e-14));
        CHECK(req > previous);
        previous = req;
    }
}

TEST_CASE("self-consistent impedance satisfies its fixed point", "[controller]") {
    const double xv = ref_vsg().line_reactance_pu;
    const double xg = ref_sg().line_reactance_pu;
    for (double p_ref : {-0.13, -0.05, 0.08, 0.18}) {
        for (double eg : {0.1, 0.2, 0.5}) {
            const double x = min_impedance_for_limit_consistent(1.0, eg, p_ref, 1.8, xv, xg);
            CHECK(x >= 0.0);
            const double x_sum = x + xv + xg;
            const double p_max = eg / x_sum;
            const double uep = kPi - std::asin(std::clamp(p_ref / p_max, -1.0, 1.0));
            const double current = max_fault_current(1.0, eg, uep, x_sum);
            if (x > 0.0) {
                CHECK_THAT(current, WithinAbs(1.8, 1e-6));
            } else {
                CHECK(current <= 1.8 + 1e-9);
            }
        }
    }
    // Loose limit: no impedance needed.
    CHECK(min_impedance_for_limit_consistent(1.0, 0.2, -0.05, 10.0, xv, xg) == 0.0);
}

TEST_CASE("matched impedance", "[controller]") {
    CHECK(matched_impedance(30.0, 30.0, 0.2, 0.2) == 0.0);
    CHECK_THAT(matched_impedance(40.0, 12.5, 0.1005, 0.3188), WithinAbs(0.0028, 1e-12));
    CHECK_THROWS_AS(matched_impedance(40.0, 0.0, 0.1, 0.1), DomainError);

    // c = 1/(a+b) under the penetration definitions.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double hg = 40.0 * u(rng), hv = 20.0 * u(rng);
        const double xg = 0.1 * u(rng), xv = 0.05 * u(rng);
        const double sg = u(rng), sv = u(rng);
        const double xi = matched_impedance(hg, hv, xg, xv);
        const double a = xv * sv / (xg * sg);
        const double b = xi * sv / (xg * sg);
        const double c = (hv / sv) / (hg / sg);
        CHECK_THAT(c * (a + b), WithinRel(1.0, 1e-12));
    }
}

TEST_CASE("virtual impedance setting and binding constraint", "[controller]") {
    // Deep fault under the matched design: the current limit dominates.
    const DesignInput deep = ref_input(0.2);
    const ImpedanceSetting s = set_virtual_impedance(deep, 12.5);
    CHECK(s.binding == BindingConstraint::CurrentLimit);
    CHECK_THAT(s.uep_rad, WithinAbs(kPi, 1e-15));
    const double xl = deep.vsg.line_reactance_pu + deep.sg.line_reactance_pu;
    CHECK_THAT(s.virtual_reactance_pu, WithinRel(1.2 / 1.8 - xl, 1e-12));

    // Generous limit: inertia-strength matching binds.
    const DesignInput loose = ref_input(0.2, 10.0);
    const ImpedanceSetting m = set_virtual_impedance(loose, 12.5);
    CHECK(m.binding == BindingConstraint::InertiaStrengthMatch);
    CHECK_THAT(m.virtual_reactance_pu,
               WithinRel(matched_impedance(40.0, 12.5, loose.sg.line_reactance_pu, loose.vsg.line_reactance_pu), 1e-12));

    // Heavy VSG with a generous limit: both terms negative, clamp to zero.
    const ImpedanceSetting none = set_virtual_impedance(loose, 60.0);
    CHECK(none.virtual_reactance_pu == 0.0);
    CHECK(none.binding == BindingConstraint::None);
}

TEST_CASE("design on the reference case", "[controller]") {
    const DesignInput in = ref_input(0.2, 1.8);
    const DesignOutput out = design(in);
    CHECK_THAT(out.inertia_s, WithinRel(12.5, 1e-14));
    CHECK_THAT(out.damping_pu, WithinRel(6.25, 1e-14));
    CHECK(out.predicted_lambda == 1.0);
    CHECK(out.predicted_max_current_pu <= 1.8 + 1e-9);
    CHECK(out.virtual_reactance_pu >= 0.0);

    VsgParams vsg = apply_design(in.vsg, out);
    const Trajectory after = simulate_reduced(vsg, in.sg, in.load, ref_base(), designed_scenario(out, 0.2));
    CHECK_FALSE(after.los_time);
    CHECK(*std::max_element(after.current_mag.begin(), after.current_mag.end()) <= 1.8 * 1.02);

    // Without the design the same fault is lost.
    const Trajectory before =
        simulate_reduced(ref_vsg(70.0), in.sg, in.load, ref_base(), ref_scenario(0.2));
    CHECK(before.los_time);

    // Idempotent.
    DesignInput again = in;
    again.vsg = vsg;
    const DesignOutput twice = design(again);
    CHECK_THAT(twice.inertia_s, WithinAbs(out.inertia_s, 1e-9));
    CHECK_THAT(twice.virtual_reactance_pu, WithinAbs(out.virtual_reactance_pu, 1e-9));
}

TEST_CASE("design input validation", "[controller]") {
    DesignInput in = ref_input();
    in.current_limit_pu = 0.0;
    CHECK_THROWS_AS(design(in), InvariantError);
    in = ref_input();
    in.fault_voltage_pu = 1.2;
    CHECK_THROWS_AS(design(in), InvariantError);
    // P_net <= 0 at the fault voltage.
    in = ref_input(1.0);
    CHECK_THROWS_AS(design(in), DesignInfeasibleError);
}

TEST_CASE("designed systems stay synchronised across fault depths", "[controller]") {
    for (int k = 1; k <= 9; ++k) {
        const double eg = 0.1 * k;
        const DesignInput in = ref_input(eg);
        const DesignOutput out = design(in);
        SgParams sg = in.sg;
        sg.voltage_pu = eg;
        const RelativeSwingModel m = reduce(apply_design(in.vsg, out), sg, in.load, ref_base());
        CHECK(std::abs(m.sync_power_reference_pu) < 1e-12);
        CHECK(out.virtual_reactance_pu >= 0.0);
        if (out.binding == BindingConstraint::CurrentLimit) {
            CHECK(out.predicted_max_current_pu <= in.current_limit_pu + 1e-9);
        }
        const Trajectory t = simulate_reduced(apply_design(in.vsg, out), in.sg, in.load, ref_base(),
                                              designed_scenario(out, eg));
        CHECK_FALSE(t.los_time);
    }
}
